#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace nws::app {

/// %.17g; non-finite values print as nan, inf, -inf.
std::string format_number(double v);

struct SolveResult {
  std::vector<std::filesystem::path> csv_files;
  std::vector<std::filesystem::path> svg_files;
  std::filesystem::path metadata_file;
  nlohmann::json metadata;
};

/// Writes u_t<k>.csv (header `x,u`) per requested time and metadata.json into out_dir.
/// Solver failures propagate as nws::Error.
SolveResult cmd_solve(const RunConfig& config, const std::filesystem::path& out_dir, bool svg);

/// One row `eps,b,p,t0,regime` per parameter combination. t0 is nan without a finite root;
/// regime is `undefined` where b (p-1) = 0.
void cmd_sweep(const SweepConfig& config, const std::filesystem::path& out);

}  // namespace nws::app
