#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "nws/errors.hpp"
#include "run_config.hpp"
#include "verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerification = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace nws::app;
  spdlog::set_default_logger(spdlog::stderr_logger_mt("nws"));
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Spectral solver and verification harness for generalized Newell-Whitehead-Segel equations"};
  app.set_version_flag("--version", std::string("nws ") + NWS_VERSION);
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  auto* solve = app.add_subcommand("solve", "Solve a configured equation and write CSV, JSON and SVG");
  std::string solve_config;
  std::string out_dir;
  bool svg = false;
  solve->add_option("--config", solve_config, "Run configuration (JSON)")->required();
  solve->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");
  solve->add_flag("--svg", svg, "Also write an SVG plot");

  auto* verify = app.add_subcommand("verify", "Run acceptance suites and write a report");
  std::string suite = "all";
  std::string report_path;
  verify->add_option("--suite", suite, "all, conv, mult, kernels or appendix")
      ->check(CLI::IsMember({"all", "conv", "mult", "kernels", "appendix"}));
  verify->add_option("--report", report_path, "Report path (JSON)")->required();

  auto* sweep = app.add_subcommand("sweep", "Tabulate root times over parameter ranges");
  std::string sweep_config;
  std::string sweep_out;
  sweep->add_option("--config", sweep_config, "Sweep configuration (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  std::string origin = "cli";
  try {
    if (*solve) {
      const auto config = parse_run_config(read_text_file(solve_config));
      origin = config.equation == Equation::mult || config.equation == Equation::fisher_genetic
                   ? "mult-solver"
                   : "conv-solver";
      const std::filesystem::path dir = out_dir.empty() ? config.out_dir : out_dir;
      const auto result = cmd_solve(config, dir, svg || config.svg);
      std::cout << "wrote " << result.csv_files.size() << " CSV file(s) and "
                << result.metadata_file.string() << '\n';
      return kExitOk;
    }
    if (*sweep) {
      origin = "sweep";
      cmd_sweep(parse_sweep_config(read_text_file(sweep_config)), sweep_out);
      std::cout << "wrote " << sweep_out << '\n';
      return kExitOk;
    }
    if (*verify) {
      origin = "verify";
      const auto report = run_suite(suite_from_string(suite));
      const std::filesystem::path path(report_path);
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write '" + report_path + "'");
      out << report.to_json().dump(2) << '\n';
      for (const auto& g : report.groups) {
        std::cout << (g.passed ? "PASS " : "FAIL ") << g.group << ' ' << g.title << '\n';
      }
      return report.passed() ? kExitOk : kExitVerification;
    }
  } catch (const ConfigError& e) {
    std::cerr << "nws: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nws::Error& e) {
    std::cerr << "nws: " << origin << " error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "nws: " << origin << ": " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
