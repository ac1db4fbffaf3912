#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include "commands.hpp"
#include "nws/errors.hpp"
#include "nws/greens.hpp"
#include "run_config.hpp"
#include "svg.hpp"
#include "verification.hpp"

using namespace nws;
using namespace nws::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("nws-test-" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream b;
  b << in.rdbuf();
  return b.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

const char* kMinimal = R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2}, "times": [0.5]})";

}  // namespace

TEST_CASE("run config parsing") {
  const auto c = parse_run_config(kMinimal);
  CHECK(c.equation == Equation::conv);
  CHECK(c.grid_n == 256);
  CHECK(c.grid_L == 20.0);
  CHECK(c.times == std::vector<double>{0.5});
  CHECK(c.pole_policy == PolePolicy::report);

  // Round trip through the full serialized form.
  auto full = c;
  full.equation = Equation::mult;
  full.params = {0.5, 2.0, -0.125, 3.0};
  full.hypothesis = ScalingHypothesis::times_np1;
  full.pole_policy = PolePolicy::clamp;
  full.factor_count_convention = FactorCountConvention::operators;
  full.C = 0.1;
  full.times = {0.1, 0.30000000000000004, 1.0 / 3.0};
  full.svg = true;
  full.out_dir = "results/run";
  CHECK(run_config_from_json(to_json(full)) == full);
  CHECK(parse_run_config(to_json(full).dump()) == full);

  CHECK(parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2},
                             "times": {"start": 0.1, "stop": 0.5, "count": 5}})")
            .times.size() == 5);

  try {
    parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2}, "times": [1], "colour": 3})");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'colour'") != std::string::npos);
  }
  try {
    parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2, "q": 1}, "times": [1]})");
    FAIL("unknown nested key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'q' in params") != std::string::npos);
  }
  try {
    parse_run_config("{\"equation\": \"conv\",\n \"params\": }");
    FAIL("malformed JSON accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("at byte 33") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "heat", "params": {"D": 1, "b": 1, "eps": 0, "p": 2}, "times": [1]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "conv", "params": {"D": -1, "b": 1, "eps": 0, "p": 2}, "times": [1]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2.5}, "times": [1]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2}, "times": [-1]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "conv", "params": {"D": 1, "b": 1, "eps": 0, "p": 2}, "times": [1], "fisher": {"prob_product": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"equation": "conv", "params": {"D": "1", "b": 1, "eps": 0, "p": 2}, "times": [1]})"),
                  ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-2.0) == "-2");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("solve writes CSV and metadata") {
  TempDir tmp;
  auto config = parse_run_config(kMinimal);
  config.times = {0.1, 0.5};
  const auto r = cmd_solve(config, tmp.path / "lin", true);
  REQUIRE(r.csv_files.size() == 2);
  const auto grids = make_grids(256, 20.0);
  const auto rows = lines(slurp(r.csv_files[1]));
  REQUIRE(rows.size() == 257);
  CHECK(rows[0] == "x,u");
  for (std::size_t j = 0; j < 256; ++j) {
    const auto& row = rows[j + 1];
    const double x = std::stod(row.substr(0, row.find(',')));
    const double u = std::stod(row.substr(row.find(',') + 1));
    CHECK(x == grids.first.x(j));
    CHECK(std::abs(u - heat_kernel(x, 0.5, 1.0) * std::exp(-0.5)) < 1e-10);
  }
  CHECK(fs::exists(tmp.path / "lin" / "metadata.json"));
  CHECK(fs::exists(tmp.path / "lin" / "u.svg"));
  const auto meta = nlohmann::json::parse(slurp(r.metadata_file));
  CHECK(meta["times"][1]["file"] == "u_t1.csv");
  CHECK(meta["times"][1]["pole"] == false);
  CHECK(meta["root"]["regime"] == "no_root");
  CHECK(meta["config"] == to_json(config));

  auto pole = config;
  pole.params.eps = 2.0;
  pole.times = {0.5, 0.8};
  const auto p = cmd_solve(pole, tmp.path / "pole", false);
  CHECK(p.metadata["times"][0]["pole"] == false);
  CHECK(p.metadata["times"][1]["pole"] == true);
  CHECK(p.metadata["root"]["t0"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));
  const auto pole_rows = lines(slurp(p.csv_files[1]));
  CHECK(pole_rows[1].substr(pole_rows[1].find(',') + 1) == "nan");

  auto mult = config;
  mult.equation = Equation::mult;
  mult.params.eps = 0.01;
  mult.times = {0.5};
  const auto m = cmd_solve(mult, tmp.path / "mult", false);
  CHECK(m.metadata["times"][0]["residual"]["hypothesis"] == "none");
  mult.times = {0.005};
  CHECK_THROWS_AS(cmd_solve(mult, tmp.path / "mult_early", false), nws::InvalidArgument);

  auto fe = config;
  fe.equation = Equation::fisher_erfc;
  fe.params.eps = 0.01;
  const auto f = cmd_solve(fe, tmp.path / "fe", false);
  CHECK(f.metadata["times"][0]["max_difference_to_corrected_form"].get<double>() > 0.0);

  auto fg = config;
  fg.equation = Equation::fisher_genetic;
  fg.params.eps = 0.2;
  const auto g = cmd_solve(fg, tmp.path / "fg", false);
  CHECK(g.metadata["times"][0]["imag_residue"].get<double>() < 1e-8);
}

TEST_CASE("sweep rows") {
  TempDir tmp;
  auto table = [&](const char* json) {
    const auto out = tmp.path / "sweep.csv";
    cmd_sweep(parse_sweep_config(json), out);
    auto rows = lines(slurp(out));
    REQUIRE(rows.front() == "eps,b,p,t0,regime");
    rows.erase(rows.begin());
    return rows;
  };
  auto field = [](const std::string& row, int k) {
    std::size_t start = 0;
    for (int i = 0; i < k; ++i) start = row.find(',', start) + 1;
    return row.substr(start, row.find(',', start) - start);
  };

  const auto negative = table(R"({"eps": {"start": -1, "stop": 0, "count": 11}, "b": [1], "p": [2]})");
  REQUIRE(negative.size() == 11);
  for (const auto& row : negative) CHECK(field(row, 4) == "no_root");

  const auto strong = table(R"({"eps": {"start": 1.1, "stop": 3, "count": 20}, "b": [1], "p": [2]})");
  double previous = INFINITY;
  for (const auto& row : strong) {
    const double t0 = std::stod(field(row, 3));
    CHECK(t0 < previous);
    previous = t0;
  }

  const auto orders = table(R"({"eps": [2], "b": [1], "p": [2, 3, 4]})");
  REQUIRE(orders.size() == 3);
  const double t2 = std::stod(field(orders[0], 3));
  CHECK(std::stod(field(orders[1], 3)) == doctest::Approx(t2 / 2).epsilon(1e-12));
  CHECK(std::stod(field(orders[2], 3)) == doctest::Approx(t2 / 3).epsilon(1e-12));

  const auto flat = table(R"({"eps": [1], "b": [0], "p": [2]})");
  CHECK(field(flat[0], 4) == "undefined");
  CHECK_THROWS_AS(parse_sweep_config(R"({"eps": [1], "b": [1], "p": [2.5]})"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"eps": [1], "b": [1], "p": [2], "q": 0})"), ConfigError);
}

TEST_CASE("svg plot") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<PlotSeries> series{{"a", {0.0, 1.0, NAN, 2.0}}, {"b<c", {1.0, 1.0, 1.0, 1.0}}};
  const auto svg = render_line_plot(x, series, "title & more", "x", "u");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("title &amp; more") != std::string::npos);
  CHECK(svg.find("b&lt;c") != std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) {
    ++polylines;
  }
  CHECK(polylines == 3);
}

TEST_CASE("verification report bookkeeping") {
  CHECK(suite_from_string("appendix") == Suite::appendix);
  CHECK_THROWS_AS(suite_from_string("everything"), nws::InvalidArgument);
  CHECK(criteria_for(Suite::all).size() == 11);
  VerificationReport report;
  run_criterion("1", report);
  CHECK(report.passed());
  for (const auto& r : report.records) CHECK(std::isfinite(r.tolerance));
  const auto j = report.to_json();
  CHECK(j["groups"][0]["id"] == "1");
  CHECK(j["records"].size() == report.records.size());
  CHECK_THROWS_AS(run_criterion("99", report), nws::InvalidArgument);
}

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  doctest::Context context(argc, argv);
  return context.run();
}
