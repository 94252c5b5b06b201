#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gsc/cli.hpp"
#include "gsc/config.hpp"
#include "gsc/error.hpp"
#include "gsc/model_core.hpp"
#include "gsc/report.hpp"

namespace fs = std::filesystem;
using namespace gsc::cli;
using gsc::report::Json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gsc_test_" + std::to_string(std::random_device{}()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const RunConfig& rc) {
  std::ostringstream out, err;
  const int code = run(rc, out, err);
  return {code, out.str(), err.str()};
}

// A short labeled run so analysis stays fast.
const char* kSimToml = R"(
[simulation]
pre_s = 5.0
fault_s = 20.0
post_s = 5.0
k = 0.5
noise_i = 0.01
noise_v = 0.001
seed = 3
)";

fs::path simulate_to(const TempDir& dir, const std::string& name) {
  write_file(dir / "sim.toml", kSimToml);
  RunConfig rc;
  rc.command = Command::Simulate;
  rc.config = dir / "sim.toml";
  rc.output = dir / name;
  const auto o = invoke(rc);
  REQUIRE(o.code == kExitOk);
  return *rc.output;
}

int shell_status(const std::string& cmd) {
  const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("command names") {
  for (Command c : {Command::Simulate, Command::Analyze, Command::Fit, Command::Metrics,
                    Command::Validate, Command::Report}) {
    CHECK(parse_command(command_name(c)) == c);
  }
  CHECK_FALSE(parse_command("plot").has_value());
}

TEST_CASE("metrics on the 2.5 V extrema") {
  TempDir dir;
  write_file(dir / "ex.json",
             R"({"v_source_v": 2.52, "v_clamp_v": 1.67, "i_nom_a": 0.21,
                 "v_short_min_v": 0.073, "i_max_a": 13.01, "t_fault_s": 180})");
  RunConfig rc;
  rc.command = Command::Metrics;
  rc.inputs = {dir / "ex.json"};
  const auto o = invoke(rc);
  REQUIRE(o.code == kExitOk);
  const Json doc = Json::parse(o.out);
  const Json& bf = doc["bounded_fault"];
  CHECK(std::round(bf["sfe"].get<double>() * 100.0) / 100.0 == doctest::Approx(2.71));
  CHECK(bf["k_provenance"] == "literature_default");
  CHECK(doc["k_per_s"] == 1000.0);
  CHECK(doc["metadata"]["tool"] == "gsc");
  CHECK(doc["metadata"]["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK_FALSE(doc["warnings"].empty());

  rc.k = 500.0;
  const Json declared = Json::parse(invoke(rc).out);
  CHECK(declared["bounded_fault"]["k_provenance"] == "declared");
  CHECK(declared["bounded_fault"]["tci_clamp"].get<double>() ==
        doctest::Approx(0.5 * bf["tci_clamp"].get<double>()));

  write_file(dir / "bad.json", R"({"v_source_v": 2.52, "speed": 1})");
  rc.inputs = {dir / "bad.json"};
  CHECK(invoke(rc).code == kExitData);
  write_file(dir / "bad2.json", R"({"v_source_v": 2.52, "v_clamp_v": 1.67, "i_nom_a": 0.21,
                 "v_short_min_v": 0.073, "i_max_a": 0.1, "t_fault_s": 180})");
  rc.inputs = {dir / "bad2.json"};
  CHECK(invoke(rc).code == kExitData);
}

TEST_CASE("data errors exit 1 and name the path") {
  TempDir dir;
  write_file(dir / "empty.csv", "");
  RunConfig rc;
  rc.command = Command::Analyze;
  rc.inputs = {dir / "empty.csv"};
  auto o = invoke(rc);
  CHECK(o.code == kExitData);
  CHECK(o.err.find("no data rows") != std::string::npos);

  rc.inputs = {dir / "missing.csv"};
  o = invoke(rc);
  CHECK(o.code == kExitData);
  CHECK(o.err.find("missing.csv") != std::string::npos);

  rc.inputs.clear();
  CHECK(invoke(rc).code == kExitUsage);

  rc.inputs = {dir / "empty.csv"};
  rc.config = dir / "nope.toml";
  CHECK(invoke(rc).code == kExitData);
}

TEST_CASE("usage errors exit 2") {
  TempDir dir;
  RunConfig rc;
  rc.command = Command::Simulate;
  rc.format = Format::Json;
  CHECK(invoke(rc).code == kExitUsage);

  const auto log = simulate_to(dir, "log.csv");
  rc = RunConfig{};
  rc.command = Command::Analyze;
  rc.inputs = {log};
  rc.format = Format::Csv;
  CHECK(invoke(rc).code == kExitUsage);
  rc = RunConfig{};
  rc.command = Command::Analyze;
  rc.inputs = {log};
  rc.scenario = "aggressive";
  CHECK(invoke(rc).code == kExitUsage);
  rc.scenario.reset();
  rc.cccs_weights = std::array<double, 3>{0.5, 0.5, 0.5};
  CHECK(invoke(rc).code == kExitUsage);
}

TEST_CASE("simulate then analyze round trip") {
  TempDir dir;
  const auto log = simulate_to(dir, "log.csv");
  RunConfig rc;
  rc.command = Command::Analyze;
  rc.inputs = {log};
  rc.output = dir / "report.json";
  REQUIRE(invoke(rc).code == kExitOk);
  const Json doc = Json::parse(read_file(*rc.output));
  REQUIRE(doc["trials"].size() == 1);
  const Json& t = doc["trials"][0];
  CHECK(t["k_provenance"] == "fitted");
  CHECK(t["k_used_per_s"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(t["samples"] == 3000);
  const double sfe = t["bounded_fault"]["sfe"].get<double>();
  const double want = 0.073 * 13.01 / (1.67 * 1.67 / 7.95);
  CHECK(std::abs(sfe / want - 1.0) < 0.02);
  CHECK(t["spectral"].size() == 3);
  for (const auto& s : t["spectral"]) {
    for (const char* key : {"nci", "tci", "f_d_hz", "f_c_hz", "h_s_bits", "scc", "ses", "tfsm",
                            "cvi"}) {
      CHECK(s.contains(key));
    }
  }
  for (const char* key : {"cdi_mean_pct", "gamma", "rmd", "nlr", "redundancy_error_pct", "cccs",
                          "scenario", "excluded_samples"}) {
    CHECK(t["calibration"].contains(key));
  }
  CHECK(t["fit"].contains("k_fit_per_s"));
  const double v_clamp = t["extrema"]["v_clamp_v"].get<double>();
  const double i_nom = t["extrema"]["i_nom_a"].get<double>();
  const double eps = t["bounded_fault"]["epsilon"].get<double>();
  CHECK(t["law_power"]["p_standard_w"].get<double>() ==
        doctest::Approx(v_clamp * t["bounded_fault"]["i_ceiling_a"].get<double>()));
  CHECK(t["law_power"]["p_modified_w"].get<double>() ==
        doctest::Approx(v_clamp * i_nom * std::exp(eps - 1.0)));
  CHECK(doc["metadata"]["inputs"][0]["sha256"] == gsc::report::digest_file(log).sha256);

  // Identical apart from the timestamp.
  rc.output = dir / "report2.json";
  REQUIRE(invoke(rc).code == kExitOk);
  Json a = doc;
  Json b = Json::parse(read_file(*rc.output));
  a["metadata"].erase("generated_at");
  b["metadata"].erase("generated_at");
  CHECK(a.dump() == b.dump());

  // Flags override config and defaults.
  rc.output.reset();
  rc.k = 2.0;
  rc.bins = 64;
  rc.scenario = "steady_state";
  const Json over = Json::parse(invoke(rc).out);
  CHECK(over["trials"][0]["k_provenance"] == "declared");
  CHECK(over["trials"][0]["calibration"]["scenario"] == "steady_state");

  // validate, fit, report.
  rc = RunConfig{};
  rc.command = Command::Validate;
  rc.inputs = {log};
  rc.output = dir / "validate.json";
  REQUIRE(invoke(rc).code == kExitOk);
  rc.command = Command::Fit;
  rc.output = dir / "fit.json";
  REQUIRE(invoke(rc).code == kExitOk);
  const Json fit = Json::parse(read_file(dir / "fit.json"));
  CHECK(fit["fits"][0]["fit"]["k_fit_per_s"].get<double>() ==
        doctest::Approx(0.5).epsilon(0.05));
  rc.format = Format::Csv;
  rc.output.reset();
  const auto fit_csv = invoke(rc);
  CHECK(fit_csv.code == kExitOk);
  CHECK(fit_csv.out.rfind("input,trial,window_points,r0_fit_ohm", 0) == 0);

  rc = RunConfig{};
  rc.command = Command::Report;
  rc.inputs = {dir / "report.json", dir / "validate.json", dir / "fit.json"};
  const auto merged = invoke(rc);
  REQUIRE(merged.code == kExitOk);
  const Json m = Json::parse(merged.out);
  CHECK(m["trials"].size() == 2);
  CHECK(m["fits"].size() == 1);
  CHECK(m["metadata"]["sources"].size() == 3);
  CHECK(m["metadata"]["command"] == "report");
}

TEST_CASE("plot tables") {
  TempDir dir;
  const auto log = simulate_to(dir, "log.csv");
  RunConfig rc;
  rc.command = Command::Analyze;
  rc.inputs = {log};
  rc.format = Format::Csv;
  rc.output = dir / "plots";
  REQUIRE(invoke(rc).code == kExitOk);

  const fs::path plots = dir / "plots";
  CHECK(count_lines(plots / "trial1_pre_trace.csv") == 500 + 1);
  CHECK(count_lines(plots / "trial1_fault_trace.csv") == 2000 + 1);
  CHECK(count_lines(plots / "trial1_post_trace.csv") == 500 + 1);
  CHECK(read_file(plots / "trial1_fault_trace.csv").rfind("t_s,v_v,i_a,r_ohm,p_w\n", 0) == 0);
  CHECK(read_file(plots / "trial1_fault_psd.csv").rfind("f_hz,psd\n", 0) == 0);
  CHECK(count_lines(plots / "trial1_fault_psd.csv") == 2000 / 2 + 1 + 1);

  // 2000 samples: window 200, hop 100 -> 19 frames of 101 bins.
  CHECK(count_lines(plots / "trial1_fault_spectrogram.csv") == 19 * 101 + 1);

  std::ifstream law(plots / "trial1_law.csv");
  std::string line;
  std::getline(law, line);
  CHECK(line == "r_short_ohm,i_std_a,i_mod_a");
  const Json doc = [&] {
    RunConfig j;
    j.command = Command::Analyze;
    j.inputs = {log};
    return Json::parse(invoke(j).out);
  }();
  const Json& ex = doc["trials"][0]["extrema"];
  const double v = ex["v_clamp_v"].get<double>();
  const double r0 = v / ex["i_nom_a"].get<double>();
  const double k = doc["trials"][0]["k_used_per_s"].get<double>();
  const gsc::model::ModelParams p(v, r0, k);
  std::size_t rows = 0;
  while (std::getline(law, line)) {
    double r = 0, is = 0, im = 0;
    char c1 = 0, c2 = 0;
    std::istringstream(line) >> r >> c1 >> is >> c2 >> im;
    const double t = std::log(r0 / (r0 + r)) / k;
    CHECK(is - im == doctest::Approx(gsc::model::model_divergence(p, t)).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 201);

  rc.format = Format::Json;
  rc.output.reset();
  rc.plot_dir = dir / "extra";
  rc.inputs = {log, simulate_to(dir, "second.csv")};
  REQUIRE(invoke(rc).code == kExitOk);
  CHECK(fs::exists(dir / "extra" / "log" / "trial1_law.csv"));
  CHECK(fs::exists(dir / "extra" / "second" / "trial1_law.csv"));
}

TEST_CASE("config parsing") {
  using gsc::config::parse_config;
  const auto cfg = parse_config(R"(
[fidelity]
histogram_bins = 128
window_len = 64
window = "rectangular"
cvi_weights = [0.4, 0.15, 0.15, 0.15, 0.15]

[calibration]
scenario = "transient_dominant"
linearity_steps = [[1.1, 1.0], [2.0, 2.0]]

[analysis]
use_labels = false
k_declared = 1000.0

[clamp]
diode = "1n5408"

[simulation]
v0 = 5.0
noise_i = 0.02
polarity = "reverse"
seed = 99
)");
  CHECK(cfg.analysis.fidelity.histogram_bins == 128);
  CHECK(cfg.analysis.fidelity.window_len == 64u);
  CHECK(cfg.analysis.fidelity.window == gsc::fidelity::Window::Rectangular);
  CHECK(cfg.analysis.fidelity.weights[0] == 0.4);
  CHECK(cfg.analysis.scenario == gsc::calibration::Scenario::TransientDominant);
  CHECK(cfg.analysis.linearity_steps.size() == 2);
  CHECK_FALSE(cfg.analysis.use_labels);
  CHECK(cfg.analysis.k_declared == 1000.0);
  CHECK(cfg.simulation.model.v0() == 5.0);
  CHECK(cfg.simulation.operating_voltage() == doctest::Approx(2.4));
  CHECK(cfg.simulation.polarity == gsc::pipeline::Polarity::Reverse);
  CHECK(cfg.simulation.seed == 99u);

  const auto defaults = parse_config("");
  CHECK(defaults.simulation.operating_voltage() == doctest::Approx(1.67));
  CHECK(defaults.analysis.fidelity.histogram_bins == 256);

  CHECK_THROWS_AS(parse_config("[fidelity]\nbinz = 3\n"), gsc::DomainError);
  CHECK_THROWS_AS(parse_config("[plots]\n"), gsc::DomainError);
  CHECK_THROWS_AS(parse_config("[fidelity]\nhistogram_bins = \"many\"\n"), gsc::DomainError);
  CHECK_THROWS_AS(parse_config("[calibration]\nweights = [0.5, 0.5]\n"), gsc::DomainError);
  try {
    parse_config("[fidelity]\nhistogram_bins = 3\nwindow = \n");
    FAIL("expected parse error");
  } catch (const gsc::ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("config file from the environment") {
  TempDir dir;
  write_file(dir / "env.toml", std::string(kSimToml) + "\n[calibration]\nscenario = \"steady_state\"\n");
  RunConfig rc;
  rc.command = Command::Simulate;
  rc.output = dir / "a.csv";
  setenv(gsc::config::kConfigEnv, (dir / "env.toml").c_str(), 1);
  const int code = invoke(rc).code;
  unsetenv(gsc::config::kConfigEnv);
  REQUIRE(code == kExitOk);
  CHECK(count_lines(dir / "a.csv") == 3000 + 1);
}

TEST_CASE("gsc executable exit codes") {
  const std::string bin = GSC_BIN;
  CHECK(shell_status(bin + " --version") == 0);
  CHECK(shell_status(bin + " --help") == 0);
  CHECK(shell_status(bin) == 2);
  CHECK(shell_status(bin + " frobnicate") == 2);
  CHECK(shell_status(bin + " analyze --bogus") == 2);
  CHECK(shell_status(bin + " analyze --format xml -i x.csv") == 2);
  CHECK(shell_status(bin + " analyze -i /nonexistent/file.csv") == 1);
}
