#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fmforge/cli.hpp"
#include "fmforge/errors.hpp"
#include "fmforge/io.hpp"

using namespace fmforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "fmforge_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("frequency unit handling") {
  CHECK(to_rad_per_s(1.0, FreqUnit::kRadPerS) == 1.0);
  CHECK(to_rad_per_s(1.0, FreqUnit::kHzTimes2Pi) == doctest::Approx(kTwoPi));
  CHECK(to_rad_per_s(1.0, FreqUnit::kKiloHzTimes2Pi) == doctest::Approx(kTwoPi * 1e3));

  CHECK(freq_unit_from(Json::object()) == FreqUnit::kKiloHzTimes2Pi);
  CHECK(freq_unit_from(Json{{"freq_unit", "rad_per_s"}}) == FreqUnit::kRadPerS);
  CHECK_THROWS_AS(freq_unit_from(Json{{"freq_unit", "GHz"}}), ConfigError);
}

TEST_CASE("pulse JSON round trip is bit-exact") {
  const DiscretePulse d{{1.25e7, 1.26e7, 1.2500000000000013e7}, 2e-4, false};
  const Pulse rd = pulse_from_json(pulse_to_json(Pulse{d}, 1.23e5));
  const auto& d2 = std::get<DiscretePulse>(rd);
  CHECK(d2.segment_freqs == d.segment_freqs);
  CHECK(d2.duration == d.duration);
  CHECK(d2.symmetric == d.symmetric);

  const ContinuousPulse c{{1.1e7, 1.2e7, 1.1e7}, 3e-4, 25, true};
  const Pulse rc = pulse_from_json(pulse_to_json(Pulse{c}, 0.0));
  const auto& c2 = std::get<ContinuousPulse>(rc);
  CHECK(c2.step_freqs == c.step_freqs);
  CHECK(c2.duration == c.duration);
  CHECK(c2.substeps == 25);
  CHECK(c2.symmetric);
}

TEST_CASE("pulse JSON rejections carry the offending field") {
  Json j;
  j["kind"] = "discrete";
  j["tau_s"] = 2e-4;
  CHECK_THROWS_WITH_AS(pulse_from_json(j),
                       doctest::Contains("segment_freqs_rad_s"), ConfigError);
  j["segment_freqs_rad_s"] = std::vector<double>{1.0};
  j["kind"] = "triangular";
  CHECK_THROWS_WITH_AS(pulse_from_json(j), doctest::Contains("triangular"), ConfigError);
  j["kind"] = "discrete";
  j["schema_version"] = 99;
  CHECK_THROWS_WITH_AS(pulse_from_json(j), doctest::Contains("schema_version"), ConfigError);
}

TEST_CASE("trap config parsing with kHz defaults") {
  CHECK_THROWS_WITH_AS(trap_from_json(Json::object()), doctest::Contains("n_ions"),
                       ConfigError);

  Json cfg;
  cfg["trap"] = Json{{"n_ions", 2}};
  const TrapConfig t = trap_from_json(cfg);
  CHECK(t.n_ions == 2);
  CHECK(t.transverse_freq == doctest::Approx(kTwoPi * 2.1e6));
  CHECK(t.axial_freq == doctest::Approx(kTwoPi * 0.4e6));

  cfg["trap"]["axial_freq"] = 300.0;  // kHz by default
  CHECK(trap_from_json(cfg).axial_freq == doctest::Approx(kTwoPi * 300e3));

  // long chains relax the axial confinement
  const TrapConfig t12 = TrapConfig::yb171(12);
  CHECK(t12.axial_freq ==
        doctest::Approx(kTwoPi * 0.4e6 * std::sqrt(6.0 / 12.0)).epsilon(1e-12));
}

TEST_CASE("objective spec parsing applies frequency units") {
  Json cfg;
  cfg["objective"] = Json{{"method", "s_robust"}, {"uncertainty", 1.0},
                          {"duration_us", 300.0}, {"iterations", 10},
                          {"trials", 2}};
  const ObjectiveSpec spec = spec_from_json(cfg);
  CHECK(spec.method == Method::kSRobust);
  CHECK(spec.uncertainty == doctest::Approx(kTwoPi * 1e3));
  CHECK(spec.duration == doctest::Approx(300e-6));
  CHECK(spec.iterations == 10);
  CHECK(spec.trials == 2);

  cfg["objective"]["method"] = "sideways";
  CHECK_THROWS_AS(spec_from_json(cfg), ConfigError);
}

TEST_CASE("atomic_write creates directories and replaces content") {
  const fs::path p = temp_dir() / "sub" / "file.txt";
  atomic_write(p.string(), "one\n");
  CHECK(slurp(p) == "one\n");
  atomic_write(p.string(), "two\n");
  CHECK(slurp(p) == "two\n");
  // no temp litter left behind
  int count = 0;
  for (const auto& e : fs::directory_iterator(p.parent_path())) {
    (void)e;
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("config hash is canonical and content-sensitive") {
  Json a, b;
  a["x"] = 1;
  a["y"] = 2;
  b["y"] = 2;
  b["x"] = 1;
  CHECK(config_hash(a) == config_hash(b));
  b["x"] = 3;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("load_json errors carry the file path") {
  const fs::path p = temp_dir() / "broken.json";
  spit(p, "{ not json");
  CHECK_THROWS_WITH_AS(load_json(p.string()), doctest::Contains("broken.json"), ConfigError);
  CHECK_THROWS_WITH_AS(load_json((temp_dir() / "missing.json").string()),
                       doctest::Contains("missing.json"), ConfigError);
}

TEST_CASE("curve JSONL and landscape CSV shapes") {
  std::vector<CurvePoint> curve{{0, 1.0, 2.0, 3}, {1, 0.5, 2.1, 4}};
  const std::string jsonl = curve_to_jsonl(curve);
  int lines = 0;
  std::istringstream ss(jsonl);
  std::string line;
  while (std::getline(ss, line)) {
    const Json j = Json::parse(line);
    CHECK(j.contains("iter"));
    CHECK(j.contains("cost"));
    CHECK(j.contains("omega_rad_s"));
    ++lines;
  }
  CHECK(lines == 2);

  Landscape ls;
  ls.eps1_grid = {-1.0, 1.0};
  ls.eps2_grid = {-1.0, 1.0};
  ls.error = {{0.1, 0.2}, {0.3, 0.4}};
  const std::string csv = landscape_to_csv(ls);
  CHECK(csv.rfind("eps1_rad_s,eps2_rad_s,error", 0) == 0);
  lines = 0;
  std::istringstream cs(csv);
  while (std::getline(cs, line)) ++lines;
  CHECK(lines == 5);  // header + 4 cells
}

TEST_CASE("cli: argument and config failures use exit code 1") {
  CHECK(cli::run({"frobnicate"}) == 1);
  CHECK(cli::run({"modes"}) == 1);  // --config required
  const fs::path cfg = temp_dir() / "nonexistent.json";
  CHECK(cli::run({"modes", "--config", cfg.string()}) == 1);
  CHECK(cli::run({"--version"}) == 0);
}

TEST_CASE("cli: numerical failures use exit code 2") {
  const fs::path cfg = temp_dir() / "zigzag.json";
  spit(cfg, R"({"trap": {"n_ions": 8, "axial_freq": 1995.0}})");
  const fs::path out = temp_dir() / "zigzag_modes.json";
  CHECK(cli::run({"modes", "--config", cfg.string(), "-o", out.string()}) == 2);
}

TEST_CASE("cli: modes subcommand writes the report and a manifest") {
  const fs::path cfg = temp_dir() / "modes_cfg.json";
  spit(cfg, R"({"trap": {"n_ions": 2}})");
  const fs::path out = temp_dir() / "modes_out.json";
  REQUIRE(cli::run({"modes", "--config", cfg.string(), "-o", out.string()}) == 0);

  const Json j = Json::parse(slurp(out));
  CHECK(j["n_ions"] == 2);
  REQUIRE(j["mode_freqs_rad_s"].size() == 2);
  CHECK(j["mode_freqs_rad_s"][0].get<double>() == doctest::Approx(kTwoPi * 2.1e6));
  CHECK(j["lamb_dicke"][0][0].get<double>() == doctest::Approx(0.0664100).epsilon(1e-4));

  const Json m = Json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(m["subcommand"] == "modes");
  CHECK(m["outputs"][0] == out.string());
  CHECK(m["config_hash"].get<std::uint64_t>() == config_hash(Json::parse(slurp(cfg))));
}

TEST_CASE("cli: optimize then evaluate end to end, byte-deterministic") {
  const fs::path cfg = temp_dir() / "opt_cfg.json";
  spit(cfg, R"({
    "trap": {"n_ions": 2},
    "pair": [0, 1],
    "objective": {"method": "robust", "iterations": 300, "trials": 2,
                  "cv_size": 10, "seed": 3}
  })");
  const fs::path pulse1 = temp_dir() / "pulse1.json";
  const fs::path pulse2 = temp_dir() / "pulse2.json";
  const fs::path curve1 = temp_dir() / "curve1.jsonl";
  const fs::path curve2 = temp_dir() / "curve2.jsonl";
  REQUIRE(cli::run({"optimize", "--config", cfg.string(), "-o", pulse1.string(),
                    "--curve", curve1.string()}) == 0);
  REQUIRE(cli::run({"optimize", "--config", cfg.string(), "-o", pulse2.string(),
                    "--curve", curve2.string()}) == 0);
  CHECK(slurp(pulse1) == slurp(pulse2));
  CHECK(slurp(curve1) == slurp(curve2));

  const Json pj = Json::parse(slurp(pulse1));
  CHECK(pj["kind"] == "discrete");
  CHECK(pj["symmetric"] == true);
  CHECK(pj["omega_rad_s"].get<double>() > 0.0);
  REQUIRE(pj["segment_freqs_rad_s"].size() == 16);

  const fs::path ecfg = temp_dir() / "eval_cfg.json";
  spit(ecfg, std::string(R"({
    "trap": {"n_ions": 2},
    "pair": [0, 1],
    "pulse": ")") + pulse1.string() + R"(",
    "uncertainty": 0.1,
    "test_size": 100
  })");
  const fs::path fid = temp_dir() / "fidelity.json";
  REQUIRE(cli::run({"evaluate", "--config", ecfg.string(), "-o", fid.string()}) == 0);
  const Json fj = Json::parse(slurp(fid));
  CHECK(fj["mean_fidelity"].get<double>() > 0.99);
  CHECK(fj["dephasing_metric"].get<double>() >= 0.0);

  const fs::path lcfg = temp_dir() / "land_cfg.json";
  spit(lcfg, std::string(R"({
    "trap": {"n_ions": 2},
    "pair": [0, 1],
    "pulse": ")") + pulse1.string() + R"(",
    "half_width": 2.0,
    "points_per_axis": 15
  })");
  const fs::path csv = temp_dir() / "landscape.csv";
  REQUIRE(cli::run({"landscape", "--config", lcfg.string(), "-o", csv.string()}) == 0);
  CHECK(slurp(csv).rfind("eps1_rad_s,eps2_rad_s,error", 0) == 0);
  const Json summary = Json::parse(slurp(csv.string() + ".summary.json"));
  CHECK(summary["area_rad2_s2"].get<double>() > 0.0);
}
