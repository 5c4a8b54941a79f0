#include "fmforge/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>

#include <CLI11.hpp>

#include "fmforge/errors.hpp"
#include "fmforge/io.hpp"
#include "fmforge/parallel.hpp"
#include "fmforge/version.hpp"

namespace fmforge::cli {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

IonPair pair_from(const Json& config, int n_ions) {
  if (!config.contains("pair")) throw ConfigError("config: missing 'pair' [j1, j2]");
  const auto v = config.at("pair").get<std::vector<int>>();
  if (v.size() != 2) throw ConfigError("pair: expected two ion indices");
  IonPair p{v[0], v[1]};
  if (p.first < 0 || p.second < 0 || p.first >= n_ions || p.second >= n_ions ||
      p.first == p.second)
    throw ConfigError("pair: indices must be distinct and in [0, n_ions)");
  return p;
}

FidelityConfig fidelity_config_from(const Json& config, int n_modes) {
  FidelityConfig fcfg;
  if (config.contains("nbar")) {
    const Json& nb = config.at("nbar");
    if (nb.is_number())
      fcfg.nbar.assign(n_modes, nb.get<double>());
    else
      fcfg.nbar = nb.get<std::vector<double>>();
    if (static_cast<int>(fcfg.nbar.size()) != n_modes)
      throw ConfigError("nbar: expected a scalar or one value per mode");
  }
  return fcfg;
}

Pulse pulse_from(const Json& config, std::vector<std::string>& inputs) {
  if (!config.contains("pulse")) throw ConfigError("config: missing 'pulse'");
  const Json& p = config.at("pulse");
  if (p.is_string()) {
    inputs.push_back(p.get<std::string>());
    return pulse_from_json(load_json(p.get<std::string>()));
  }
  return pulse_from_json(p);
}

struct Emitter {
  std::string subcommand;
  std::uint64_t hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double t_start = 0.0;

  void write(const std::string& path, const std::string& content) {
    atomic_write(path, content);
    outputs.push_back(path);
  }
  void finish() {
    RunManifest m;
    m.tool_version = kVersion;
    m.schema_version = kSchemaVersion;
    m.subcommand = subcommand;
    m.config_hash = hash;
    m.seed = seed;
    m.inputs = inputs;
    m.outputs = outputs;
    m.wall_time_s =
        std::chrono::duration<double>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count() -
        t_start;
    m.timestamp_utc = utc_now();
    const std::string path = outputs.empty() ? subcommand + ".manifest.json"
                                             : outputs.front() + ".manifest.json";
    atomic_write(path, m.to_json().dump(2) + "\n");
  }
};

Emitter make_emitter(const std::string& sub, const std::string& config_path,
                     const Json& config) {
  Emitter e;
  e.subcommand = sub;
  e.hash = config_hash(config);
  e.seed = config.contains("objective") ? config["objective"].value("seed", 1ull)
                                        : config.value("seed", 1ull);
  e.inputs.push_back(config_path);
  e.t_start = std::chrono::duration<double>(
                  std::chrono::steady_clock::now().time_since_epoch())
                  .count();
  return e;
}

int cmd_modes(const std::string& config_path, const std::string& out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("modes", config_path, config);
  const TrapConfig trap = trap_from_json(config);
  const ModeStructure modes = transverse_modes(trap);
  em.write(out.empty() ? "modes.json" : out, modes_to_json(trap, modes).dump(2) + "\n");
  em.finish();
  return 0;
}

int cmd_optimize(const std::string& config_path, const std::string& out,
                 const std::string& curve_out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("optimize", config_path, config);
  const TrapConfig trap = trap_from_json(config);
  const ModeStructure modes = transverse_modes(trap);
  const IonPair pair = pair_from(config, trap.n_ions);
  const ObjectiveSpec spec = spec_from_json(config);

  const OptimizationRun run = multi_trial(spec, modes, pair);

  Json meta;
  meta["method"] = method_name(spec.method);
  meta["uncertainty_kHz"] = spec.uncertainty / (kTwoPi * 1e3);
  meta["seed"] = spec.seed;
  meta["selected_trial"] = run.selected_index;
  meta["cv_error"] = run.trials[run.selected_index].cv_score;
  meta["objective"] = spec_to_json(spec);
  em.write(out.empty() ? "pulse.json" : out,
           pulse_to_json(run.selected, run.omega, meta).dump(2) + "\n");
  em.write(curve_out.empty() ? "curve.jsonl" : curve_out,
           curve_to_jsonl(run.learning_curve()));
  em.finish();
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("evaluate", config_path, config);
  const TrapConfig trap = trap_from_json(config);
  const ModeStructure modes = transverse_modes(trap);
  const IonPair pair = pair_from(config, trap.n_ions);
  const Pulse pulse = pulse_from(config, em.inputs);
  const FreqUnit unit = freq_unit_from(config);
  const double uncertainty = freq_field(config, "uncertainty", unit);
  const int test_size = config.value("test_size", 1000);
  const std::uint64_t seed = config.value("seed", 1ull);
  const FidelityConfig fcfg = fidelity_config_from(config, modes.n_modes());

  const FidelityReport rep =
      test_fidelity(pulse, modes, pair, uncertainty, test_size, seed, fcfg);
  Json j = fidelity_report_to_json(rep);
  j["dephasing_metric"] = dephasing_metric(pulse, modes, pair, uncertainty, test_size, seed);
  em.write(out.empty() ? "fidelity.json" : out, j.dump(2) + "\n");
  em.finish();
  return 0;
}

int cmd_landscape(const std::string& config_path, const std::string& out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("landscape", config_path, config);
  const TrapConfig trap = trap_from_json(config);
  const ModeStructure modes = transverse_modes(trap);
  const IonPair pair = pair_from(config, trap.n_ions);
  const Pulse pulse = pulse_from(config, em.inputs);
  const FreqUnit unit = freq_unit_from(config);

  LandscapeSpec grid;
  grid.half_width = freq_field(config, "half_width", unit, grid.half_width);
  grid.points_per_axis = config.value("points_per_axis", grid.points_per_axis);
  grid.threshold = config.value("threshold", grid.threshold);
  const FidelityConfig fcfg = fidelity_config_from(config, modes.n_modes());

  const Landscape ls = error_landscape(pulse, modes, pair, grid, fcfg);
  const std::string csv = out.empty() ? "landscape.csv" : out;
  em.write(csv, landscape_to_csv(ls));
  Json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["threshold"] = ls.threshold;
  summary["area_rad2_s2"] = ls.area;
  summary["points_per_axis"] = grid.points_per_axis;
  em.write(csv + ".summary.json", summary.dump(2) + "\n");
  em.finish();
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("sweep", config_path, config);
  const ObjectiveSpec spec = spec_from_json(config);
  if (!config.contains("n_ions_list"))
    throw ConfigError("sweep: missing 'n_ions_list'");
  const auto ns = config.at("n_ions_list").get<std::vector<int>>();
  const int test_size = config.value("test_size", 1000);
  const std::uint64_t test_seed = config.value("test_seed", 1ull);

  const SweepReport rep = scalability_sweep(spec, ns, test_size, test_seed);
  em.write(out.empty() ? "sweep.json" : out, sweep_report_to_json(rep).dump(2) + "\n");
  em.finish();
  return 0;
}

int cmd_sequence(const std::string& config_path, const std::string& out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("sequence", config_path, config);
  const TrapConfig trap = trap_from_json(config);
  const ModeStructure modes = transverse_modes(trap);
  const IonPair pair = pair_from(config, trap.n_ions);
  const Pulse pulse = pulse_from(config, em.inputs);
  const FreqUnit unit = freq_unit_from(config);
  const int n_gates = config.value("n_gates", 5);
  const double half_width = freq_field(config, "scan_half_width", unit);
  const int n_points = config.value("n_points", 81);
  const FidelityConfig fcfg = fidelity_config_from(config, modes.n_modes());

  const auto scan = sequence_scan(pulse, modes, pair, n_gates, half_width, n_points, fcfg);
  em.write(out.empty() ? "sequence.json" : out,
           sequence_scan_to_json(scan, n_gates).dump(2) + "\n");
  em.finish();
  return 0;
}

int cmd_batch_study(const std::string& config_path, const std::string& out) {
  const Json config = load_json(config_path);
  Emitter em = make_emitter("batch-study", config_path, config);
  const TrapConfig trap = trap_from_json(config);
  const ModeStructure modes = transverse_modes(trap);
  const IonPair pair = pair_from(config, trap.n_ions);
  const ObjectiveSpec spec = spec_from_json(config);
  if (!config.contains("batch_sizes"))
    throw ConfigError("batch-study: missing 'batch_sizes'");
  const auto sizes = config.at("batch_sizes").get<std::vector<int>>();
  const int budget = config.value("eval_budget", 15000);
  const int test_size = config.value("test_size", 1000);

  const auto entries = batch_size_study(sizes, budget, spec, modes, pair, test_size);
  em.write(out.empty() ? "batch_study.json" : out,
           batch_study_to_json(entries, budget).dump(2) + "\n");
  em.finish();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"FM pulse design for Molmer-Sorensen gates on trapped-ion chains"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");

  struct Sub {
    CLI::App* app = nullptr;
    std::string config;
    std::string output;
  };
  auto add = [&](const std::string& name, const std::string& desc) {
    Sub s;
    s.app = app.add_subcommand(name, desc);
    s.app->add_option("--config", s.config, "JSON config file")->required();
    s.app->add_option("-o,--output", s.output, "Primary output path");
    return s;
  };

  Sub modes = add("modes", "Solve chain equilibrium and transverse modes");
  Sub optimize = add("optimize", "Design an FM pulse for one ion pair");
  std::string curve_out;
  optimize.app->add_option("--curve", curve_out, "Learning-curve JSONL path");
  Sub evaluate = add("evaluate", "Test-set fidelity of a pulse");
  Sub landscape = add("landscape", "2-D gate-error landscape (two-ion chains)");
  Sub sweep = add("sweep", "Optimize and evaluate across chain sizes");
  Sub sequence = add("sequence", "Gate-sequence populations over a detuning scan");
  Sub batch = add("batch-study", "Batch-size study at fixed evaluation budget");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (threads > 0) set_max_threads(threads);

  try {
    if (modes.app->parsed()) return cmd_modes(modes.config, modes.output);
    if (optimize.app->parsed())
      return cmd_optimize(optimize.config, optimize.output, curve_out);
    if (evaluate.app->parsed()) return cmd_evaluate(evaluate.config, evaluate.output);
    if (landscape.app->parsed()) return cmd_landscape(landscape.config, landscape.output);
    if (sweep.app->parsed()) return cmd_sweep(sweep.config, sweep.output);
    if (sequence.app->parsed()) return cmd_sequence(sequence.config, sequence.output);
    if (batch.app->parsed()) return cmd_batch_study(batch.config, batch.output);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace fmforge::cli
