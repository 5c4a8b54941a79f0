#include "fmforge/io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fmforge/errors.hpp"
#include "fmforge/version.hpp"

namespace fmforge {

FreqUnit freq_unit_from(const Json& config) {
  const std::string u = config.value("freq_unit", std::string("kHz_times_2pi"));
  if (u == "rad_per_s") return FreqUnit::kRadPerS;
  if (u == "Hz_times_2pi") return FreqUnit::kHzTimes2Pi;
  if (u == "kHz_times_2pi") return FreqUnit::kKiloHzTimes2Pi;
  throw ConfigError("freq_unit: expected rad_per_s, Hz_times_2pi or kHz_times_2pi, got '" +
                    u + "'");
}

double to_rad_per_s(double value, FreqUnit unit) {
  switch (unit) {
    case FreqUnit::kRadPerS: return value;
    case FreqUnit::kHzTimes2Pi: return kTwoPi * value;
    case FreqUnit::kKiloHzTimes2Pi: return kTwoPi * 1e3 * value;
  }
  return value;
}

double freq_field(const Json& obj, const std::string& key, FreqUnit unit) {
  if (!obj.contains(key)) throw ConfigError("missing required field '" + key + "'");
  if (!obj.at(key).is_number())
    throw ConfigError("field '" + key + "' must be a number");
  return to_rad_per_s(obj.at(key).get<double>(), unit);
}

double freq_field(const Json& obj, const std::string& key, FreqUnit unit,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  return freq_field(obj, key, unit);
}

TrapConfig trap_from_json(const Json& config) {
  const Json& t = config.contains("trap") ? config.at("trap") : config;
  if (!t.contains("n_ions")) throw ConfigError("trap: missing 'n_ions'");
  const int n = t.at("n_ions").get<int>();
  TrapConfig trap = TrapConfig::yb171(n);
  const FreqUnit unit = freq_unit_from(config);
  trap.axial_freq = freq_field(t, "axial_freq", unit, trap.axial_freq);
  trap.transverse_freq = freq_field(t, "transverse_freq", unit, trap.transverse_freq);
  if (t.contains("ion_mass_amu"))
    trap.ion_mass = t.at("ion_mass_amu").get<double>() * kAtomicMassUnit;
  if (t.contains("laser_wavevector_rad_m"))
    trap.laser_wavevector = t.at("laser_wavevector_rad_m").get<double>();
  trap.validate();
  return trap;
}

Json modes_to_json(const TrapConfig& trap, const ModeStructure& modes) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_ions"] = trap.n_ions;
  j["axial_freq_rad_s"] = trap.axial_freq;
  j["transverse_freq_rad_s"] = trap.transverse_freq;
  j["equilibrium_positions"] = equilibrium_positions(trap);
  j["mode_freqs_rad_s"] = modes.mode_freqs;
  j["mode_vectors"] = modes.mode_vectors;
  j["lamb_dicke"] = modes.lamb_dicke;
  return j;
}

ObjectiveSpec spec_from_json(const Json& config) {
  const Json& s = config.contains("objective") ? config.at("objective") : config;
  const FreqUnit unit = freq_unit_from(config);
  ObjectiveSpec spec;
  spec.method = method_from_name(s.value("method", std::string("b_robust")));
  spec.uncertainty = freq_field(s, "uncertainty", unit, spec.uncertainty);
  if (s.contains("duration_us")) spec.duration = s.at("duration_us").get<double>() * 1e-6;
  const std::string kind = s.value("pulse_kind", std::string("discrete"));
  if (kind == "discrete")
    spec.pulse_kind = PulseKind::kDiscrete;
  else if (kind == "continuous")
    spec.pulse_kind = PulseKind::kContinuous;
  else
    throw ConfigError("pulse_kind: expected 'discrete' or 'continuous', got '" + kind + "'");
  spec.n_segments = s.value("n_segments", spec.n_segments);
  spec.substeps = s.value("substeps", spec.substeps);
  spec.training_size = s.value("training_size", spec.training_size);
  spec.batch_size = s.value("batch_size", spec.batch_size);
  spec.iterations = s.value("iterations", spec.iterations);
  spec.trials = s.value("trials", spec.trials);
  spec.cv_size = s.value("cv_size", spec.cv_size);
  spec.continuous_displacement_only =
      s.value("continuous_displacement_only", spec.continuous_displacement_only);
  spec.seed = s.value("seed", spec.seed);
  spec.learning_rate = freq_field(s, "learning_rate", unit, spec.learning_rate);
  spec.warmup_iterations = s.value("warmup_iterations", spec.warmup_iterations);
  spec.lr_decay_floor = s.value("lr_decay_floor", spec.lr_decay_floor);
  spec.window_margin = freq_field(s, "window_margin", unit, spec.window_margin);
  spec.validate();
  return spec;
}

Json spec_to_json(const ObjectiveSpec& spec) {
  Json j;
  j["method"] = method_name(spec.method);
  j["uncertainty_rad_s"] = spec.uncertainty;
  j["duration_us"] = spec.duration * 1e6;
  j["pulse_kind"] = spec.pulse_kind == PulseKind::kDiscrete ? "discrete" : "continuous";
  j["n_segments"] = spec.effective_segments();
  j["substeps"] = spec.substeps;
  j["training_size"] = spec.training_size;
  j["batch_size"] = spec.batch_size;
  j["iterations"] = spec.effective_iterations();
  j["trials"] = spec.trials;
  j["cv_size"] = spec.cv_size;
  j["continuous_displacement_only"] = spec.continuous_displacement_only;
  j["seed"] = spec.seed;
  j["learning_rate_rad_s"] = spec.learning_rate;
  j["warmup_iterations"] = spec.warmup_iterations;
  j["lr_decay_floor"] = spec.lr_decay_floor;
  j["window_margin_rad_s"] = spec.window_margin;
  return j;
}

Json pulse_to_json(const Pulse& pulse, double omega, const Json& meta) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tau_s"] = pulse_duration(pulse);
  j["symmetric"] = pulse_symmetric(pulse);
  if (omega > 0.0) j["omega_rad_s"] = omega;
  if (const auto* d = std::get_if<DiscretePulse>(&pulse)) {
    j["kind"] = "discrete";
    j["segment_freqs_rad_s"] = d->segment_freqs;
  } else {
    const auto& c = std::get<ContinuousPulse>(pulse);
    j["kind"] = "continuous";
    j["segment_freqs_rad_s"] = c.step_freqs;
    j["substeps"] = c.substeps;
  }
  if (!meta.empty()) j["meta"] = meta;
  return j;
}

Pulse pulse_from_json(const Json& j) {
  if (j.value("schema_version", 1) != kSchemaVersion)
    throw ConfigError("pulse file: unsupported schema_version");
  if (!j.contains("kind") || !j.contains("tau_s") || !j.contains("segment_freqs_rad_s"))
    throw ConfigError("pulse file: needs 'kind', 'tau_s' and 'segment_freqs_rad_s'");
  const std::string kind = j.at("kind").get<std::string>();
  const auto freqs = j.at("segment_freqs_rad_s").get<std::vector<double>>();
  const double tau = j.at("tau_s").get<double>();
  const bool symmetric = j.value("symmetric", false);
  if (freqs.empty() || !(tau > 0.0))
    throw ConfigError("pulse file: empty segment list or non-positive duration");
  if (kind == "discrete") return DiscretePulse{freqs, tau, symmetric};
  if (kind == "continuous")
    return ContinuousPulse{freqs, tau, j.value("substeps", 20), symmetric};
  throw ConfigError("pulse file: unknown kind '" + kind + "'");
}

Json fidelity_report_to_json(const FidelityReport& rep) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["mean_fidelity"] = rep.mean;
  j["std_fidelity"] = rep.stddev;
  j["mean_error"] = 1.0 - rep.mean;
  j["omega_rad_s"] = rep.omega;
  j["n_samples"] = rep.per_sample.size();
  return j;
}

Json sweep_report_to_json(const SweepReport& rep) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json pairs = Json::array();
  for (const auto& p : rep.pairs) {
    Json e;
    e["n_ions"] = p.n_ions;
    e["pair"] = {p.pair.first, p.pair.second};
    e["failed"] = p.failed;
    if (p.failed) {
      e["error"] = p.error;
    } else {
      e["mean_fidelity"] = p.mean_fidelity;
      e["omega_rad_s"] = p.omega;
      e["wall_time_s"] = p.wall_time_s;
    }
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  Json aggs = Json::array();
  for (const auto& a : rep.aggregates) {
    Json e;
    e["n_ions"] = a.n_ions;
    e["n_pairs"] = a.n_pairs;
    e["mean_fidelity"] = a.mean_fidelity;
    e["std_fidelity"] = a.std_fidelity;
    e["mean_omega_rad_s"] = a.mean_omega;
    e["mean_wall_time_s"] = a.mean_wall_time_s;
    aggs.push_back(std::move(e));
  }
  j["aggregates"] = std::move(aggs);
  return j;
}

Json sequence_scan_to_json(const std::vector<SequencePoint>& scan, int n_gates) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_gates"] = n_gates;
  Json pts = Json::array();
  for (const auto& p : scan) {
    Json e;
    e["detuning_rad_s"] = p.detuning;
    e["p00"] = p.p00;
    e["p11"] = p.p11;
    e["p_odd"] = p.p_odd;
    e["parity_contrast"] = p.parity_contrast;
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j;
}

Json batch_study_to_json(const std::vector<BatchStudyEntry>& entries, int eval_budget) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["eval_budget"] = eval_budget;
  Json arr = Json::array();
  for (const auto& e : entries) {
    Json x;
    x["batch_size"] = e.batch_size;
    x["iterations"] = e.iterations;
    x["final_mean_error"] = e.final_mean_error;
    x["omega_rad_s"] = e.omega;
    arr.push_back(std::move(x));
  }
  j["entries"] = std::move(arr);
  return j;
}

std::string curve_to_jsonl(const std::vector<CurvePoint>& curve) {
  std::string out;
  for (const auto& p : curve) {
    Json j;
    j["iter"] = p.iter;
    j["cost"] = p.cost;
    j["omega_rad_s"] = p.omega;
    j["batch_seed"] = p.batch_seed;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string landscape_to_csv(const Landscape& ls) {
  std::ostringstream os;
  os.precision(17);
  os << "eps1_rad_s,eps2_rad_s,error\n";
  for (size_t i1 = 0; i1 < ls.eps1_grid.size(); ++i1)
    for (size_t i2 = 0; i2 < ls.eps2_grid.size(); ++i2)
      os << ls.eps1_grid[i1] << ',' << ls.eps2_grid[i2] << ',' << ls.error[i1][i2]
         << '\n';
  return os.str();
}

std::uint64_t config_hash(const Json& config) {
  const std::string canon = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Json RunManifest::to_json() const {
  Json j;
  j["tool_version"] = tool_version;
  j["schema_version"] = schema_version;
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_time_s"] = wall_time_s;
  j["timestamp_utc"] = timestamp_utc;
  return j;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    os << content;
    if (!os.good()) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

Json load_json(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace fmforge
