#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "fmforge/evaluation.hpp"

namespace fmforge {

using Json = nlohmann::json;

// Frequencies in config files default to kHz * 2pi (paper notation E/2pi).
// Everything internal is rad/s.
enum class FreqUnit { kRadPerS, kHzTimes2Pi, kKiloHzTimes2Pi };

FreqUnit freq_unit_from(const Json& config);  // reads optional "freq_unit"
double to_rad_per_s(double value, FreqUnit unit);
double freq_field(const Json& obj, const std::string& key, FreqUnit unit);
double freq_field(const Json& obj, const std::string& key, FreqUnit unit,
                  double fallback);

TrapConfig trap_from_json(const Json& config);
Json modes_to_json(const TrapConfig& trap, const ModeStructure& modes);

ObjectiveSpec spec_from_json(const Json& config);
Json spec_to_json(const ObjectiveSpec& spec);

Json pulse_to_json(const Pulse& pulse, double omega, const Json& meta = Json::object());
Pulse pulse_from_json(const Json& j);

Json fidelity_report_to_json(const FidelityReport& rep);
Json sweep_report_to_json(const SweepReport& rep);
Json sequence_scan_to_json(const std::vector<SequencePoint>& scan, int n_gates);
Json batch_study_to_json(const std::vector<BatchStudyEntry>& entries, int eval_budget);

std::string curve_to_jsonl(const std::vector<CurvePoint>& curve);
std::string landscape_to_csv(const Landscape& ls);

// Stable content hash (FNV-1a over a canonical dump).
std::uint64_t config_hash(const Json& config);

struct RunManifest {
  std::string tool_version;
  int schema_version = 0;
  std::string subcommand;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;
  std::string timestamp_utc;

  Json to_json() const;
};

// Writes via temp file + rename in the destination directory.
void atomic_write(const std::string& path, const std::string& content);

Json load_json(const std::string& path);  // ConfigError with file/position detail

}  // namespace fmforge
