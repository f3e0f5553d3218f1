#pragma once

#include <string>
#include <vector>

#include "packetsim/common.hpp"

namespace packetsim {

enum class Scenario {
  IdentityChecks,
  LindbladVsCtrw,
  LindbladVsTrajectories,
  KernelNormalization,
  LiouvilleCorrespondence,
  CoarseGrainConsistency,
  LocalizationMsd,
  ExpSLimit,
};

Scenario scenario_from_name(const std::string& name);  // ConfigError on unknown
const char* scenario_name(Scenario s);

struct ScenarioConfig {
  Scenario scenario = Scenario::IdentityChecks;
  std::string raw_json;  // full config text (defaults applied at read time)
  std::string out_dir;
};

ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::string& path);

// Builds every object the scenario will need (grid, packets, potentials,
// step sizes) without running anything; bad physics or numerics surface
// here as ConfigError.
void validate_scenario_config(const ScenarioConfig& cfg);

struct ScenarioCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // most checks: value <= tolerance; direction set per check
};

struct ScenarioResult {
  std::vector<ScenarioCheck> checks;
  std::vector<std::string> files;  // artifacts written, relative to out_dir
  double wall_seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Runs the scenario, writing result CSVs, summary.json (machine readable
// pass/fail) and manifest.json (config echo, version, seeds, wall time,
// file checksums) into out_dir.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Re-reads a completed run directory: verifies checksums against the
// manifest and formats the check table. Throws ConfigError when the
// manifest is missing.
std::string emit_report(const std::string& run_dir);

}  // namespace packetsim
