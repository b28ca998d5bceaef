#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeuav/sim/monte_carlo.hpp"
#include "tubeuav/sim/simloop.hpp"

namespace tubeuav::mission {

/// Config validation failure carrying every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct MissionConfig {
  sim::MissionSpec spec;
  std::string aero_table;  // path; empty selects the bundled placeholder table
  int runs = 1;
  sim::PlantSampling plant_sampling = sim::PlantSampling::kVertex;
};

std::string plant_sampling_name(sim::PlantSampling p);
sim::PlantSampling plant_sampling_from(const std::string& s);

/// Origin class of a default value.
struct ProvenanceEntry {
  std::string key;
  nlohmann::json value;
  std::string source;
};

/// Pinned table of every default and where it comes from.
const std::vector<ProvenanceEntry>& provenance_table();

/// The full default document; every accepted key appears in it.
nlohmann::json default_document();

/**
 * Layered config: defaults, then the file (if any), then KEY=VALUE overrides
 * with dotted keys (`weights.lat.q_diag.3=2e4`). VALUE is parsed as JSON and
 * taken as a string when that fails.
 */
struct LoadedConfig {
  nlohmann::json document;
  std::vector<std::string> explicit_keys;  // leaf keys set by file or override
  std::string base_dir;                    // for relative paths in the file
};

LoadedConfig load_document(const std::string& path, const std::vector<std::string>& overrides);
void apply_override(nlohmann::json& doc, const std::string& assignment,
                    std::vector<std::string>* touched = nullptr);

/// Schema and value checks; returns every violation (empty when valid).
std::vector<std::string> check_document(const nlohmann::json& doc);

/// Throws ConfigError listing all violations.
MissionConfig build_config(const LoadedConfig& loaded);

/// Leaf keys of a document in dotted form.
std::vector<std::string> leaf_keys(const nlohmann::json& doc);

}  // namespace tubeuav::mission
