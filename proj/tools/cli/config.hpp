#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace levyflat::cli {

inline constexpr const char* kSeedEnv = "LEVYFLAT_SEED";

struct SimulationConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  int n_paths = 100;
  bool halving = true;
  /// Number of dt-run paths written as CSV.
  int write_paths = 3;
};

struct FlatnessConfig {
  double radius = 0.1;
  int n_samples = 32;
  double tol = 1e-8;
  double chain_angle_tol = 1e-6;
};

struct ThresholdConfig {
  double tangency = 1e-8;
  double jump_closure = 1e-6;
  double path_invariance = 1e-2;
  double ratio_cutoff = 1.3;
  double decompose = 1e-8;
};

struct DecomposeConfig {
  /// Defaults to the model's declared extent.
  std::optional<double> shift_extent;
  int shifts_per_direction = 4;
};

struct RunConfig {
  std::string model = "hjmm-vasicek";
  std::map<std::string, double> model_params;
  /// Subset of tangency, jump-closure, path-invariance, flatness, decompose.
  std::vector<std::string> tests{"tangency", "jump-closure", "path-invariance", "flatness", "decompose"};
  std::uint64_t seed = 0;
  /// "flag", "config", "env" or "default".
  std::string seed_source = "default";
  std::string output_dir = "levyflat-out";
  double eps_min = 1e-3;
  SimulationConfig simulation;
  FlatnessConfig flatness;
  ThresholdConfig thresholds;
  DecomposeConfig decompose;
};

const std::vector<std::string>& all_test_names();

/// Expands "all", checks names and removes duplicates (canonical order).
std::vector<std::string> normalize_tests(const std::vector<std::string>& names);
std::vector<std::string> split_list(const std::string& text);

/// Reads YAML (default) or JSON (.json extension) into JSON form.
nlohmann::json load_config_document(const std::string& path);
/// Strict: unknown keys and wrong types raise ConfigError naming the key.
void apply_document(RunConfig& config, const nlohmann::json& doc);
/// Seed from LEVYFLAT_SEED when set and nothing else chose one.
void apply_seed_env(RunConfig& config);
/// Positivity and membership checks on every knob.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

/// Allowed model_params keys for a model selector.
std::vector<std::string> model_param_keys(const std::string& model);

}  // namespace levyflat::cli
