#include "cli/config.hpp"

#include "levyflat/errors.hpp"
#include "levyflat/models.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace levyflat::cli {

using nlohmann::json;

const std::vector<std::string>& all_test_names() {
  static const std::vector<std::string> names{"tangency", "jump-closure", "path-invariance", "flatness", "decompose"};
  return names;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::string> normalize_tests(const std::vector<std::string>& names) {
  std::set<std::string> chosen;
  for (const auto& n : names) {
    if (n == "all") {
      chosen.insert(all_test_names().begin(), all_test_names().end());
      continue;
    }
    if (std::find(all_test_names().begin(), all_test_names().end(), n) == all_test_names().end()) {
      throw ConfigError("tests: unknown test '" + n + "'");
    }
    chosen.insert(n);
  }
  std::vector<std::string> out;
  for (const auto& n : all_test_names()) {
    if (chosen.count(n)) out.push_back(n);
  }
  return out;
}

namespace {

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  const std::string text = node.Scalar();
  // Quoted scalars stay strings.
  if (node.Tag() == "!") return text;
  bool b = false;
  if (YAML::convert<bool>::decode(node, b)) return b;
  std::size_t used = 0;
  try {
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  return text;
}

void check_keys(const json& obj, const std::string& where, const std::vector<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a table");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

std::string path_of(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double get_number(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("key '" + path_of(where, key) + "': expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("key '" + path_of(where, key) + "': expected an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("key '" + path_of(where, key) + "': expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("key '" + path_of(where, key) + "': expected a string");
  return v.get<std::string>();
}

std::uint64_t parse_seed(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ConfigError("key '" + where + "': expected a non-negative integer");
}

template <class F>
void if_has(const json& obj, const std::string& key, F&& f) {
  if (obj.contains(key)) f();
}

}  // namespace

nlohmann::json load_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  try {
    if (is_json) return json::parse(in);
    const YAML::Node root = YAML::Load(in);
    json doc = yaml_to_json(root);
    if (doc.is_null()) doc = json::object();
    return doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  } catch (const YAML::Exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

std::vector<std::string> model_param_keys(const std::string& model) {
  if (model == "hjmm-vasicek") {
    return {"rho", "c", "lambda", "support_lower", "support_upper", "xi_max", "n"};
  }
  if (model == "sine-counterexample") return {"lambda", "half_width"};
  return {};
}

void apply_document(RunConfig& c, const nlohmann::json& doc) {
  check_keys(doc, "", {"model", "model_params", "tests", "seed", "output_dir", "eps_min", "simulation", "flatness",
                       "thresholds", "decompose"});
  if_has(doc, "model", [&] { c.model = get_string(doc, "", "model"); });
  if_has(doc, "model_params", [&] {
    const json& mp = doc.at("model_params");
    check_keys(mp, "model_params", model_param_keys(c.model));
    c.model_params.clear();
    for (const auto& [key, value] : mp.items()) c.model_params[key] = get_number(mp, "model_params", key);
  });
  if_has(doc, "tests", [&] {
    const json& t = doc.at("tests");
    std::vector<std::string> names;
    if (t.is_string()) {
      names = split_list(t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& item : t) {
        if (!item.is_string()) throw ConfigError("key 'tests': expected a list of names");
        names.push_back(item.get<std::string>());
      }
    } else {
      throw ConfigError("key 'tests': expected a list of names");
    }
    c.tests = normalize_tests(names);
  });
  if_has(doc, "seed", [&] {
    c.seed = parse_seed(doc.at("seed"), "seed");
    c.seed_source = "config";
  });
  if_has(doc, "output_dir", [&] { c.output_dir = get_string(doc, "", "output_dir"); });
  if_has(doc, "eps_min", [&] { c.eps_min = get_number(doc, "", "eps_min"); });

  if_has(doc, "simulation", [&] {
    const json& s = doc.at("simulation");
    const std::string w = "simulation";
    check_keys(s, w, {"dt", "horizon", "n_paths", "halving", "write_paths"});
    if_has(s, "dt", [&] { c.simulation.dt = get_number(s, w, "dt"); });
    if_has(s, "horizon", [&] { c.simulation.horizon = get_number(s, w, "horizon"); });
    if_has(s, "n_paths", [&] { c.simulation.n_paths = get_int(s, w, "n_paths"); });
    if_has(s, "halving", [&] { c.simulation.halving = get_bool(s, w, "halving"); });
    if_has(s, "write_paths", [&] { c.simulation.write_paths = get_int(s, w, "write_paths"); });
  });
  if_has(doc, "flatness", [&] {
    const json& f = doc.at("flatness");
    const std::string w = "flatness";
    check_keys(f, w, {"radius", "n_samples", "tol", "chain_angle_tol"});
    if_has(f, "radius", [&] { c.flatness.radius = get_number(f, w, "radius"); });
    if_has(f, "n_samples", [&] { c.flatness.n_samples = get_int(f, w, "n_samples"); });
    if_has(f, "tol", [&] { c.flatness.tol = get_number(f, w, "tol"); });
    if_has(f, "chain_angle_tol", [&] { c.flatness.chain_angle_tol = get_number(f, w, "chain_angle_tol"); });
  });
  if_has(doc, "thresholds", [&] {
    const json& t = doc.at("thresholds");
    const std::string w = "thresholds";
    check_keys(t, w, {"tangency", "jump_closure", "path_invariance", "ratio_cutoff", "decompose"});
    if_has(t, "tangency", [&] { c.thresholds.tangency = get_number(t, w, "tangency"); });
    if_has(t, "jump_closure", [&] { c.thresholds.jump_closure = get_number(t, w, "jump_closure"); });
    if_has(t, "path_invariance", [&] { c.thresholds.path_invariance = get_number(t, w, "path_invariance"); });
    if_has(t, "ratio_cutoff", [&] { c.thresholds.ratio_cutoff = get_number(t, w, "ratio_cutoff"); });
    if_has(t, "decompose", [&] { c.thresholds.decompose = get_number(t, w, "decompose"); });
  });
  if_has(doc, "decompose", [&] {
    const json& d = doc.at("decompose");
    const std::string w = "decompose";
    check_keys(d, w, {"shift_extent", "shifts_per_direction"});
    if_has(d, "shift_extent", [&] { c.decompose.shift_extent = get_number(d, w, "shift_extent"); });
    if_has(d, "shifts_per_direction",
           [&] { c.decompose.shifts_per_direction = get_int(d, w, "shifts_per_direction"); });
  });
}

void apply_seed_env(RunConfig& c) {
  if (c.seed_source != "default") return;
  const char* env = std::getenv(kSeedEnv);
  if (!env || !*env) return;
  try {
    std::size_t used = 0;
    const std::string text(env);
    if (text.find('-') != std::string::npos) throw std::invalid_argument("negative");
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    c.seed = v;
    c.seed_source = "env";
  } catch (const std::exception&) {
    throw ConfigError(std::string(kSeedEnv) + ": expected a non-negative integer, got '" + env + "'");
  }
}

namespace {

void positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("key '" + key + "': must be positive");
}

}  // namespace

void validate(const RunConfig& c) {
  const auto names = model_names();
  if (std::find(names.begin(), names.end(), c.model) == names.end()) {
    throw ConfigError("model: unknown model '" + c.model + "' (see list-models)");
  }
  const auto keys = model_param_keys(c.model);
  for (const auto& [key, value] : c.model_params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown key 'model_params." + key + "' for model " + c.model);
    }
  }
  for (const auto& t : c.tests) {
    if (std::find(all_test_names().begin(), all_test_names().end(), t) == all_test_names().end()) {
      throw ConfigError("tests: unknown test '" + t + "'");
    }
  }
  positive(c.eps_min, "eps_min");
  positive(c.simulation.dt, "simulation.dt");
  positive(c.simulation.horizon, "simulation.horizon");
  if (c.simulation.n_paths < 1) throw ConfigError("key 'simulation.n_paths': must be positive");
  if (c.simulation.write_paths < 0) throw ConfigError("key 'simulation.write_paths': must be >= 0");
  positive(c.flatness.radius, "flatness.radius");
  if (c.flatness.n_samples < 1) throw ConfigError("key 'flatness.n_samples': must be positive");
  positive(c.flatness.tol, "flatness.tol");
  positive(c.flatness.chain_angle_tol, "flatness.chain_angle_tol");
  positive(c.thresholds.tangency, "thresholds.tangency");
  positive(c.thresholds.jump_closure, "thresholds.jump_closure");
  positive(c.thresholds.path_invariance, "thresholds.path_invariance");
  positive(c.thresholds.ratio_cutoff, "thresholds.ratio_cutoff");
  positive(c.thresholds.decompose, "thresholds.decompose");
  if (c.decompose.shift_extent) positive(*c.decompose.shift_extent, "decompose.shift_extent");
  if (c.decompose.shifts_per_direction < 1) throw ConfigError("key 'decompose.shifts_per_direction': must be positive");
  if (c.output_dir.empty()) throw ConfigError("key 'output_dir': must not be empty");
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["model_params"] = c.model_params;
  j["tests"] = c.tests;
  j["seed"] = c.seed;
  j["seed_source"] = c.seed_source;
  j["seed_env"] = kSeedEnv;
  j["output_dir"] = c.output_dir;
  j["eps_min"] = c.eps_min;
  j["simulation"] = {{"dt", c.simulation.dt},
                     {"horizon", c.simulation.horizon},
                     {"n_paths", c.simulation.n_paths},
                     {"halving", c.simulation.halving},
                     {"write_paths", c.simulation.write_paths}};
  j["flatness"] = {{"radius", c.flatness.radius},
                   {"n_samples", c.flatness.n_samples},
                   {"tol", c.flatness.tol},
                   {"chain_angle_tol", c.flatness.chain_angle_tol}};
  j["thresholds"] = {{"tangency", c.thresholds.tangency},
                     {"jump_closure", c.thresholds.jump_closure},
                     {"path_invariance", c.thresholds.path_invariance},
                     {"ratio_cutoff", c.thresholds.ratio_cutoff},
                     {"decompose", c.thresholds.decompose}};
  j["decompose"] = {{"shift_extent", c.decompose.shift_extent ? json(*c.decompose.shift_extent) : json(nullptr)},
                    {"shifts_per_direction", c.decompose.shifts_per_direction}};
  return j;
}

}  // namespace levyflat::cli
