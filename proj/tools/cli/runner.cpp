#include "cli/runner.hpp"

#include "levyflat/errors.hpp"
#include "levyflat/random.hpp"

#include <Eigen/Core>
#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#ifndef LEVYFLAT_VERSION
#define LEVYFLAT_VERSION "unknown"
#endif

namespace levyflat::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// JSON has no inf / nan.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json environment_stamp() {
  json env;
  env["levyflat_version"] = LEVYFLAT_VERSION;
  env["compiler"] = __VERSION__;
  env["cplusplus"] = static_cast<long>(__cplusplus);
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  env["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  utsname u{};
  if (uname(&u) == 0) env["platform"] = std::string(u.sysname) + " " + u.machine;
  return env;
}

json subspace_basis(const Subspace& s) {
  json cols = json::array();
  for (int i = 0; i < s.dim(); ++i) {
    json col = json::array();
    const HVector v = s.basis_vector(i);
    for (int j = 0; j < v.size(); ++j) col.push_back(num(v[j]));
    cols.push_back(col);
  }
  return cols;
}

json coords_json(const ChartPoint& p) {
  json c = json::array();
  for (Eigen::Index i = 0; i < p.coords.size(); ++i) c.push_back(num(p.coords[i]));
  return {{"chart", p.chart}, {"coords", c}};
}

bool selected(const RunConfig& c, const std::string& name) {
  return std::find(c.tests.begin(), c.tests.end(), name) != c.tests.end();
}

TestReport skip_report(const std::string& name, const std::string& why) {
  TestReport r;
  r.name = name;
  r.verdict = Verdict::Skip;
  r.pass = false;
  r.label = why;
  return r;
}

TestReport merged_jump_closure(const ModelInstance& model, const RunConfig& c) {
  const auto& problem = model.problem;
  TestReport merged;
  merged.name = "jump-closure";
  merged.threshold = c.thresholds.jump_closure;
  int tested = 0;
  for (int k = 0; k < problem.driver().q(); ++k) {
    if (static_cast<std::size_t>(k) >= model.jump_grids.size() || model.jump_grids[k].empty()) continue;
    const TestReport r =
        jump_closure_test(model.manifold, problem, k, model.jump_grids[k], model.samples, c.thresholds.jump_closure);
    for (auto d : r.details) {
      d.note = "k=" + std::to_string(k + 1) + " " + d.note;
      merged.details.push_back(std::move(d));
    }
    ++tested;
  }
  if (tested == 0) return skip_report("jump-closure", "no jump coordinates with a jump-size grid");
  merged.samples = static_cast<int>(merged.details.size());
  for (const auto& d : merged.details) merged.max_residual = std::max(merged.max_residual, d.residual);
  merged.pass = merged.max_residual < merged.threshold;
  merged.verdict = merged.pass ? Verdict::Pass : Verdict::Fail;
  merged.metrics["jump_coordinates_tested"] = tested;
  merged.label = merged.pass ? "M closed under the sampled jumps" : "jumps leave M";
  return merged;
}

struct FlatnessBundle {
  GlobalFlatness global;
  Subspace common;
  std::vector<FlatnessReport> chain_reports;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  ChainCheck chain;
};

FlatnessOptions flatness_options(const RunConfig& c) {
  return FlatnessOptions{.radius = c.flatness.radius, .n_samples = c.flatness.n_samples, .tol = c.flatness.tol,
                         .seed = c.seed};
}

FlatnessBundle compute_flatness(const ModelInstance& model, const RunConfig& c) {
  const FlatnessOptions opts = flatness_options(c);
  GlobalFlatness global = flatness_global(model.manifold, model.samples, opts);
  std::vector<Subspace> commons;
  for (const auto& r : global.per_point) commons.push_back(r.common_subspace);
  FlatnessBundle b{std::move(global), intersect(commons, c.flatness.tol), {}, {}, {}};
  const std::uint64_t chain_seed = derive_seed(c.seed, 0xC4A1);
  for (std::size_t i = 0; i < model.chain.size(); ++i) {
    FlatnessOptions o = opts;
    o.seed = derive_seed(chain_seed, i);
    b.chain_reports.push_back(flatness_at(model.manifold, model.chain[i], o));
  }
  b.pairs = overlapping_pairs(b.chain_reports);
  b.chain = chain_consistency(b.chain_reports, b.pairs, c.flatness.chain_angle_tol);
  return b;
}

TestReport chain_report(const FlatnessBundle& b, const RunConfig& c) {
  if (b.pairs.empty()) return skip_report("chain-consistency", "no overlapping base points along a chain");
  TestReport r;
  r.name = "chain-consistency";
  r.threshold = c.flatness.chain_angle_tol;
  for (std::size_t i = 0; i < b.pairs.size(); ++i) {
    r.details.push_back(SampleRecord{i, b.chain.angles[i],
                                     "pair " + std::to_string(b.pairs[i].first) + "-" +
                                         std::to_string(b.pairs[i].second)});
  }
  r.samples = static_cast<int>(r.details.size());
  for (const auto& d : r.details) r.max_residual = std::max(r.max_residual, d.residual);
  r.pass = b.chain.consistent && r.max_residual < r.threshold;
  r.verdict = r.pass ? Verdict::Pass : Verdict::Fail;
  r.label = r.pass ? "common subspaces agree along the chain" : "common subspaces disagree along the chain";
  return r;
}

TestReport decompose_report(const ModelInstance& model, const Subspace& l, const RunConfig& c) {
  DecomposeOptions opts;
  opts.shift_extent = c.decompose.shift_extent.value_or(model.shift_extent);
  opts.shifts_per_direction = c.decompose.shifts_per_direction;
  opts.tangency_tol = c.thresholds.decompose;
  const Decomposition d = decompose(model.manifold, l, model.samples, opts);
  TestReport r;
  r.name = "decompose";
  r.threshold = c.thresholds.decompose;
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& s = d.samples[i];
    std::string note = "tangency_angle=" + fmt(s.tangency_angle);
    if (!s.failure.empty()) note += " " + s.failure;
    r.details.push_back(SampleRecord{i, std::max(s.max_shift_residual, s.tangency_angle), note});
  }
  r.samples = static_cast<int>(r.details.size());
  for (const auto& s : r.details) r.max_residual = std::max(r.max_residual, s.residual);
  r.pass = r.max_residual < r.threshold;
  r.verdict = r.pass ? Verdict::Pass : Verdict::Fail;
  r.metrics["l_dim"] = l.dim();
  r.metrics["shift_extent"] = opts.shift_extent;
  r.metrics["max_shift_residual"] = d.max_residual;
  r.metrics["max_tangency_angle"] = d.max_tangency_angle;
  r.label = l.dim() == 0 ? "L = {0}: trivial decomposition"
            : r.pass     ? "M = N + L within threshold"
                         : "M is not invariant under shifts in L";
  return r;
}

json model_json(const ModelInstance& m, const std::vector<int>& small) {
  json j;
  j["name"] = m.name;
  j["description"] = m.description;
  json params = json::object();
  for (const auto& [k, v] : m.parameters) params[k] = num(v);
  j["parameters"] = params;
  j["ambient_dim"] = m.manifold.ambient()->dim();
  j["manifold_dim"] = m.manifold.dim();
  j["semigroup"] = to_string(m.problem.semigroup().kind());
  j["semigroup_beta"] = num(m.problem.semigroup().beta());
  j["semigroup_defect"] = num(m.problem.semigroup().semigroup_defect());
  j["wiener_dim"] = m.problem.driver().p();
  json jumps = json::array();
  for (const auto& spec : m.problem.driver().jumps()) jumps.push_back(spec.describe());
  j["jump_measures"] = jumps;
  json k1 = json::array();
  for (int k : small) k1.push_back(k + 1);
  j["small_jump_indices"] = k1;
  j["sample_count"] = m.samples.size();
  return j;
}

}  // namespace

ModelInstance make_model(const RunConfig& c) {
  const auto param = [&](const std::string& key, double fallback) {
    const auto it = c.model_params.find(key);
    return it == c.model_params.end() ? fallback : it->second;
  };
  if (c.model == "hjmm-vasicek") {
    VasicekParams p;
    p.rho = param("rho", p.rho);
    p.c = param("c", p.c);
    p.lambda = param("lambda", p.lambda);
    p.support.lower = param("support_lower", p.support.lower);
    p.support.upper = param("support_upper", p.support.upper);
    p.xi_max = param("xi_max", p.xi_max);
    const double n = param("n", p.n);
    if (n != std::floor(n) || n < 2) throw ConfigError("key 'model_params.n': expected an integer >= 2");
    p.n = static_cast<int>(n);
    return build_hjmm_vasicek(p);
  }
  if (c.model == "sine-counterexample") {
    SineParams p;
    p.lambda = param("lambda", p.lambda);
    p.half_width = param("half_width", p.half_width);
    return build_sine_counterexample(p);
  }
  if (c.model.rfind("fixture:", 0) == 0) return build_fixture(c.model);
  throw ConfigError("model: unknown model '" + c.model + "' (see list-models)");
}

json to_json(const TestReport& r) {
  json j;
  j["name"] = r.name;
  j["verdict"] = to_string(r.verdict);
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["max_residual"] = num(r.max_residual);
  j["threshold"] = num(r.threshold);
  j["label"] = r.label;
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = num(v);
  j["metrics"] = metrics;
  json details = json::array();
  for (const auto& d : r.details) details.push_back({{"index", d.index}, {"residual", num(d.residual)}, {"note", d.note}});
  j["details"] = details;
  json trace = json::array();
  for (const auto& [x, y] : r.trace) trace.push_back({num(x), num(y)});
  j["trace"] = trace;
  return j;
}

json to_json(const FlatnessReport& r) {
  json j;
  j["base_coords"] = coords_json(r.base_coords);
  j["flatness"] = r.flatness;
  j["samples_used"] = r.samples_used;
  j["radius"] = num(r.radius);
  j["tol"] = num(r.tol);
  j["seed"] = r.seed;
  json spectrum = json::array();
  for (double s : r.spectrum) spectrum.push_back(num(s));
  j["spectrum"] = spectrum;
  j["singular_value_gap"] = num(r.singular_value_gap);
  j["common_subspace"] = subspace_basis(r.common_subspace);
  return j;
}

json execute(const RunConfig& c, std::ostream& log, std::vector<MildPath>* kept_paths) {
  validate(c);
  const ModelInstance model = make_model(c);
  const std::vector<int> small = small_jump_indices(model.problem.driver(), c.eps_min);

  json report;
  report["timestamp"] = timestamp_now();
  report["environment"] = environment_stamp();
  report["config"] = to_json(c);
  report["model"] = model_json(model, small);
  json tests = json::array();
  std::vector<TestReport> reports;

  if (selected(c, "tangency")) {
    log << "tangency...\n";
    reports.push_back(tangency_test(model.manifold, model.problem, small, model.samples, c.thresholds.tangency));
  }
  if (selected(c, "jump-closure")) {
    log << "jump-closure...\n";
    reports.push_back(merged_jump_closure(model, c));
  }
  if (selected(c, "path-invariance")) {
    log << "path-invariance...\n";
    PathInvarianceOptions opts;
    opts.n_paths = c.simulation.n_paths;
    opts.horizon = c.simulation.horizon;
    opts.dt = c.simulation.dt;
    opts.threshold = c.thresholds.path_invariance;
    opts.seed = c.seed;
    opts.ratio_cutoff = c.thresholds.ratio_cutoff;
    opts.halving = c.simulation.halving;
    if (kept_paths) kept_paths->assign(std::min(c.simulation.write_paths, c.simulation.n_paths), MildPath{});
    reports.push_back(path_invariance_test(model.manifold, model.problem, model.path_starts, opts, kept_paths));
  }

  std::optional<FlatnessBundle> flat;
  if (selected(c, "flatness") || selected(c, "decompose")) {
    log << "flatness...\n";
    flat = compute_flatness(model, c);
  }
  if (selected(c, "flatness")) {
    TestReport bound = flatness_bound_check(model.manifold, model.problem, small, model.samples, flatness_options(c));
    reports.push_back(std::move(bound));
    reports.push_back(chain_report(*flat, c));
  }
  if (selected(c, "decompose")) {
    log << "decompose...\n";
    reports.push_back(decompose_report(model, flat->common, c));
  }

  bool failed = false;
  for (const auto& r : reports) {
    failed = failed || r.verdict == Verdict::Fail;
    tests.push_back(to_json(r));
  }
  report["tests"] = tests;

  if (flat) {
    json f;
    f["flatness_global"] = flat->global.flatness;
    f["classification"] = std::string(to_string(classify(model.manifold.dim(), flat->global.flatness)));
    f["manifold_dim"] = model.manifold.dim();
    f["common_subspace_dim"] = flat->common.dim();
    f["common_subspace"] = subspace_basis(flat->common);
    double min_gap = std::numeric_limits<double>::infinity();
    json per_point = json::array();
    for (const auto& r : flat->global.per_point) {
      per_point.push_back(to_json(r));
      min_gap = std::min(min_gap, r.singular_value_gap);
    }
    f["min_singular_value_gap"] = num(min_gap);
    f["per_point"] = per_point;
    if (model.analytic_l) {
      double worst = 0.0;
      for (const auto& r : flat->global.per_point) {
        worst = std::max(worst, r.common_subspace.dim() == model.analytic_l->dim()
                                    ? max_principal_angle(r.common_subspace, *model.analytic_l)
                                    : std::numeric_limits<double>::infinity());
      }
      f["analytic_l_dim"] = model.analytic_l->dim();
      f["max_angle_to_analytic_l"] = num(worst);
      f["global_angle_to_analytic_l"] =
          num(flat->common.dim() == model.analytic_l->dim() ? max_principal_angle(flat->common, *model.analytic_l)
                                                            : std::numeric_limits<double>::infinity());
    } else {
      f["max_angle_to_analytic_l"] = nullptr;
    }
    json chain = json::array();
    for (std::size_t i = 0; i < flat->pairs.size(); ++i) {
      chain.push_back({{"first", flat->pairs[i].first},
                       {"second", flat->pairs[i].second},
                       {"angle", num(flat->chain.angles[i])}});
    }
    f["chain"] = {{"consistent", flat->chain.consistent},
                  {"angle_tol", num(c.flatness.chain_angle_tol)},
                  {"pairs", chain},
                  {"base_points", flat->chain_reports.size()}};
    report["flatness"] = f;
  } else {
    report["flatness"] = nullptr;
  }

  report["overall"] = failed ? "fail" : "pass";
  report["exit_code"] = failed ? kExitFail : kExitPass;
  return report;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
}

std::string path_csv(const MildPath& path) {
  std::ostringstream os;
  const int n = path.states.empty() ? 0 : path.states.front().value.size();
  os << "t,flag";
  for (int i = 0; i < n; ++i) os << ",v_" << i;
  os << '\n';
  for (const auto& s : path.states) {
    os << fmt(s.time) << ',' << to_string(s.flag);
    for (int i = 0; i < n; ++i) os << ',' << fmt(s.value[i]);
    os << '\n';
  }
  return os.str();
}

std::string flatness_csv(const json& flat) {
  std::ostringstream os;
  os << "point_index,d,sv_gap\n";
  std::size_t i = 0;
  for (const auto& p : flat.at("per_point")) {
    const json& gap = p.at("singular_value_gap");
    os << i++ << ',' << p.at("flatness").get<int>() << ','
       << (gap.is_number() ? fmt(gap.get<double>()) : gap.get<std::string>()) << '\n';
  }
  return os.str();
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    std::vector<MildPath> kept;
    const json report = execute(c, err, &kept);
    const fs::path dir(c.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_text(dir / "report.json", report.dump(2) + "\n");
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (kept[i].states.empty()) continue;
      std::ostringstream name;
      name << "path_" << std::setw(3) << std::setfill('0') << i << ".csv";
      write_text(dir / name.str(), path_csv(kept[i]));
    }
    if (!report.at("flatness").is_null()) write_text(dir / "flatness.csv", flatness_csv(report.at("flatness")));

    for (const auto& t : report.at("tests")) {
      out << std::left << std::setw(18) << t.at("name").get<std::string>() << ' ' << std::setw(5)
          << t.at("verdict").get<std::string>() << " max_residual=" << t.at("max_residual").dump()
          << " threshold=" << t.at("threshold").dump() << '\n';
    }
    if (!report.at("flatness").is_null()) {
      const json& f = report.at("flatness");
      out << "flatness_global=" << f.at("flatness_global").get<int>()
          << " classification=" << f.at("classification").get<std::string>() << '\n';
    }
    out << "report: " << (dir / "report.json").string() << '\n';
    return report.at("exit_code").get<int>();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

std::string strip_timestamp(const std::string& report_text) {
  json j = json::parse(report_text);
  j.erase("timestamp");
  return j.dump(2);
}

}  // namespace levyflat::cli
