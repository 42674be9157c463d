#include "ladpm/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ladpm/errors.hpp"
#include "ladpm/io.hpp"

namespace ladpm {

using nlohmann::json;

std::string_view to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::PointMass: return "point_mass";
    case OracleKind::Gaussian: return "gaussian";
    case OracleKind::Gmm: return "gmm";
  }
  return "unknown";
}

std::unique_ptr<EpsilonOracle> OracleSpec::build(const Schedule& sched,
                                                 std::uint64_t noise_seed) const {
  std::unique_ptr<EpsilonOracle> inner;
  switch (kind) {
    case OracleKind::PointMass: inner = point_mass_oracle(sched, target.means.front()); break;
    case OracleKind::Gaussian:
      inner = gaussian_oracle(sched, target.means.front(), std::sqrt(target.variances.front()));
      break;
    case OracleKind::Gmm: inner = gmm_oracle(sched, target); break;
  }
  if (noise_scale > 0.0) return noisy_wrapper(std::move(inner), noise_scale, noise_seed);
  return inner;
}

bool OracleSpec::is_standard_normal() const {
  return kind != OracleKind::PointMass && noise_scale == 0.0 && target.weights.size() == 1 &&
         target.means.front().isZero(0.0) && target.variances.front() == 1.0;
}

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace

TheorySpec TheorySpec::defaults() {
  TheorySpec s;
  s.gamma = linspace(0.05, 0.95, 10);
  s.ratio = linspace(0.1, 0.99, 10);
  s.phi = linspace(0.0, 0.6, 10);
  s.phi_gap = linspace(0.05, 0.5, 10);
  s.monte_carlo_points = {EstimateStep::from_ratio(0.9, 0.5, 0.1, 0.3, 1.0)};
  return s;
}

std::vector<EstimateStep> TheorySpec::grid_points() const {
  std::vector<EstimateStep> out;
  out.reserve(gamma.size() * ratio.size() * phi.size() * phi_gap.size());
  for (double g : gamma) {
    for (double r : ratio) {
      for (double p : phi) {
        for (double gap : phi_gap) out.push_back(EstimateStep::from_ratio(g, r, p, p + gap, x_norm_sq));
      }
    }
  }
  return out;
}

namespace {

// Maps JSON pointers of object keys and array elements to the line they start on.
// The input must already be valid JSON.
std::map<std::string, int> pointer_lines(std::string_view text) {
  struct Frame {
    bool object;
    std::string path;
    std::size_t index = 0;
    bool expect_key = true;
    std::string key;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;

  auto child_path = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.path + "/" + (f.object ? f.key : std::to_string(f.index));
  };
  auto value_start = [&]() {
    if (!stack.empty() && !stack.back().object) lines.emplace(child_path(), line);
  };

  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    switch (c) {
      case '\n': ++line; break;
      case '{':
      case '[': {
        value_start();
        std::string path = child_path();
        stack.push_back(Frame{c == '{', std::move(path), 0, true, {}});
        break;
      }
      case '}':
      case ']': stack.pop_back(); break;
      case ',':
        if (stack.back().object) {
          stack.back().expect_key = true;
        } else {
          ++stack.back().index;
        }
        break;
      case ':': stack.back().expect_key = false; break;
      case '"': {
        std::string raw;
        for (++k; k < text.size() && text[k] != '"'; ++k) {
          if (text[k] == '\\') ++k;
          raw += text[k];
        }
        if (!stack.empty() && stack.back().object && stack.back().expect_key) {
          stack.back().key = raw;
          lines.emplace(child_path(), line);
        } else {
          value_start();
        }
        break;
      }
      case ' ':
      case '\t':
      case '\r': break;
      default:
        value_start();
        while (k + 1 < text.size() && std::string_view(",]}\n \t\r").find(text[k + 1]) == std::string_view::npos) ++k;
        break;
    }
  }
  return lines;
}

class Reader {
 public:
  Reader(std::string source, std::map<std::string, int> lines)
      : source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    std::string p = path;
    auto it = lines_.find(p);
    while (it == lines_.end() && !p.empty()) {
      p.resize(p.rfind('/'));
      it = lines_.find(p);
    }
    const int line = it == lines_.end() ? 1 : it->second;
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
  }

  void expect_object(const json& j, const std::string& path) const {
    if (!j.is_object()) fail(path, "'" + name(path) + "' must be an object");
  }

  void check_keys(const json& j, const std::string& path,
                  std::initializer_list<std::string_view> allowed) const {
    expect_object(j, path);
    for (const auto& item : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        fail(path + "/" + item.key(), "unknown key '" + item.key() + "' in " +
                                          (path.empty() ? std::string("config") : "'" + name(path) + "'") +
                                          " (expected one of: " + list + ")");
      }
    }
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "'" + name(path) + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "'" + name(path) + "' must be finite");
    return v;
  }

  std::int64_t integer(const json& j, const std::string& path) const {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
    }
    fail(path, "'" + name(path) + "' must be an integer");
  }

  int small_int(const json& j, const std::string& path) const {
    const auto v = integer(j, path);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail(path, "'" + name(path) + "' is out of range");
    }
    return static_cast<int>(v);
  }

  std::uint64_t unsigned64(const json& j, const std::string& path) const {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    fail(path, "'" + name(path) + "' must be a non-negative integer");
  }

  bool boolean(const json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "'" + name(path) + "' must be true or false");
    return j.get<bool>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "'" + name(path) + "' must be a string");
    return j.get<std::string>();
  }

  std::vector<double> numbers(const json& j, const std::string& path) const {
    if (!j.is_array()) fail(path, "'" + name(path) + "' must be an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "/" + std::to_string(k)));
    return out;
  }

  /// A list, or {"lo": a, "hi": b, "count": n} for n evenly spaced values.
  std::vector<double> number_list(const json& j, const std::string& path) const {
    if (j.is_array()) return numbers(j, path);
    check_keys(j, path, {"lo", "hi", "count"});
    for (const char* k : {"lo", "hi", "count"}) {
      if (!j.contains(k)) fail(path, "'" + name(path) + "' needs '" + k + "'");
    }
    const int count = small_int(j["count"], path + "/count");
    if (count < 1) fail(path + "/count", "'count' must be positive");
    return linspace(number(j["lo"], path + "/lo"), number(j["hi"], path + "/hi"), count);
  }

  Vec vector(const json& j, const std::string& path) const {
    const auto v = j.is_number() ? std::vector<double>{number(j, path)} : numbers(j, path);
    if (v.empty()) fail(path, "'" + name(path) + "' must not be empty");
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  template <typename Fn>
  void guard(const std::string& path, Fn&& fn) const {
    try {
      fn();
    } catch (const ConfigError& e) {
      fail(path, e.what());
    } catch (const DomainError& e) {
      fail(path, e.what());
    }
  }

 private:
  static std::string name(const std::string& path) {
    const auto pos = path.rfind('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
  }

  std::string source_;
  std::map<std::string, int> lines_;
};

void parse_schedule(const Reader& r, const json& j, ScheduleParams& out) {
  const std::string path = "/schedule";
  r.check_keys(j, path, {"kind", "beta_min", "beta_max", "train_steps", "t_min"});
  if (j.contains("kind")) {
    r.guard(path + "/kind", [&] {
      const auto kind = schedule_kind_from_string(r.string(j["kind"], path + "/kind"));
      out = kind == ScheduleKind::DiscreteVP ? ScheduleParams::discrete_default()
                                             : ScheduleParams::continuous_default();
    });
  }
  if (j.contains("beta_min")) out.beta_min = r.number(j["beta_min"], path + "/beta_min");
  if (j.contains("beta_max")) out.beta_max = r.number(j["beta_max"], path + "/beta_max");
  if (j.contains("train_steps")) out.train_steps = r.small_int(j["train_steps"], path + "/train_steps");
  if (j.contains("t_min")) out.t_min = r.number(j["t_min"], path + "/t_min");
  r.guard(path, [&] { Schedule check(out); });
}

void parse_oracle(const Reader& r, const json& j, OracleSpec& out) {
  const std::string path = "/oracle";
  r.check_keys(j, path, {"kind", "x0", "mean", "std", "weights", "means", "stds", "variances", "noise_scale"});
  if (!j.contains("kind")) r.fail(path, "'oracle' needs 'kind'");
  const std::string kind = r.string(j["kind"], path + "/kind");
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (j.contains(k)) r.fail(path + "/" + k, "'" + std::string(k) + "' does not apply to oracle kind '" + kind + "'");
    }
  };
  auto require = [&](const char* k) {
    if (!j.contains(k)) r.fail(path, "oracle kind '" + kind + "' needs '" + k + "'");
    return j[k];
  };

  if (kind == "point_mass") {
    forbid({"mean", "std", "weights", "means", "stds", "variances"});
    out.kind = OracleKind::PointMass;
    out.target = {{1.0}, {r.vector(require("x0"), path + "/x0")}, {0.0}};
  } else if (kind == "gaussian") {
    forbid({"x0", "weights", "means", "stds", "variances"});
    out.kind = OracleKind::Gaussian;
    const double s = r.number(require("std"), path + "/std");
    if (!(s > 0.0)) r.fail(path + "/std", "'std' must be positive");
    out.target = {{1.0}, {r.vector(require("mean"), path + "/mean")}, {s * s}};
  } else if (kind == "gmm") {
    forbid({"x0", "mean", "std"});
    out.kind = OracleKind::Gmm;
    GmmTarget t;
    t.weights = r.numbers(require("weights"), path + "/weights");
    const json& means = require("means");
    if (!means.is_array()) r.fail(path + "/means", "'means' must be an array");
    for (std::size_t k = 0; k < means.size(); ++k) {
      t.means.push_back(r.vector(means[k], path + "/means/" + std::to_string(k)));
    }
    if (j.contains("stds") == j.contains("variances")) {
      r.fail(path, "oracle kind 'gmm' needs exactly one of 'stds' and 'variances'");
    }
    if (j.contains("stds")) {
      for (double s : r.numbers(j["stds"], path + "/stds")) {
        if (!(s >= 0.0)) r.fail(path + "/stds", "'stds' must be non-negative");
        t.variances.push_back(s * s);
      }
    } else {
      t.variances = r.numbers(j["variances"], path + "/variances");
    }
    r.guard(path, [&] { t.validate(); });
    out.target = std::move(t);
  } else {
    r.fail(path + "/kind", "unknown oracle kind '" + kind + "' (expected point_mass, gaussian or gmm)");
  }
  if (j.contains("noise_scale")) {
    out.noise_scale = r.number(j["noise_scale"], path + "/noise_scale");
    if (!(out.noise_scale >= 0.0)) r.fail(path + "/noise_scale", "'noise_scale' must be non-negative");
  }
}

void parse_sampler(const Reader& r, const json& j, SamplerConfig& out) {
  const std::string path = "/sampler";
  r.check_keys(j, path, {"method", "steps", "deis_order", "lambda", "spacing", "num_samples", "trajectory_chains"});
  if (j.contains("method")) {
    r.guard(path + "/method", [&] { out.method = method_from_string(r.string(j["method"], path + "/method")); });
  }
  if (j.contains("steps")) out.steps = r.small_int(j["steps"], path + "/steps");
  if (j.contains("deis_order")) out.deis_order = r.small_int(j["deis_order"], path + "/deis_order");
  if (j.contains("lambda")) {
    const json& la = j["lambda"];
    out.lambda = la.is_array() ? LambdaSchedule::per_step(r.numbers(la, path + "/lambda"))
                               : LambdaSchedule::constant(r.number(la, path + "/lambda"));
  }
  if (j.contains("spacing")) {
    r.guard(path + "/spacing", [&] { out.spacing = spacing_from_string(r.string(j["spacing"], path + "/spacing")); });
  }
  if (j.contains("num_samples")) out.num_samples = r.small_int(j["num_samples"], path + "/num_samples");
  if (j.contains("trajectory_chains")) {
    out.trajectory_chains = r.small_int(j["trajectory_chains"], path + "/trajectory_chains");
  }
  r.guard(path, [&] { out.validate(); });
}

void parse_metrics(const Reader& r, const json& j, MetricsSpec& out) {
  const std::string path = "/metrics";
  r.check_keys(j, path, {"distance", "moments", "reference_samples", "projections"});
  if (j.contains("distance")) out.distance = r.boolean(j["distance"], path + "/distance");
  if (j.contains("moments")) out.moments = r.boolean(j["moments"], path + "/moments");
  if (j.contains("reference_samples")) {
    out.reference_samples = r.small_int(j["reference_samples"], path + "/reference_samples");
    if (out.reference_samples < 0) r.fail(path + "/reference_samples", "'reference_samples' must be non-negative");
  }
  if (j.contains("projections")) {
    out.projections = r.small_int(j["projections"], path + "/projections");
    if (out.projections < 1) r.fail(path + "/projections", "'projections' must be positive");
  }
}

void parse_sweep(const Reader& r, const json& j, SweepSpec& out) {
  const std::string path = "/sweep";
  r.check_keys(j, path, {"lambdas", "trace_chains"});
  if (j.contains("lambdas")) out.lambdas = r.number_list(j["lambdas"], path + "/lambdas");
  if (out.lambdas.empty()) r.fail(path + "/lambdas", "'lambdas' must not be empty");
  for (double v : out.lambdas) {
    if (!(v >= 0.0)) r.fail(path + "/lambdas", "'lambdas' must be non-negative");
  }
  if (j.contains("trace_chains")) {
    out.trace_chains = r.small_int(j["trace_chains"], path + "/trace_chains");
    if (out.trace_chains < 0) r.fail(path + "/trace_chains", "'trace_chains' must be non-negative");
  }
}

void parse_convergence(const Reader& r, const json& j, ConvergenceSpec& out) {
  const std::string path = "/convergence";
  r.check_keys(j, path, {"steps"});
  if (!j.contains("steps")) return;
  const json& s = j["steps"];
  if (!s.is_array() || s.size() < 2) r.fail(path + "/steps", "'steps' must list at least two step counts");
  out.steps.clear();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const int n = r.small_int(s[k], path + "/steps/" + std::to_string(k));
    if (n < 1) r.fail(path + "/steps/" + std::to_string(k), "step counts must be positive");
    out.steps.push_back(n);
  }
}

void parse_theory(const Reader& r, const json& j, TheorySpec& out) {
  const std::string path = "/theory";
  r.check_keys(j, path, {"gamma", "ratio", "phi", "phi_gap", "x_norm_sq", "monte_carlo_points", "trials", "lambda_grid"});
  if (j.contains("gamma")) out.gamma = r.number_list(j["gamma"], path + "/gamma");
  if (j.contains("ratio")) out.ratio = r.number_list(j["ratio"], path + "/ratio");
  if (j.contains("phi")) out.phi = r.number_list(j["phi"], path + "/phi");
  if (j.contains("phi_gap")) out.phi_gap = r.number_list(j["phi_gap"], path + "/phi_gap");
  if (j.contains("x_norm_sq")) out.x_norm_sq = r.number(j["x_norm_sq"], path + "/x_norm_sq");
  if (j.contains("trials")) {
    out.trials = r.unsigned64(j["trials"], path + "/trials");
    if (out.trials < 1) r.fail(path + "/trials", "'trials' must be positive");
  }
  if (j.contains("lambda_grid")) {
    const std::string gp = path + "/lambda_grid";
    const json& g = j["lambda_grid"];
    r.check_keys(g, gp, {"lo", "hi", "step"});
    if (g.contains("lo")) out.lambda_lo = r.number(g["lo"], gp + "/lo");
    if (g.contains("hi")) out.lambda_hi = r.number(g["hi"], gp + "/hi");
    if (g.contains("step")) out.lambda_step = r.number(g["step"], gp + "/step");
    r.guard(gp, [&] { lambda_grid(out.lambda_lo, out.lambda_hi, out.lambda_step); });
  }
  if (j.contains("monte_carlo_points")) {
    const json& pts = j["monte_carlo_points"];
    if (!pts.is_array()) r.fail(path + "/monte_carlo_points", "'monte_carlo_points' must be an array");
    out.monte_carlo_points.clear();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::string pp = path + "/monte_carlo_points/" + std::to_string(k);
      r.check_keys(pts[k], pp, {"gamma_i", "ratio", "phi_i", "phi_next", "x_norm_sq"});
      for (const char* key : {"gamma_i", "ratio", "phi_i", "phi_next"}) {
        if (!pts[k].contains(key)) r.fail(pp, "Monte-Carlo point needs '" + std::string(key) + "'");
      }
      const double x = pts[k].contains("x_norm_sq") ? r.number(pts[k]["x_norm_sq"], pp + "/x_norm_sq") : out.x_norm_sq;
      out.monte_carlo_points.push_back(EstimateStep::from_ratio(
          r.number(pts[k]["gamma_i"], pp + "/gamma_i"), r.number(pts[k]["ratio"], pp + "/ratio"),
          r.number(pts[k]["phi_i"], pp + "/phi_i"), r.number(pts[k]["phi_next"], pp + "/phi_next"), x));
      r.guard(pp, [&] { out.monte_carlo_points.back().validate(); });
    }
  }
  for (const char* key : {"gamma", "ratio", "phi", "phi_gap"}) {
    const auto& v = std::string(key) == "gamma" ? out.gamma
                    : std::string(key) == "ratio" ? out.ratio
                    : std::string(key) == "phi"   ? out.phi
                                                  : out.phi_gap;
    if (v.empty()) r.fail(path + "/" + key, "'" + std::string(key) + "' must not be empty");
  }
  // Report the first grid point that leaves the model's domain.
  for (const auto& p : out.grid_points()) {
    r.guard(path, [&] {
      try {
        p.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " at gamma_i=" + format_double(p.gamma_i) +
                          ", ratio=" + format_double(p.gamma_ratio()) + ", phi_i=" +
                          format_double(p.phi_i) + ", phi_next=" + format_double(p.phi_next));
      }
    });
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  const std::string src(source);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigError(src + ":" + std::to_string(line) + ": malformed JSON");
  }
  const Reader r(src, pointer_lines(text));
  r.check_keys(j, "", {"schedule", "oracle", "sampler", "metrics", "sweep", "convergence", "theory", "output_dir", "seed"});

  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.seed = r.unsigned64(j["seed"], "/seed");
  if (j.contains("output_dir")) cfg.output_dir = r.string(j["output_dir"], "/output_dir");
  if (j.contains("schedule")) parse_schedule(r, j["schedule"], cfg.schedule);
  if (j.contains("oracle")) parse_oracle(r, j["oracle"], cfg.oracle);
  if (j.contains("sampler")) parse_sampler(r, j["sampler"], cfg.sampler);
  if (j.contains("metrics")) parse_metrics(r, j["metrics"], cfg.metrics);
  if (j.contains("sweep")) parse_sweep(r, j["sweep"], cfg.sweep);
  if (j.contains("convergence")) parse_convergence(r, j["convergence"], cfg.convergence);
  if (j.contains("theory")) parse_theory(r, j["theory"], cfg.theory);
  cfg.sampler.seed = cfg.seed;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.string());
}

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["schedule"] = {{"kind", to_string(schedule.kind)},
                   {"beta_min", schedule.beta_min},
                   {"beta_max", schedule.beta_max},
                   {"train_steps", schedule.train_steps},
                   {"t_min", schedule.t_min}};

  json o = {{"kind", to_string(oracle.kind)}, {"noise_scale", oracle.noise_scale}};
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  switch (oracle.kind) {
    case OracleKind::PointMass: o["x0"] = vec(oracle.target.means.front()); break;
    case OracleKind::Gaussian:
      o["mean"] = vec(oracle.target.means.front());
      o["std"] = std::sqrt(oracle.target.variances.front());
      break;
    case OracleKind::Gmm: {
      o["weights"] = oracle.target.weights;
      json means = json::array();
      for (const auto& m : oracle.target.means) means.push_back(vec(m));
      o["means"] = means;
      o["variances"] = oracle.target.variances;
      break;
    }
  }
  j["oracle"] = o;

  json s = {{"method", to_string(sampler.method)},
            {"steps", sampler.steps},
            {"deis_order", sampler.deis_order},
            {"spacing", to_string(sampler.spacing)},
            {"num_samples", sampler.num_samples},
            {"trajectory_chains", sampler.trajectory_chains}};
  if (sampler.lambda.is_per_step()) {
    s["lambda"] = sampler.lambda.values();
  } else {
    s["lambda"] = sampler.lambda.constant_value();
  }
  j["sampler"] = s;

  j["metrics"] = {{"distance", metrics.distance},
                  {"moments", metrics.moments},
                  {"reference_samples", metrics.reference_samples},
                  {"projections", metrics.projections}};
  j["sweep"] = {{"lambdas", sweep.lambdas}, {"trace_chains", sweep.trace_chains}};
  j["convergence"] = {{"steps", convergence.steps}};

  json pts = json::array();
  for (const auto& p : theory.monte_carlo_points) {
    pts.push_back({{"gamma_i", p.gamma_i},
                   {"ratio", p.gamma_ratio()},
                   {"phi_i", p.phi_i},
                   {"phi_next", p.phi_next},
                   {"x_norm_sq", p.x_norm_sq}});
  }
  j["theory"] = {{"gamma", theory.gamma},
                 {"ratio", theory.ratio},
                 {"phi", theory.phi},
                 {"phi_gap", theory.phi_gap},
                 {"x_norm_sq", theory.x_norm_sq},
                 {"trials", theory.trials},
                 {"lambda_grid", {{"lo", theory.lambda_lo}, {"hi", theory.lambda_hi}, {"step", theory.lambda_step}}},
                 {"monte_carlo_points", pts}};
  return j;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

}  // namespace ladpm
