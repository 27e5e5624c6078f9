#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "lab/experiment.hpp"

namespace pitaron::lab {

using nlohmann::json;

namespace {

// Reads typed fields out of a JSON object and remembers which keys were
// consumed so that finish() can reject the rest.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string context) : obj_(obj), context_(std::move(context)) {
    if (!obj_.is_object()) fail("expected a JSON object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    if (!obj_.contains(key)) fail("missing required key '" + key + "'");
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key) { return as_number(raw(key), key); }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) { return as_integer(raw(key), key); }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& item : v) out.push_back(as_number(item, key));
    return out;
  }

  // A scalar is broadcast to `count` entries.
  std::vector<double> numbers_or_scalar(const std::string& key, std::size_t count) {
    const json& v = raw(key);
    if (v.is_number()) return std::vector<double>(count, as_number(v, key));
    std::vector<double> out = numbers(key);
    if (out.size() != count) {
      fail("'" + key + "' must have " + std::to_string(count) + " entries");
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail("'" + key + "' must be an array of integers");
    std::vector<int> out;
    for (const json& item : v) out.push_back(as_integer(item, key));
    return out;
  }

  std::vector<std::pair<double, double>> pairs(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail("'" + key + "' must be an array of [a, b] pairs");
    std::vector<std::pair<double, double>> out;
    for (const json& item : v) {
      if (!item.is_array() || item.size() != 2) fail("'" + key + "' entries must be [a, b] pairs");
      out.emplace_back(as_number(item[0], key), as_number(item[1], key));
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(context_ + ": " + what);
  }

  const std::string& context() const { return context_; }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) fail("'" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("'" + key + "' must be finite");
    return d;
  }

  int as_integer(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
    return v.get<int>();
  }

  const json& obj_;
  std::string context_;
  std::set<std::string> seen_;
};

Complex parse_complex(const json& v, const std::string& context) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(context + ": complex entries must be a number or [re, im]");
}

Matrix parse_matrix(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) throw ConfigError(context + ": matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ConfigError(context + ": matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = parse_complex(row[static_cast<std::size_t>(j)], context);
  }
  if (!m.allFinite()) throw ConfigError(context + ": matrix entries must be finite");
  return m;
}

Vector parse_state(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) throw ConfigError(context + ": state must be a non-empty array");
  Vector psi(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) psi(static_cast<Eigen::Index>(k)) = parse_complex(v[k], context);
  if (!(psi.norm() > 0.0)) throw ConfigError(context + ": state must be non-zero");
  return psi;
}

// Scalar coefficient: a number, or {"type": "cos"|"sin", "amplitude", "omega",
// "phase", "offset"}, or {"type": "linear", "slope", "offset"}.
ScalarFunction parse_scalar_function(const json& v, const std::string& context) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](double) { return c; };
  }
  ObjectReader r(v, context);
  const std::string type = r.string("type");
  if (type == "cos" || type == "sin") {
    const double amp = r.number("amplitude", 1.0);
    const double omega = r.number("omega", 1.0);
    const double phase = r.number("phase", 0.0);
    const double offset = r.number("offset", 0.0);
    r.finish();
    if (type == "cos") {
      return [=](double t) { return offset + amp * std::cos(omega * t + phase); };
    }
    return [=](double t) { return offset + amp * std::sin(omega * t + phase); };
  }
  if (type == "linear") {
    const double slope = r.number("slope", 1.0);
    const double offset = r.number("offset", 0.0);
    r.finish();
    return [=](double t) { return offset + slope * t; };
  }
  r.fail("unknown function type '" + type + "'");
}

std::vector<double> hop_or_gamma(ObjectReader& r, const std::string& key, int sites,
                                 std::optional<double> fallback) {
  const auto links = static_cast<std::size_t>(std::max(sites - 1, 0));
  if (!r.has(key) && fallback) return std::vector<double>(links, *fallback);
  return r.numbers_or_scalar(key, links);
}

template <typename F>
auto guarded(const std::string& context, F&& build) {
  try {
    return build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

// {"model": "pauli" | "matrix" | "nhse" | "comb" | "piecewise", ...}
HamiltonianSpec parse_hamiltonian(const json& v, const std::string& context) {
  ObjectReader r(v, context);
  const std::string model = r.string("model");
  if (model == "pauli") {
    auto f1 = parse_scalar_function(r.raw("f1"), context + ".f1");
    auto f2 = parse_scalar_function(r.raw("f2"), context + ".f2");
    auto f3 = parse_scalar_function(r.raw("f3"), context + ".f3");
    r.finish();
    return pauli_hamiltonian(std::move(f1), std::move(f2), std::move(f3));
  }
  if (model == "matrix") {
    const Matrix m = parse_matrix(r.raw("matrix"), context + ".matrix");
    r.finish();
    return HamiltonianSpec::constant(m);
  }
  if (model == "nhse") {
    const int sites = r.integer("l");
    const double onsite = r.number("E", 0.0);
    const auto hop = hop_or_gamma(r, "hop", sites, 1.0);
    const auto gamma = hop_or_gamma(r, "gamma", sites, std::nullopt);
    r.finish();
    return guarded(context, [&] {
      return HamiltonianSpec::constant(nhse_hamiltonian(sites, onsite, hop, gamma));
    });
  }
  if (model == "comb") {
    const auto strengths = r.numbers("strengths");
    const auto times = r.numbers("times");
    const int dim = r.integer("dim", 1);
    r.finish();
    return guarded(context, [&] { return dirac_comb_spec(strengths, times, dim); });
  }
  if (model == "piecewise") {
    // Constant pieces: matrix k applies for t <= until_k (last piece: beyond).
    const json& pieces = r.raw("pieces");
    r.finish();
    if (!pieces.is_array() || pieces.empty()) r.fail("'pieces' must be a non-empty array");
    std::vector<std::pair<double, Matrix>> parsed;
    for (const json& piece : pieces) {
      ObjectReader pr(piece, context + ".pieces");
      const double until = pr.number("until", std::numeric_limits<double>::infinity());
      Matrix m = parse_matrix(pr.raw("matrix"), context + ".pieces.matrix");
      pr.finish();
      if (!parsed.empty() && m.rows() != parsed.front().second.rows()) {
        r.fail("piece dimensions differ");
      }
      if (!parsed.empty() && !(until > parsed.back().first)) r.fail("piece boundaries must increase");
      parsed.emplace_back(until, std::move(m));
    }
    const Eigen::Index dim = parsed.front().second.rows();
    std::vector<double> cuts;
    for (const auto& piece : parsed) {
      if (std::isfinite(piece.first)) cuts.push_back(piece.first);
    }
    return HamiltonianSpec(dim, [parsed](double t) {
      for (const auto& [until, m] : parsed) {
        if (t <= until) return m;
      }
      return parsed.back().second;
    }).with_breakpoints(std::move(cuts));
  }
  r.fail("unknown model '" + model + "'");
}

TrajectoryParams parse_trajectory(ObjectReader& r, HamiltonianSpec spec, std::uint64_t seed,
                                  int default_grid, int default_steps) {
  TrajectoryParams p(std::move(spec));
  p.t0 = r.number("t0", 0.0);
  p.t1 = r.number("t1");
  p.grid_points = r.integer("grid_points", default_grid);
  p.steps_per_cell = r.integer("steps_per_cell", default_steps);
  if (!(p.t1 > p.t0)) r.fail("need t1 > t0");
  if (p.grid_points < 2) r.fail("grid_points must be >= 2");
  if (p.steps_per_cell < 1) r.fail("steps_per_cell must be >= 1");
  if (r.has("psi0") && r.has("random_psi0")) r.fail("give either psi0 or random_psi0");
  if (r.has("psi0")) {
    p.psi0 = parse_state(r.raw("psi0"), r.context() + ".psi0");
    if (p.psi0->size() != p.hamiltonian.dim()) r.fail("psi0 dimension does not match the Hamiltonian");
  } else if (r.has("random_psi0")) {
    const json& flag = r.raw("random_psi0");
    if (!flag.is_boolean()) r.fail("'random_psi0' must be a boolean");
    if (flag.get<bool>()) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal;
      Vector psi(p.hamiltonian.dim());
      for (Eigen::Index k = 0; k < psi.size(); ++k) psi(k) = Complex(normal(rng), normal(rng));
      p.psi0 = psi;
    }
  }
  return p;
}

ExperimentParams parse_params(const std::string& kind, const json& params, std::uint64_t seed) {
  const std::string context = "params";
  ObjectReader r(params, context);

  if (kind == "evolve") {
    HamiltonianSpec spec = parse_hamiltonian(r.raw("hamiltonian"), context + ".hamiltonian");
    EvolveParams p{parse_trajectory(r, std::move(spec), seed, 101, 20)};
    r.finish();
    return p;
  }
  if (kind == "nhse") {
    NhseParams p{.sites = r.integer("l"), .onsite = r.number("E", 0.0), .hop = {}, .gamma = {},
                 .run = TrajectoryParams(HamiltonianSpec::zero(1))};
    p.hop = hop_or_gamma(r, "hop", p.sites, 1.0);
    p.gamma = hop_or_gamma(r, "gamma", p.sites, std::nullopt);
    HamiltonianSpec spec = guarded(context, [&] {
      return HamiltonianSpec::constant(nhse_hamiltonian(p.sites, p.onsite, p.hop, p.gamma));
    });
    p.run = parse_trajectory(r, std::move(spec), seed, 101, 20);
    if (!p.run.psi0) {
      // Boundary state: particle on the first site.
      Vector psi = Vector::Zero(p.sites);
      psi(0) = 1.0;
      p.run.psi0 = psi;
    }
    r.finish();
    return p;
  }
  if (kind == "comb") {
    CombParams p{.strengths = r.numbers("strengths"), .times = r.numbers("times"), .run = TrajectoryParams(HamiltonianSpec::zero(1))};
    const int dim = r.integer("dim", 1);
    HamiltonianSpec spec = guarded(context, [&] { return dirac_comb_spec(p.strengths, p.times, dim); });
    p.run = parse_trajectory(r, std::move(spec), seed, 401, 1);
    if (p.run.hamiltonian.is_kick_time(p.run.t0)) r.fail("a kick coincides with t0");
    r.finish();
    return p;
  }
  if (kind == "dyson") {
    DysonParams p(parse_hamiltonian(r.raw("hamiltonian"), context + ".hamiltonian"));
    if (p.hamiltonian.has_kicks()) r.fail("dyson expansions need a kick-free Hamiltonian");
    p.t0 = r.number("t0", 0.0);
    p.durations = r.numbers("T");
    p.orders = r.has("orders") ? r.integers("orders") : std::vector<int>{1, 2};
    p.panels = r.integer("panels", 200);
    p.exact_steps = r.integer("exact_steps", 2000);
    r.finish();
    if (p.durations.empty()) r.fail("'T' must not be empty");
    for (double d : p.durations) {
      if (!(d > 0.0)) r.fail("'T' entries must be positive");
    }
    for (int order : p.orders) {
      if (order < 0 || order > 4) r.fail("orders must lie in [0, 4]");
    }
    if (p.panels < 2 || p.panels % 2 != 0) r.fail("panels must be even and >= 2");
    if (p.exact_steps < 1) r.fail("exact_steps must be >= 1");
    return p;
  }
  if (kind == "picard") {
    const std::string mode = r.string("mode", "exponential");
    if (mode == "exponential") {
      PicardExpParams p;
      p.g = r.number("g", 1.0);
      p.x1 = r.number("x1", 1.0);
      p.n_max = r.integer("n_max", 12);
      p.grid = r.integer("grid", 100000);
      r.finish();
      if (!(p.x1 > 0.0)) r.fail("x1 must be positive");
      if (p.g == 0.0) r.fail("g must be non-zero");
      if (p.n_max < 1) r.fail("n_max must be >= 1");
      if (p.grid < 64) r.fail("grid must be >= 64");
      return p;
    }
    if (mode == "delta") {
      PicardDeltaParams p;
      p.a = r.number("a", 1.0);
      p.x1 = r.number("x1", 2.0);
      p.n_max = r.integer("n_max", 4);
      p.grid = r.integer("grid", 4000);
      if (r.has("eps_list")) p.eps_list = r.numbers("eps_list");
      if (r.has("eps_pairs")) p.eps_pairs = r.pairs("eps_pairs");
      r.finish();
      if (p.eps_list.empty() && p.eps_pairs.empty()) r.fail("give eps_list and/or eps_pairs");
      if (!(p.a > 0.0) || !(p.x1 > 0.0)) r.fail("a and x1 must be positive");
      if (p.n_max < 2) r.fail("n_max must be >= 2");
      if (p.grid < 64) r.fail("grid must be >= 64");
      return p;
    }
    r.fail("unknown picard mode '" + mode + "'");
  }
  if (kind == "counterexample") {
    const std::string mode = r.string("mode", "dominated");
    if (mode == "dominated") {
      DominatedParams p;
      p.n_list = r.has("n_list") ? r.integers("n_list") : std::vector<int>{1, 10, 100};
      r.finish();
      for (int n : p.n_list) {
        if (n < 1) r.fail("n_list entries must be >= 1");
      }
      return p;
    }
    if (mode == "smearing") {
      SmearingParams p;
      const std::string kernel = r.string("kernel", "gaussian");
      if (kernel == "gaussian") {
        p.kernel = SmearingKind::kGaussian;
      } else if (kernel == "nascent") {
        p.kernel = SmearingKind::kNascent;
      } else {
        r.fail("kernel must be 'gaussian' or 'nascent'");
      }
      p.t1 = r.number("t1", 1.0);
      p.t = r.number("t", 2.0);
      p.panels = r.integer("panels", 2000);
      p.pairs = r.pairs("pairs");
      r.finish();
      if (!(p.t > p.t1 && p.t1 > 0.0)) r.fail("need t > t1 > 0");
      if (p.panels < 2 || p.panels % 2 != 0) r.fail("panels must be even and >= 2");
      for (const auto& [e1, e2] : p.pairs) {
        if (!(e1 > 0.0) || !(e2 > 0.0)) r.fail("smearing widths must be positive");
      }
      return p;
    }
    r.fail("unknown counterexample mode '" + mode + "'");
  }
  throw ConfigError("unknown kind '" + kind + "'");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ObjectReader top(doc, "config");
  std::string kind = top.string("kind");
  std::string output_path = top.string("output_path");
  if (output_path.empty()) top.fail("'output_path' must not be empty");
  std::uint64_t seed = 42;
  if (top.has("seed")) {
    const json& value = top.raw("seed");
    if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
      top.fail("'seed' must be a non-negative integer");
    }
    seed = value.get<std::uint64_t>();
  }
  json echo = top.raw("params");
  top.finish();
  ExperimentParams params = parse_params(kind, echo, seed);
  return ExperimentConfig{std::move(kind), std::move(params), std::move(echo),
                          std::move(output_path), seed};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace pitaron::lab
