#include "lab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "pitaron/errors.hpp"
#include "pitaron/picard.hpp"
#include "pitaron/propagation.hpp"
#include "pitaron/series.hpp"

namespace pitaron::lab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kDefectRoundoff = 1e-10;

// Shortest text that round-trips, so re-running a config reproduces the CSV
// byte for byte.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::ostringstream out_;
};

// JSON cannot carry NaN or infinity; those become null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

bool looks_hermitian(const HamiltonianSpec& spec, double t0, double t1) {
  if (spec.has_kicks()) {
    for (const Kick& k : spec.kicks()) {
      if (!is_hermitian(k.strength)) return false;
    }
  }
  for (int k = 0; k <= 4; ++k) {
    if (!is_hermitian(spec.smooth_at(t0 + (t1 - t0) * k / 4.0))) return false;
  }
  return true;
}

struct TrajectorySummary {
  double max_defect_u = 0.0;
  double max_defect_p = 0.0;
  double max_n_distance = 0.0;
  double max_z_deviation = 0.0;
  double final_z = kNan;
  double final_cond_u = 1.0;
};

TrajectorySummary summarize(const Trajectory& traj) {
  TrajectorySummary s;
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    s.max_defect_u = std::max(s.max_defect_u, traj.snapshots[k].defect_u);
    s.max_defect_p = std::max(s.max_defect_p, traj.snapshots[k].defect_p);
    s.max_n_distance = std::max(s.max_n_distance, traj.n_distance[k]);
    if (!traj.z_factors.empty()) {
      s.max_z_deviation = std::max(s.max_z_deviation, std::abs(traj.z_factors[k] - 1.0));
    }
  }
  if (!traj.z_factors.empty()) s.final_z = traj.z_factors.back();
  s.final_cond_u = traj.snapshots.back().cond_u;
  return s;
}

void put_summary(ordered_json& results, const TrajectorySummary& s) {
  results["max_defect_U"] = num(s.max_defect_u);
  results["max_defect_P"] = num(s.max_defect_p);
  results["max_n_distance"] = num(s.max_n_distance);
  results["max_abs_z_minus_1"] = num(s.max_z_deviation);
  results["final_z_factor"] = num(s.final_z);
  results["final_cond_U"] = num(s.final_cond_u);
}

void warn_on_split(const HamiltonianSpec& spec, double t, ordered_json& warnings,
                   ordered_json& results) {
  const SplitHamiltonian split = hermitian_split(spec.smooth_at(t));
  results["commutator_norm"] = num(split.commutator_norm);
  if (split.commutator_norm > kHermiticityTol) {
    warnings.push_back("Hermitian and anti-Hermitian parts do not commute (||[H, J]||_F = " +
                       fmt(split.commutator_norm) +
                       "); the common-eigenbasis picture does not apply");
  }
}

ExperimentResult trajectory_experiment(const TrajectoryParams& run, const CombParams* comb,
                                       ordered_json& warnings) {
  const Trajectory traj = evolve_trajectory(run.hamiltonian, run.t0, run.t1, run.grid_points,
                                            run.steps_per_cell, run.psi0);
  ExperimentResult result;
  ordered_json results;
  put_summary(results, summarize(traj));

  const auto z_at = [&](std::size_t k) { return traj.z_factors.empty() ? kNan : traj.z_factors[k]; };
  if (comb) {
    CsvWriter csv{"t", "defect_U", "defect_P", "n_distance", "z_factor", "n_trunc"};
    for (std::size_t k = 0; k < traj.grid.size(); ++k) {
      csv.row(traj.grid[k], traj.snapshots[k].defect_u, traj.snapshots[k].defect_p,
              traj.n_distance[k], z_at(k),
              comb_truncated_norm(comb->strengths, comb->times, traj.grid[k]));
    }
    result.csv = csv.str();

    const CombExpansionReport report = comb_expansion_terms(comb->strengths, comb->times, run.t1);
    const Complex p2 = comb_pitaron_expansion(comb->strengths, comb->times, run.t1);
    results["cumulative_strength"] = num(report.cumulative_strength);
    results["n_trunc_final"] = num(report.truncated_norm);
    ordered_json staircase = ordered_json::array();
    for (std::size_t k = 0; k < comb->times.size(); ++k) {
      if (comb->times[k] > run.t1) break;
      staircase.push_back(num(comb_truncated_norm(comb->strengths, comb->times, comb->times[k])));
    }
    results["n_trunc_after_kicks"] = staircase;
    results["order2_defined"] = {num(report.order2_defined.real()),
                                 num(report.order2_defined.imag())};
    results["pitaron_expansion"] = {num(p2.real()), num(p2.imag())};
    ordered_json flags = ordered_json::array();
    for (const IndefiniteTerm& term : report.indefinite) {
      flags.push_back(
          {{"kick_index", term.kick_index}, {"time", num(term.time)}, {"coefficient", num(term.coefficient)}});
    }
    results["indefinite_terms"] = flags;
    if (!report.indefinite.empty()) {
      warnings.push_back(std::to_string(report.indefinite.size()) +
                         " delta-times-step integrals in the second-order normalization have no "
                         "canonical value; they are flagged, not evaluated");
    }
  } else {
    CsvWriter csv{"t", "defect_U", "defect_P", "n_distance", "z_factor"};
    for (std::size_t k = 0; k < traj.grid.size(); ++k) {
      csv.row(traj.grid[k], traj.snapshots[k].defect_u, traj.snapshots[k].defect_p,
              traj.n_distance[k], z_at(k));
    }
    result.csv = csv.str();
  }
  result.summary["results"] = results;
  return result;
}

ExperimentResult run_evolve(const EvolveParams& p, ordered_json& warnings) {
  ExperimentResult result = trajectory_experiment(p.run, nullptr, warnings);
  if (!looks_hermitian(p.run.hamiltonian, p.run.t0, p.run.t1)) {
    warn_on_split(p.run.hamiltonian, p.run.t0, warnings, result.summary["results"]);
  }
  return result;
}

ExperimentResult run_nhse(const NhseParams& p, ordered_json& warnings) {
  ExperimentResult result = trajectory_experiment(p.run, nullptr, warnings);
  warn_on_split(p.run.hamiltonian, p.run.t0, warnings, result.summary["results"]);
  return result;
}

ExperimentResult run_comb(const CombParams& p, ordered_json& warnings) {
  return trajectory_experiment(p.run, &p, warnings);
}

ExperimentResult run_dyson(const DysonParams& p, ordered_json& warnings) {
  const double t_max = p.t0 + *std::max_element(p.durations.begin(), p.durations.end());
  const bool hermitian = looks_hermitian(p.hamiltonian, p.t0, t_max);
  ordered_json results;
  if (!hermitian) warn_on_split(p.hamiltonian, p.t0, warnings, results);

  CsvWriter csv{"T", "order", "err_partial", "defect_partial", "err_pitaron_expansion"};
  ordered_json rows = ordered_json::array();
  bool pitaron_beats_u = true;
  double worst_excess = 0.0;
  for (double duration : p.durations) {
    const double t = p.t0 + duration;
    const Matrix exact_u = step_propagator(p.hamiltonian, p.t0, t, p.exact_steps);
    const PropagatorTriple exact = pitaron(exact_u, p.t0, t);
    for (int order : p.orders) {
      const SeriesExpansion u_series = dyson_u(p.hamiltonian, p.t0, t, order, p.panels);
      const double err = frobenius_distance(u_series.sum(), exact.u);
      const double defect = unitarity_defect(u_series.sum());

      // The normalized expansion exists up to second order.
      double p_err = kNan;
      double p_defect = kNan;
      if (order <= 2) {
        Matrix p_sum;
        if (hermitian) {
          p_sum = pitaron_expansion_hermitian(p.hamiltonian, p.t0, t, order, p.panels).sum();
        } else if (order == 2) {
          p_sum = general_pitaron_expansion(p.hamiltonian, p.t0, t, p.panels).sum();
        } else {
          p_sum = dyson_u(p.hamiltonian, p.t0, t, order, p.panels).sum();
        }
        p_err = frobenius_distance(p_sum, exact.p);
        p_defect = unitarity_defect(p_sum);
        // For Hermitian H the two sums coincide algebraically through order
        // 2, so differences at round-off level are not an excess.
        const double excess = (p_defect - defect) / std::max(defect, 1e-300);
        worst_excess = std::max(worst_excess, excess);
        if (order >= 1 && excess > kDefectRoundoff) pitaron_beats_u = false;
      }
      csv.row(duration, order, err, defect, p_err);
      rows.push_back({{"T", num(duration)},
                      {"order", order},
                      {"defect_pitaron_expansion", num(p_defect)}});
    }
  }

  results["pitaron_expansion_defects"] = rows;
  results["pitaron_defect_never_exceeds_u_defect"] = pitaron_beats_u;
  results["max_relative_defect_excess"] = num(worst_excess);

  const auto [lo, hi] = std::minmax_element(p.durations.begin(), p.durations.end());
  ordered_json slopes = ordered_json::object();
  if (*hi >= 10.0 * *lo) {
    const auto exact = [&](double t) { return step_propagator(p.hamiltonian, p.t0, t, p.exact_steps); };
    for (int order : p.orders) {
      try {
        slopes[std::to_string(order)] =
            num(convergence_order(p.hamiltonian, p.t0, exact, order, p.durations, p.panels));
      } catch (const NumericalError& e) {
        warnings.push_back("order " + std::to_string(order) + " slope not fitted: " + e.what());
      }
    }
  } else {
    warnings.push_back("T values span less than a decade; convergence slopes not fitted");
  }
  results["convergence_slopes"] = slopes;

  ExperimentResult result;
  result.csv = csv.str();
  result.summary["results"] = results;
  return result;
}

ExperimentResult run_picard_exp(const PicardExpParams& p, ordered_json&) {
  const double g = p.g;
  const double ag = std::abs(g);
  // On [0, x1] the solution stays below e^{|g| x1}.
  const PicardBound bound{ag * std::exp(ag * p.x1), ag, p.x1};
  const PicardRun run = picard_iterate([g](double, double y) { return g * y; }, 1.0, 0.0, p.x1,
                                       p.n_max, p.grid, [g](double x) { return std::exp(g * x); },
                                       bound);

  CsvWriter csv{"n", "y_n_at_x1", "sup_error", "error_bound"};
  bool within = true;
  for (int n = 0; n <= p.n_max; ++n) {
    const double b = n == 0 ? kNan : error_bound(bound.m, bound.nlip, bound.h, n);
    if (n > 0 && run.errors[n] > b) within = false;
    csv.row(n, run.value_at_end(n), run.errors[n], b);
  }
  ordered_json results;
  results["exact_at_x1"] = num(std::exp(g * p.x1));
  results["final_iterate_at_x1"] = num(run.value_at_end(p.n_max));
  results["final_sup_error"] = num(run.errors.back());
  results["final_error_bound"] = num(error_bound(bound.m, bound.nlip, bound.h, p.n_max));
  results["errors_within_bound"] = within;
  results["bound_constants"] = {{"M", num(bound.m)}, {"Nlip", num(bound.nlip)}, {"h", num(bound.h)}};

  ExperimentResult result;
  result.csv = csv.str();
  result.summary["results"] = results;
  return result;
}

ExperimentResult run_picard_delta(const PicardDeltaParams& p, ordered_json& warnings) {
  CsvWriter csv{"eps_first", "eps_second", "y1_at_x1", "y2_at_x1", "second_order_correction"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  ordered_json higher = ordered_json::array();
  auto record = [&](const DeltaBreakdownReport& r) {
    csv.row(r.eps_first, r.eps_second, r.values_at_x1[1], r.values_at_x1[2],
            r.second_order_correction);
    lo = std::min(lo, r.second_order_correction);
    hi = std::max(hi, r.second_order_correction);
  };
  for (double eps : p.eps_list) {
    const DeltaBreakdownReport r = picard_delta_breakdown(p.a, eps, p.x1, p.n_max, p.grid);
    record(r);
    ordered_json values = ordered_json::array();
    for (double v : r.values_at_x1) values.push_back(num(v));
    higher.push_back({{"eps", num(eps)}, {"values_at_x1", values}});
  }
  for (const auto& [e1, e2] : p.eps_pairs) {
    record(picard_delta_breakdown(p.a, e1, e2, p.x1, p.grid));
  }
  const double direct = std::exp(p.x1 >= p.a ? 1.0 : 0.0);
  ordered_json results;
  results["direct_solution"] = num(direct);
  results["iterates"] = higher;
  results["correction_min"] = num(lo);
  results["correction_max"] = num(hi);
  results["correction_spread"] = num(hi - lo);
  warnings.push_back(
      "the second-order correction regularizes an integral of delta times step, which has no "
      "canonical value; its limit depends on the smearing");

  ExperimentResult result;
  result.csv = csv.str();
  result.summary["results"] = results;
  return result;
}

ExperimentResult run_dominated(const DominatedParams& p, ordered_json&) {
  const DominatedConvergenceReport report = dominated_convergence_demos(p.n_list);
  CsvWriter csv{"n", "box_integral", "gaussian_integral", "box_at_one", "gaussian_at_one"};
  for (const auto& row : report.rows) {
    csv.row(row.n, row.box_integral, row.gaussian_integral, row.box_at_one, row.gaussian_at_one);
  }
  ordered_json results;
  results["integral_of_limit"] = num(report.integral_of_limit);
  results["fatou_holds"] = report.fatou_holds;

  ExperimentResult result;
  result.csv = csv.str();
  result.summary["results"] = results;
  return result;
}

ExperimentResult run_smearing(const SmearingParams& p, ordered_json& warnings) {
  CsvWriter csv{"eps1", "eps2", "value"};
  ordered_json values = ordered_json::array();
  for (const auto& [e1, e2] : p.pairs) {
    const double v = smeared_second_order(e1, e2, p.kernel, p.t1, p.t, p.panels);
    csv.row(e1, e2, v);
    values.push_back(num(v));
  }
  ordered_json results;
  results["kernel"] = p.kernel == SmearingKind::kGaussian ? "gaussian" : "nascent";
  results["values"] = values;
  warnings.push_back("smeared values are not limits of a well-defined integral");

  ExperimentResult result;
  result.csv = csv.str();
  result.summary["results"] = results;
  return result;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

template <typename F>
int guarded_run(std::ostream& err, const std::string& label, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << label << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << label << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << label << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << label << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

ExperimentResult execute(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ordered_json warnings = ordered_json::array();

  ExperimentResult result = std::visit(
      [&](const auto& p) -> ExperimentResult {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, EvolveParams>) return run_evolve(p, warnings);
        if constexpr (std::is_same_v<T, NhseParams>) return run_nhse(p, warnings);
        if constexpr (std::is_same_v<T, CombParams>) return run_comb(p, warnings);
        if constexpr (std::is_same_v<T, DysonParams>) return run_dyson(p, warnings);
        if constexpr (std::is_same_v<T, PicardExpParams>) return run_picard_exp(p, warnings);
        if constexpr (std::is_same_v<T, PicardDeltaParams>) return run_picard_delta(p, warnings);
        if constexpr (std::is_same_v<T, DominatedParams>) return run_dominated(p, warnings);
        if constexpr (std::is_same_v<T, SmearingParams>) return run_smearing(p, warnings);
      },
      config.params);

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  ordered_json summary;
  summary["kind"] = config.kind;
  summary["params"] = config.params_echo;
  summary["seed"] = config.seed;
  summary["results"] = std::move(result.summary["results"]);
  summary["warnings"] = std::move(warnings);
  summary["wall_time_ms"] = ms;
  result.summary = std::move(summary);
  return result;
}

int run_config(const ExperimentConfig& config, const std::filesystem::path& out_dir,
               std::ostream& err) {
  return guarded_run(err, config.output_path, [&] {
    const ExperimentResult result = execute(config);
    const std::filesystem::path base = out_dir / config.output_path;
    write_file(base.string() + ".csv", result.csv);
    write_file(base.string() + ".summary.json", result.summary.dump(2) + "\n");
    return kExitOk;
  });
}

int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        std::ostream& err) {
  std::ostringstream local;
  int code = guarded_run(local, config_path.string(), [&] {
    const ExperimentConfig config = load_config(config_path);
    return run_config(config, out_dir, local);
  });
  err << local.str();
  return code;
}

int run_many(const std::vector<std::filesystem::path>& config_paths,
             const std::filesystem::path& out_dir, int jobs, std::ostream& err) {
  if (jobs < 1) jobs = 1;
  std::vector<int> codes(config_paths.size(), kExitOk);
  std::vector<std::string> messages(config_paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < config_paths.size(); k = next++) {
      std::ostringstream local;
      codes[k] = run(config_paths[k], out_dir, local);
      messages[k] = local.str();
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), config_paths.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  // Diagnostics in input order regardless of scheduling.
  for (const std::string& m : messages) err << m;
  return codes.empty() ? kExitOk : *std::max_element(codes.begin(), codes.end());
}

std::vector<std::string> demo_names() {
  return {"dimb", "nhse2", "pauli", "picard-exp", "smearing", "dominated"};
}

json demo_config(std::string_view name) {
  if (name == "dimb") {
    return {{"kind", "comb"},
            {"output_path", "dimb"},
            {"params",
             {{"strengths", {0.6, 1.0, 1.2, 0.8}},
              {"times", {1.0, 2.0, 3.0, 4.0}},
              {"t0", 0.0},
              {"t1", 5.0},
              {"grid_points", 501},
              {"psi0", {1.0}}}}};
  }
  if (name == "nhse2") {
    return {{"kind", "nhse"},
            {"output_path", "nhse2"},
            {"params",
             {{"l", 4}, {"E", 0.0}, {"hop", 1.0}, {"gamma", 0.5}, {"t0", 0.0}, {"t1", 2.0},
              {"grid_points", 201}, {"steps_per_cell", 20}}}};
  }
  if (name == "pauli") {
    return {{"kind", "evolve"},
            {"output_path", "pauli"},
            {"params",
             {{"hamiltonian",
               {{"model", "pauli"},
                {"f1", {{"type", "cos"}}},
                {"f2", {{"type", "sin"}}},
                {"f3", 0.5}}},
              {"t0", 0.0},
              {"t1", 2.0},
              {"grid_points", 201},
              {"steps_per_cell", 10},
              {"random_psi0", true}}}};
  }
  if (name == "picard-exp") {
    return {{"kind", "picard"},
            {"output_path", "picard-exp"},
            {"params", {{"mode", "exponential"}, {"g", 1.0}, {"x1", 1.0}, {"n_max", 12}}}};
  }
  if (name == "smearing") {
    return {{"kind", "counterexample"},
            {"output_path", "smearing"},
            {"params",
             {{"mode", "smearing"},
              {"kernel", "gaussian"},
              {"pairs", {{1e-2, 1e-2}, {1e-3, 1e-1}, {1e-1, 1e-3}}}}}};
  }
  if (name == "dominated") {
    return {{"kind", "counterexample"},
            {"output_path", "dominated"},
            {"params", {{"mode", "dominated"}, {"n_list", {1, 5, 10, 50, 100}}}}};
  }
  throw ConfigError("unknown demo '" + std::string(name) + "'");
}

}  // namespace pitaron::lab
