#include "pitaron/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pitaron {

namespace {

constexpr int kMinGrid = 64;

using IterationRhs = std::function<double(int iteration, double x, double y)>;

PicardRun run_picard(const IterationRhs& rhs, double y0, double x0, double x1, int n_max, int grid) {
  if (grid < kMinGrid) throw std::invalid_argument("picard_iterate: grid must be >= 64");
  if (n_max < 0) throw std::invalid_argument("picard_iterate: n_max must be >= 0");
  if (!std::isfinite(x0) || !std::isfinite(x1) || !(x1 > x0)) {
    throw std::invalid_argument("picard_iterate: need finite x1 > x0");
  }

  PicardRun run;
  const double dx = (x1 - x0) / grid;
  run.grid.resize(static_cast<std::size_t>(grid) + 1);
  for (int k = 0; k <= grid; ++k) run.grid[k] = (k == grid) ? x1 : x0 + k * dx;

  run.iterates.emplace_back(run.grid.size(), y0);
  std::vector<double> f(run.grid.size());
  for (int n = 1; n <= n_max; ++n) {
    const std::vector<double>& prev = run.iterates.back();
    for (std::size_t k = 0; k < run.grid.size(); ++k) {
      f[k] = rhs(n, run.grid[k], prev[k]);
      if (!std::isfinite(f[k])) {
        std::ostringstream os;
        os << "picard_iterate: right-hand side is non-finite at x = " << run.grid[k]
           << " (iteration " << n << ")";
        throw NumericalError(os.str());
      }
    }
    std::vector<double> next(run.grid.size());
    next[0] = y0;
    for (std::size_t k = 1; k < run.grid.size(); ++k) {
      next[k] = next[k - 1] + 0.5 * (run.grid[k] - run.grid[k - 1]) * (f[k] + f[k - 1]);
    }
    run.iterates.push_back(std::move(next));
  }
  return run;
}

void fill_errors(PicardRun& run, const std::function<double(double)>& reference) {
  std::vector<double> ref(run.grid.size());
  if (reference) {
    for (std::size_t k = 0; k < ref.size(); ++k) ref[k] = reference(run.grid[k]);
  } else {
    ref = run.iterates.back();
  }
  run.errors.clear();
  for (const auto& iterate : run.iterates) {
    double sup = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) sup = std::max(sup, std::abs(iterate[k] - ref[k]));
    run.errors.push_back(sup);
  }
}

void require_resolved(const SmearedDelta& delta, int grid, double x1) {
  if ((x1 / grid) > 0.25 * delta.scale()) {
    std::ostringstream os;
    os << "picard_delta_breakdown: eps = " << delta.epsilon << " is below the grid resolution "
       << x1 / grid;
    throw NumericalError(os.str());
  }
}

}  // namespace

PicardRun picard_iterate(const PicardRhs& rhs, double y0, double x0, double x1, int n_max, int grid,
                         const std::function<double(double)>& reference,
                         std::optional<PicardBound> bound) {
  if (!rhs) throw std::invalid_argument("picard_iterate: empty right-hand side");
  PicardRun run = run_picard([&](int, double x, double y) { return rhs(x, y); }, y0, x0, x1, n_max,
                             grid);
  fill_errors(run, reference);
  run.bound = bound;
  return run;
}

double error_bound(double m, double nlip, double h, int n) {
  if (!(m > 0.0) || !(nlip > 0.0) || !(h > 0.0) || n < 1) {
    throw std::invalid_argument("error_bound: parameters must be positive");
  }
  // Accumulate h^n / n! as a product to avoid overflow.
  double value = m / nlip;
  for (int k = 1; k <= n; ++k) value *= nlip * h / k;
  return value;
}

double picard_interval(double a, double b, double m) {
  if (!(a > 0.0) || !(b > 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("picard_interval: parameters must be positive");
  }
  return std::min(a, b / m);
}

DeltaBreakdownReport picard_delta_breakdown(double a, double epsilon, double x1, int n_max,
                                            int grid) {
  if (!(a > 0.0)) throw std::invalid_argument("picard_delta_breakdown: need a > 0");
  if (n_max < 2) throw std::invalid_argument("picard_delta_breakdown: need n_max >= 2");
  const SmearedDelta delta(SmearingKind::kGaussian, epsilon, a);
  require_resolved(delta, grid, x1);

  const PicardRun run = run_picard([&](int, double x, double y) { return delta(x) * y; }, 1.0, 0.0,
                                   x1, n_max, grid);
  DeltaBreakdownReport report;
  report.a = a;
  report.x1 = x1;
  report.eps_first = epsilon;
  report.eps_second = epsilon;
  for (const auto& iterate : run.iterates) report.values_at_x1.push_back(iterate.back());
  report.second_order_correction = report.values_at_x1[2] - report.values_at_x1[1];
  report.direct_solution = std::exp(x1 >= a ? 1.0 : 0.0);
  return report;
}

DeltaBreakdownReport picard_delta_breakdown(double a, double eps_first, double eps_second,
                                            double x1, int grid) {
  if (!(a > 0.0)) throw std::invalid_argument("picard_delta_breakdown: need a > 0");
  const SmearedDelta first(SmearingKind::kGaussian, eps_first, a);
  const SmearedDelta second(SmearingKind::kGaussian, eps_second, a);
  require_resolved(first, grid, x1);
  require_resolved(second, grid, x1);

  const PicardRun run = run_picard(
      [&](int iteration, double x, double y) {
        return (iteration == 1 ? first(x) : second(x)) * y;
      },
      1.0, 0.0, x1, 2, grid);
  DeltaBreakdownReport report;
  report.a = a;
  report.x1 = x1;
  report.eps_first = eps_first;
  report.eps_second = eps_second;
  for (const auto& iterate : run.iterates) report.values_at_x1.push_back(iterate.back());
  report.second_order_correction = report.values_at_x1[2] - report.values_at_x1[1];
  report.direct_solution = std::exp(x1 >= a ? 1.0 : 0.0);
  return report;
}

Matrix identity_sqrt_family(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("identity_sqrt_family: non-finite parameters");
  }
  if (b == 0.0) {
    if (std::abs(a) != 1.0) {
      throw std::invalid_argument("identity_sqrt_family: b = 0 requires |a| = 1");
    }
    return a * identity(2);
  }
  const double c = (1.0 - a * a) / b;
  Matrix m(2, 2);
  m << a, b, c, -a;
  return m;
}

double singular_ode_solution(double amplitude, double left_constant, double right_constant,
                             double x) {
  if (x == 0.0) throw std::domain_error("singular_ode_solution: undefined at x = 0");
  return x > 0.0 ? amplitude * std::log(x) + right_constant
                 : amplitude * std::log(-x) + left_constant;
}

}  // namespace pitaron
