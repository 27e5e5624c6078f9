#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pitaron/linalg.hpp"
#include "pitaron/singular.hpp"

namespace pitaron {

using PicardRhs = std::function<double(double x, double y)>;

/// Constants of the a-priori Picard error bound M N^{n-1} h^n / n!.
struct PicardBound {
  double m = 0.0;     ///< max |f| on the domain
  double nlip = 0.0;  ///< max |df/dy| on the domain
  double h = 0.0;     ///< half-width of the interval the bound covers
};

struct PicardRun {
  std::vector<double> grid;
  /// iterates[n][k] = y_n(grid[k]); iterates[0] is the constant y0.
  std::vector<std::vector<double>> iterates;
  /// Sup-norm distance of each iterate to the reference (or to the last
  /// iterate when no reference was supplied).
  std::vector<double> errors;
  std::optional<PicardBound> bound;

  double value_at_end(std::size_t n) const { return iterates.at(n).back(); }
};

/// y_{n+1}(x) = y0 + int_{x0}^{x} f(x', y_n(x')) dx' on a shared uniform grid
/// of `grid` intervals, integrated by cumulative trapezoid. A non-finite rhs
/// sample throws NumericalError naming the offending x.
PicardRun picard_iterate(const PicardRhs& rhs, double y0, double x0, double x1, int n_max, int grid,
                         const std::function<double(double)>& reference = {},
                         std::optional<PicardBound> bound = {});

/// M * Nlip^{n-1} * h^n / n!.
double error_bound(double m, double nlip, double h, int n);

/// h = min(a, b / M) for |x - x0| <= a and |y - y0| <= b.
double picard_interval(double a, double b, double m);

struct DeltaBreakdownReport {
  double a = 0.0;
  double x1 = 0.0;
  double eps_first = 0.0;   ///< smearing used for the first iterate's rhs
  double eps_second = 0.0;  ///< smearing used for the second iterate's rhs
  std::vector<double> values_at_x1;  ///< y_n(x1), n = 0..n_max
  /// y_2(x1) - y_1(x1), the regularized stand-in for
  /// int delta(x - a) Theta(x - a), which has no canonical value.
  double second_order_correction = 0.0;
  /// Direct solution exp(Theta(x1 - a)).
  double direct_solution = 0.0;
};

/// Picard iteration for y' = delta_eps(x - a) y, y(0) = 1 with a gaussian
/// smeared delta, on [0, x1].
DeltaBreakdownReport picard_delta_breakdown(double a, double epsilon, double x1, int n_max,
                                            int grid);

/// Two-iterate variant with independent smearings: y_1 uses delta_{eps_first}
/// and y_2 uses delta_{eps_second}, the iterated-integral analogue of taking
/// the two limits along different paths.
DeltaBreakdownReport picard_delta_breakdown(double a, double eps_first, double eps_second,
                                            double x1, int grid);

/// [[a, b], [c, -a]] with c = (1 - a^2)/b: a square root of the 2x2
/// identity. b = 0 is accepted only for |a| = 1 and returns a * I.
Matrix identity_sqrt_family(double a, double b);

/// Closed-form two-branch solution of x y' = A:
/// A log x + C for x > 0, A log(-x) + B for x < 0. Undefined at x = 0.
double singular_ode_solution(double amplitude, double left_constant, double right_constant,
                             double x);

}  // namespace pitaron
