#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pitaron/linalg.hpp"

namespace pitaron {

/// Piecewise-constant, right-continuous function base + sum of jumps with
/// time <= t. Models Heaviside sums of the form sum_i V_i Theta(t - t_i).
class StepFunction {
 public:
  struct Jump {
    double time;
    double delta;
  };

  StepFunction(double base, std::vector<Jump> jumps);

  double operator()(double t) const;
  double base() const { return base_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

 private:
  double base_;
  std::vector<Jump> jumps_;
};

enum class SmearingKind { kNascent, kGaussian };

/// Regularized delta centred at `center`:
///   nascent  eps / (pi (x^2 + eps^2))
///   gaussian exp(-x^2 / (4 eps)) / (2 sqrt(pi eps))
struct SmearedDelta {
  SmearingKind kind;
  double epsilon;
  double center;

  SmearedDelta(SmearingKind kind, double epsilon, double center);

  double operator()(double x) const;
  /// Length scale the quadrature must resolve (standard deviation for the
  /// gaussian, half-width for the nascent kernel).
  double scale() const;
  /// Integration window outside which the mass is negligible:
  /// center +- 10 sqrt(eps) (gaussian), center +- 1e3 eps (nascent).
  std::pair<double, double> window() const;
  /// Numerical integral over the whole real line.
  double mass() const;
};

/// 1 - (1/2) (sum_{t_i <= t} V_i)^2, the part of the comb normalization that
/// involves no product of distributions.
double comb_truncated_norm(std::span<const double> strengths, std::span<const double> times,
                           double t);

/// One delta-times-Heaviside integral V_i^2 int delta(t'-t_i) Theta(t'-t_i).
/// These have no canonical value and are reported, never evaluated.
struct IndefiniteTerm {
  std::size_t kick_index;
  double time;
  double coefficient;
};

struct CombExpansionReport {
  double cumulative_strength = 0.0;  ///< S = sum_{t_i <= t} V_i
  Complex order0{1.0, 0.0};
  Complex order1{0.0, 0.0};  ///< -i S
  /// Well-defined part of the second-order Dyson term: -sum over passed kick
  /// pairs j < i of V_i V_j.
  Complex order2_defined{0.0, 0.0};
  double truncated_norm = 1.0;  ///< 1 - S^2 / 2
  std::vector<IndefiniteTerm> indefinite;
};

CombExpansionReport comb_expansion_terms(std::span<const double> strengths,
                                         std::span<const double> times, double t);

/// Second-order comb pitaron 1 - iS - S^2/2; the indefinite terms cancel in
/// N U, so nothing is flagged. Real and imaginary parts packed as a Complex.
Complex comb_pitaron_expansion(std::span<const double> strengths, std::span<const double> times,
                               double t);

/// int_0^t dt' d_{eps2}(t' - t1) int_0^{t'} dt'' d_{eps1}(t'' - t1) by nested
/// composite Simpson with `panels` panels per level over the kernel windows.
/// Throws NumericalError if the panel width does not resolve either kernel.
double smeared_second_order(double eps1, double eps2, SmearingKind kind, double t1, double t,
                            int panels = 2000);

struct DominatedConvergenceRow {
  int n = 0;
  double box_integral = 0.0;       ///< int f_n for f_n = 1/n on (0, n)
  double gaussian_integral = 0.0;  ///< int_0^inf n x exp(-n x^2)
  double box_at_one = 0.0;         ///< f_n(1), box family
  double gaussian_at_one = 0.0;    ///< f_n(1) = n e^{-n}
};

struct DominatedConvergenceReport {
  std::vector<DominatedConvergenceRow> rows;
  /// Both families converge pointwise to 0, so int lim f_n = 0.
  double integral_of_limit = 0.0;
  /// int lim f_n <= liminf int f_n over the sampled n.
  bool fatou_holds = false;
};

/// `window` bounds the quadrature for the gaussian family; 0 picks one with
/// tail mass below 1e-15. An explicit window whose tail exceeds 1e-10 is
/// rejected.
DominatedConvergenceReport dominated_convergence_demos(std::span<const int> n_list,
                                                       double window = 0.0);

}  // namespace pitaron
