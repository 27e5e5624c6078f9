#include "pitaron/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pitaron {

namespace {

void check_comb(std::span<const double> strengths, std::span<const double> times) {
  if (strengths.size() != times.size()) {
    throw std::invalid_argument("comb: strengths and times differ in length");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw std::invalid_argument("comb: kick times must be strictly increasing");
    }
  }
}

StepFunction cumulative_strength(std::span<const double> strengths, std::span<const double> times) {
  check_comb(strengths, times);
  std::vector<StepFunction::Jump> jumps;
  jumps.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) jumps.push_back({times[k], strengths[k]});
  return StepFunction(0.0, std::move(jumps));
}

template <typename F>
double simpson(double a, double b, int panels, F&& f) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double x = (k == panels) ? b : a + k * h;
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * f(x);
  }
  return acc * h / 3.0;
}

}  // namespace

StepFunction::StepFunction(double base, std::vector<Jump> jumps)
    : base_(base), jumps_(std::move(jumps)) {
  for (std::size_t k = 1; k < jumps_.size(); ++k) {
    if (!(jumps_[k].time > jumps_[k - 1].time)) {
      throw std::invalid_argument("StepFunction: jump times must be strictly increasing");
    }
  }
}

double StepFunction::operator()(double t) const {
  double value = base_;
  for (const Jump& jump : jumps_) {
    if (jump.time > t) break;
    value += jump.delta;
  }
  return value;
}

SmearedDelta::SmearedDelta(SmearingKind kind_, double epsilon_, double center_)
    : kind(kind_), epsilon(epsilon_), center(center_) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("SmearedDelta: epsilon must be positive and finite");
  }
  if (!std::isfinite(center)) throw std::invalid_argument("SmearedDelta: non-finite center");
}

double SmearedDelta::operator()(double x) const {
  const double d = x - center;
  if (kind == SmearingKind::kNascent) {
    return epsilon / (std::numbers::pi * (d * d + epsilon * epsilon));
  }
  return std::exp(-d * d / (4.0 * epsilon)) / (2.0 * std::sqrt(std::numbers::pi * epsilon));
}

double SmearedDelta::scale() const {
  return kind == SmearingKind::kNascent ? epsilon : std::sqrt(2.0 * epsilon);
}

std::pair<double, double> SmearedDelta::window() const {
  const double half = kind == SmearingKind::kNascent ? 1e3 * epsilon : 10.0 * std::sqrt(epsilon);
  return {center - half, center + half};
}

double SmearedDelta::mass() const {
  // x = center + scale * tan(theta) maps the real line onto (-pi/2, pi/2).
  const double s = scale();
  const double half_pi = 0.5 * std::numbers::pi;
  return simpson(-half_pi, half_pi, 4000, [&](double theta) {
    const double c = std::cos(theta);
    const double x = center + s * std::tan(theta);
    const double value = (*this)(x) * s / (c * c);
    return std::isfinite(value) ? value : 0.0;
  });
}

double comb_truncated_norm(std::span<const double> strengths, std::span<const double> times,
                           double t) {
  const double s = cumulative_strength(strengths, times)(t);
  return 1.0 - 0.5 * s * s;
}

CombExpansionReport comb_expansion_terms(std::span<const double> strengths,
                                         std::span<const double> times, double t) {
  const StepFunction cumulative = cumulative_strength(strengths, times);
  CombExpansionReport report;
  report.cumulative_strength = cumulative(t);
  report.order1 = -kI * report.cumulative_strength;
  report.truncated_norm = 1.0 - 0.5 * report.cumulative_strength * report.cumulative_strength;

  double ordered_pairs = 0.0;
  double earlier = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] > t) break;
    ordered_pairs += strengths[k] * earlier;
    earlier += strengths[k];
    report.indefinite.push_back({k, times[k], strengths[k] * strengths[k]});
  }
  report.order2_defined = -ordered_pairs;
  return report;
}

Complex comb_pitaron_expansion(std::span<const double> strengths, std::span<const double> times,
                               double t) {
  const double s = cumulative_strength(strengths, times)(t);
  return Complex(1.0 - 0.5 * s * s, -s);
}

double smeared_second_order(double eps1, double eps2, SmearingKind kind, double t1, double t,
                            int panels) {
  if (!(t > t1 && t1 > 0.0)) throw std::invalid_argument("smeared_second_order: need t > t1 > 0");
  if (panels < 2 || panels % 2 != 0) {
    throw std::invalid_argument("smeared_second_order: panels must be even and >= 2");
  }
  const SmearedDelta inner(kind, eps1, t1);
  const SmearedDelta outer(kind, eps2, t1);

  const auto [in_lo_raw, in_hi_raw] = inner.window();
  const auto [out_lo_raw, out_hi_raw] = outer.window();
  const double in_lo = std::max(0.0, in_lo_raw);
  const double in_hi = std::min(t, in_hi_raw);
  const double out_lo = std::max(0.0, out_lo_raw);
  const double out_hi = std::min(t, out_hi_raw);

  const double h_inner = (in_hi - in_lo) / panels;
  const double h_outer = (out_hi - out_lo) / panels;
  if (h_inner > 0.5 * inner.scale() || h_outer > 0.5 * std::min(inner.scale(), outer.scale())) {
    std::ostringstream os;
    os << "smeared_second_order: " << panels << " panels do not resolve eps = (" << eps1 << ", "
       << eps2 << ")";
    throw NumericalError(os.str());
  }

  return simpson(out_lo, out_hi, panels, [&](double x) {
    const double cdf = simpson(in_lo, std::min(x, in_hi), panels, inner);
    return outer(x) * cdf;
  });
}

DominatedConvergenceReport dominated_convergence_demos(std::span<const int> n_list, double window) {
  constexpr double kAutoTailExponent = 36.0;  // tail mass e^{-36}/2 ~ 1e-16
  constexpr int kPanels = 20000;

  DominatedConvergenceReport report;
  double liminf = std::numeric_limits<double>::infinity();
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("dominated_convergence_demos: n must be >= 1");
    const double nd = static_cast<double>(n);
    DominatedConvergenceRow row;
    row.n = n;
    // Box of width n and height 1/n.
    row.box_integral = nd * (1.0 / nd);
    row.box_at_one = (1.0 < nd) ? 1.0 / nd : 0.0;

    const double x_max = window > 0.0 ? window : std::sqrt(kAutoTailExponent / nd);
    const double tail = 0.5 * std::exp(-nd * x_max * x_max);
    if (tail > 1e-10) {
      std::ostringstream os;
      os << "dominated_convergence_demos: window " << x_max << " leaves tail mass " << tail
         << " for n = " << n;
      throw NumericalError(os.str());
    }
    row.gaussian_integral =
        simpson(0.0, x_max, kPanels, [nd](double x) { return nd * x * std::exp(-nd * x * x); });
    row.gaussian_at_one = nd * std::exp(-nd);

    liminf = std::min({liminf, row.box_integral, row.gaussian_integral});
    report.rows.push_back(row);
  }
  report.integral_of_limit = 0.0;
  report.fatou_holds = report.rows.empty() || report.integral_of_limit <= liminf;
  return report;
}

}  // namespace pitaron
