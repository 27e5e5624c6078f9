#include "pitaron/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pitaron {

namespace {

// Evaluates the smooth part of a spec for the quadratures, enforcing the
// series preconditions.
class Sampler {
 public:
  Sampler(const HamiltonianSpec& spec, bool hermitian_only, const char* where)
      : spec_(spec), hermitian_only_(hermitian_only), where_(where) {
    if (spec.has_kicks()) {
      throw std::invalid_argument(where_ +
                                  ": kicked Hamiltonians have no iterated-integral expansion "
                                  "(delta times Heaviside is indefinite)");
    }
  }

  Matrix operator()(double t) const {
    Matrix h = spec_.smooth_at(t);
    if (hermitian_only_ && !is_hermitian(h)) {
      std::ostringstream os;
      os << where_ << ": Hamiltonian is not Hermitian at t = " << t;
      throw NumericalError(os.str());
    }
    return h;
  }

  Eigen::Index dim() const { return spec_.dim(); }
  std::vector<double> breakpoints_in(double a, double b) const { return spec_.breakpoints_in(a, b); }

 private:
  const HamiltonianSpec& spec_;
  bool hermitian_only_;
  std::string where_;
};

enum class Ordering { kLaterLeft, kLaterRight };

// Composite Simpson on [a, b]. Ends flagged as one-sided are sampled one ulp
// inside, which picks the limit from within the segment at a jump.
template <typename F>
Matrix simpson(double a, double b, int panels, Eigen::Index dim, F&& f, bool open_a = false,
               bool open_b = false) {
  Matrix acc = Matrix::Zero(dim, dim);
  const double h = (b - a) / panels;
  for (int k = 0; k <= panels; ++k) {
    double x = (k == panels) ? b : a + k * h;
    if (k == 0 && open_a) x = std::nextafter(a, b);
    if (k == panels && open_b) x = std::nextafter(b, a);
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * f(x);
  }
  return acc * (h / 3.0);
}

// Simpson split at the declared jumps inside (a, b); panels are shared out by
// segment length, at least 2 per segment.
template <typename F>
Matrix piecewise_simpson(const Sampler& h, double a, double b, int panels, Eigen::Index dim, F&& f) {
  const std::vector<double> cuts = h.breakpoints_in(a, b);
  if (cuts.empty()) return simpson(a, b, panels, dim, f);
  std::vector<double> edges{a};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(b);
  Matrix acc = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double share = panels * (edges[k + 1] - edges[k]) / (b - a);
    const int seg = std::max(2, 2 * static_cast<int>(std::lround(share / 2.0)));
    acc += simpson(edges[k], edges[k + 1], seg, dim, f, k > 0, k + 2 < edges.size());
  }
  return acc;
}

// level-fold iterated integral over t0 < x_level < ... < x_1 < s. kLaterLeft
// yields H(x_1)...H(x_level); kLaterRight the reverse product.
Matrix iterated(const Sampler& h, double t0, double s, int level, int panels, Ordering ordering) {
  const Eigen::Index dim = h.dim();
  if (level == 0) return identity(dim);
  if (s == t0) return Matrix::Zero(dim, dim);
  return piecewise_simpson(h, t0, s, panels, dim, [&](double x) -> Matrix {
    const Matrix inner = iterated(h, t0, x, level - 1, panels, ordering);
    const Matrix hx = h(x);
    return ordering == Ordering::kLaterLeft ? Matrix(hx * inner) : Matrix(inner * hx);
  });
}

void check_args(double t0, double t, int order, int panels, int max_order, const char* where) {
  const std::string w(where);
  if (!std::isfinite(t0) || !std::isfinite(t) || !(t > t0)) {
    throw std::invalid_argument(w + ": need finite t > t0");
  }
  if (order < 0 || order > max_order) {
    throw std::invalid_argument(w + ": order must be in [0, " + std::to_string(max_order) + "]");
  }
  if (panels < 2 || panels % 2 != 0) {
    throw std::invalid_argument(w + ": Simpson panels must be even and >= 2");
  }
}

// The two building blocks of every second-order expansion.
struct FirstSecond {
  Matrix a;  // int H
  Matrix b;  // int dt' H(t') int^{t'} dt'' H(t'')
};

FirstSecond first_second(const Sampler& h, double t0, double t, int panels, int order) {
  FirstSecond fs;
  fs.a = order >= 1 ? iterated(h, t0, t, 1, panels, Ordering::kLaterLeft)
                    : Matrix::Zero(h.dim(), h.dim());
  fs.b = order >= 2 ? iterated(h, t0, t, 2, panels, Ordering::kLaterLeft)
                    : Matrix::Zero(h.dim(), h.dim());
  return fs;
}

std::vector<Matrix> truncate(std::vector<Matrix> terms, int order) {
  terms.resize(static_cast<std::size_t>(order) + 1);
  return terms;
}

}  // namespace

SeriesExpansion SeriesExpansion::from_terms(std::vector<Matrix> terms) {
  if (terms.empty()) throw std::invalid_argument("SeriesExpansion: no terms");
  SeriesExpansion s;
  s.order = static_cast<int>(terms.size()) - 1;
  s.terms = std::move(terms);
  Matrix running = Matrix::Zero(s.terms[0].rows(), s.terms[0].cols());
  for (const Matrix& term : s.terms) {
    running += term;
    s.partial_sums.push_back(running);
    s.term_norms.push_back(term.norm());
  }
  return s;
}

SeriesExpansion dyson_u(const HamiltonianSpec& spec, double t0, double t, int order, int panels) {
  check_args(t0, t, order, panels, kMaxDysonOrder, "dyson_u");
  const Sampler h(spec, false, "dyson_u");
  std::vector<Matrix> terms;
  Complex phase = 1.0;
  for (int k = 0; k <= order; ++k) {
    terms.push_back(phase * iterated(h, t0, t, k, panels, Ordering::kLaterLeft));
    phase *= -kI;
  }
  return SeriesExpansion::from_terms(std::move(terms));
}

SeriesExpansion dyson_u_inverse(const HamiltonianSpec& spec, double t0, double t, int order,
                                int panels) {
  check_args(t0, t, order, panels, kMaxDysonOrder, "dyson_u_inverse");
  const Sampler h(spec, false, "dyson_u_inverse");
  const FirstSecond fs = first_second(h, t0, t, panels, order);
  std::vector<Matrix> terms{identity(spec.dim())};
  if (order >= 1) terms.push_back(kI * fs.a);
  if (order >= 2) terms.push_back(-fs.a * fs.a + fs.b);
  Complex phase = kI * kI * kI;
  for (int k = 3; k <= order; ++k) {
    terms.push_back(phase * iterated(h, t0, t, k, panels, Ordering::kLaterRight));
    phase *= kI;
  }
  return SeriesExpansion::from_terms(std::move(terms));
}

SeriesExpansion norm_expansion_hermitian(const HamiltonianSpec& spec, double t0, double t,
                                         int order, int panels) {
  check_args(t0, t, order, panels, 2, "norm_expansion_hermitian");
  const Sampler h(spec, true, "norm_expansion_hermitian");
  const FirstSecond fs = first_second(h, t0, t, panels, 2);
  const Matrix& a = fs.a;
  const Matrix& b = fs.b;
  std::vector<Matrix> terms{identity(spec.dim()), Matrix::Zero(spec.dim(), spec.dim()),
                            -0.5 * a * a + 0.5 * (b + b.adjoint())};
  return SeriesExpansion::from_terms(truncate(std::move(terms), order));
}

SeriesExpansion pitaron_expansion_hermitian(const HamiltonianSpec& spec, double t0, double t,
                                            int order, int panels) {
  check_args(t0, t, order, panels, 2, "pitaron_expansion_hermitian");
  const Sampler h(spec, true, "pitaron_expansion_hermitian");
  const FirstSecond fs = first_second(h, t0, t, panels, 2);
  const Matrix& a = fs.a;
  const Matrix& b = fs.b;
  // B - B^dagger is the ordered double integral of [H(t'), H(t'')].
  std::vector<Matrix> terms{identity(spec.dim()), -kI * a,
                            -0.5 * a * a - 0.5 * (b - b.adjoint())};
  return SeriesExpansion::from_terms(truncate(std::move(terms), order));
}

SeriesExpansion general_norm_expansion(const HamiltonianSpec& spec, double t0, double t,
                                       int panels) {
  check_args(t0, t, 2, panels, 2, "general_norm_expansion");
  const Sampler h(spec, false, "general_norm_expansion");
  const FirstSecond fs = first_second(h, t0, t, panels, 2);
  const Matrix& a = fs.a;
  const Matrix ad = a.adjoint();
  const Matrix& b = fs.b;
  std::vector<Matrix> terms{
      identity(spec.dim()),
      0.5 * kI * a - 0.5 * kI * ad,
      -0.375 * a * a - 0.375 * ad * ad + 0.25 * ad * a + 0.5 * b + 0.5 * b.adjoint()};
  return SeriesExpansion::from_terms(std::move(terms));
}

SeriesExpansion general_pitaron_expansion(const HamiltonianSpec& spec, double t0, double t,
                                          int panels) {
  check_args(t0, t, 2, panels, 2, "general_pitaron_expansion");
  const Sampler h(spec, false, "general_pitaron_expansion");
  const FirstSecond fs = first_second(h, t0, t, panels, 2);
  const Matrix& a = fs.a;
  const Matrix ad = a.adjoint();
  const Matrix& b = fs.b;
  std::vector<Matrix> terms{
      identity(spec.dim()),
      -0.5 * kI * a - 0.5 * kI * ad,
      0.125 * a * a - 0.375 * ad * ad - 0.25 * ad * a - 0.5 * b + 0.5 * b.adjoint()};
  return SeriesExpansion::from_terms(std::move(terms));
}

double convergence_order(const HamiltonianSpec& spec, double t0,
                         const std::function<Matrix(double)>& exact, int order,
                         std::span<const double> t_list, int panels) {
  if (t_list.size() < 2) throw std::invalid_argument("convergence_order: need at least two T values");
  double t_min = t_list[0];
  double t_max = t_list[0];
  for (double value : t_list) {
    if (!(value > 0.0)) throw std::invalid_argument("convergence_order: T values must be positive");
    t_min = std::min(t_min, value);
    t_max = std::max(t_max, value);
  }
  if (t_max < 10.0 * t_min * (1.0 - 1e-12)) {
    throw std::invalid_argument("convergence_order: T values must span at least one decade");
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double big_t : t_list) {
    const SeriesExpansion s = dyson_u(spec, t0, t0 + big_t, order, panels);
    const double err = (s.sum() - exact(big_t)).norm();
    if (!(err > 0.0) || !std::isfinite(err)) {
      throw NumericalError("convergence_order: degenerate fit (zero or non-finite error)");
    }
    const double x = std::log(big_t);
    const double y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto n = static_cast<double>(t_list.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double ordered_product_norm_integral(const HamiltonianSpec& spec, double t0, double t,
                                     int panels) {
  check_args(t0, t, 0, panels, 0, "ordered_product_norm_integral");
  const Sampler h(spec, false, "ordered_product_norm_integral");
  const Matrix outer = piecewise_simpson(h, t0, t, panels, 1, [&](double t1) -> Matrix {
    const Matrix h1 = h(t1);
    if (t1 == t0) return Matrix::Zero(1, 1);
    return piecewise_simpson(h, t0, t1, panels, 1, [&](double t2) -> Matrix {
      return Matrix::Constant(1, 1, Complex((h(t2) * h1).squaredNorm(), 0.0));
    });
  });
  return outer(0, 0).real();
}

}  // namespace pitaron
