#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pitaron/linalg.hpp"

namespace pitaron {

/// Time-sampled matrix function H(t); must be pure (same t, same matrix).
using MatrixFunction = std::function<Matrix(double)>;
using ScalarFunction = std::function<double(double)>;

/// Instantaneous term V * delta(t - time). The propagator applies it as the
/// exact factor exp(-i V).
struct Kick {
  double time = 0.0;
  Matrix strength;
};

/// A time-dependent Hamiltonian: an optional smooth part plus an ordered list
/// of delta kicks. Immutable after construction.
class HamiltonianSpec {
 public:
  /// `smooth` may be empty, meaning the smooth part is identically zero.
  /// Kick times must be strictly increasing and every kick matrix must be
  /// dim x dim with finite entries.
  HamiltonianSpec(Eigen::Index dim, MatrixFunction smooth, std::vector<Kick> kicks = {});

  static HamiltonianSpec constant(const Matrix& h);
  static HamiltonianSpec zero(Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  bool has_smooth() const { return static_cast<bool>(smooth_); }
  bool has_kicks() const { return !kicks_.empty(); }
  const std::vector<Kick>& kicks() const { return kicks_; }

  /// Smooth part at time t (zero matrix when absent). Throws NumericalError if
  /// the evaluator returns non-finite entries or the wrong shape.
  Matrix smooth_at(double t) const;

  /// Kicks with time in the left-open, right-closed interval (t0, t].
  std::vector<Kick> kicks_in(double t0, double t) const;

  bool is_kick_time(double t) const;

  /// Copy that declares jump discontinuities of the smooth part. Quadratures
  /// split at these times and sample one-sided limits at segment ends. Times
  /// must be finite and strictly increasing.
  HamiltonianSpec with_breakpoints(std::vector<double> times) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// Breakpoints in the open interval (a, b).
  std::vector<double> breakpoints_in(double a, double b) const;

 private:
  Eigen::Index dim_;
  MatrixFunction smooth_;
  std::vector<Kick> kicks_;
  std::vector<double> breakpoints_;
};

/// H = h_part - i * j_part with both parts Hermitian.
struct SplitHamiltonian {
  Matrix h_part;
  Matrix j_part;
  /// ||[h_part, j_part]||_F. The split is only a common-eigenbasis
  /// decomposition when this vanishes; callers decide what to do with it.
  double commutator_norm = 0.0;
};

SplitHamiltonian hermitian_split(const Matrix& h);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// H(t) = f1(t) sigma_x + f2(t) sigma_y + f3(t) sigma_z.
HamiltonianSpec pauli_hamiltonian(ScalarFunction f1, ScalarFunction f2, ScalarFunction f3);

/// Single-particle matrix of the asymmetric-hopping chain: E on the diagonal,
/// hop_i - gamma_i above it and hop_i + gamma_i below it.
Matrix nhse_hamiltonian(int sites, double onsite, std::span<const double> hop,
                        std::span<const double> gamma);

/// Pure kick train: kicks strength_i * generator at times_i with no smooth
/// part. The generator defaults to the identity.
HamiltonianSpec dirac_comb_spec(std::span<const double> strengths, std::span<const double> times,
                                Eigen::Index dim, const std::optional<Matrix>& generator = {});

}  // namespace pitaron
