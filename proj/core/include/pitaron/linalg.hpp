#pragma once

#include <complex>

#include <Eigen/Dense>

#include "pitaron/errors.hpp"

namespace pitaron {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Default Hermiticity tolerance: ||A - A^dagger||_F relative to max(1, ||A||_F).
inline constexpr double kHermiticityTol = 1e-10;
/// Eigenvalues in [-tol, 0) of a positive semidefinite input are clamped to 0.
inline constexpr double kPsdClampTol = 1e-12;
/// Inversion, polar factors and normalization refuse inputs above this 2-norm
/// condition number.
inline constexpr double kConditionLimit = 1e12;

/// Spectral data of a Hermitian matrix: ascending real eigenvalues and the
/// unitary matrix whose columns are the matching eigenvectors.
struct EigenSystem {
  RealVector values;
  Matrix vectors;

  /// V diag(f(lambda)) V^dagger.
  template <typename F>
  Matrix apply(F&& f) const {
    Vector mapped(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) mapped(k) = f(values(k));
    return vectors * mapped.asDiagonal() * vectors.adjoint();
  }
};

// Shape/finiteness guard used at every public entry point. Throws
// std::invalid_argument for empty or non-square input, NumericalError for
// NaN/Inf entries.
void require_square_finite(const Matrix& a, const char* where);

double frobenius_distance(const Matrix& a, const Matrix& b);
bool approx_equal(const Matrix& a, const Matrix& b, double tol);
bool is_hermitian(const Matrix& a, double tol = kHermiticityTol);

/// ||A^dagger A - I||_F, zero iff A is unitary.
double unitarity_defect(const Matrix& a);

/// Ratio of extreme singular values; +inf for singular input.
double condition_number(const Matrix& a);

Matrix identity(Eigen::Index dim);
Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);

/// e^A by scaling and squaring around a truncated Taylor core.
Matrix mat_exp(const Matrix& a);

/// Eigen-decomposition of a Hermitian matrix (eigenvalues ascending).
EigenSystem hermitian_eig(const Matrix& a, double hermiticity_tol = kHermiticityTol);

/// The unique Hermitian positive semidefinite square root of A.
/// Eigenvalues in [-tol * scale, 0) are clamped to zero, where scale is
/// max(1, ||A||_2); anything more negative throws NumericalError.
Matrix positive_sqrt(const Matrix& a, double tol = kPsdClampTol);

/// Unitary factor W of the polar decomposition A = S W (S Hermitian positive
/// definite), from the singular value decomposition.
Matrix polar_unitary_factor(const Matrix& a);

/// Solves N X + X N = Q for Hermitian positive definite N in the eigenbasis
/// of N: X~_ij = Q~_ij / (lambda_i + lambda_j).
Matrix lyapunov_solve(const Matrix& n, const Matrix& q);

}  // namespace pitaron
