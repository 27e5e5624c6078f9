#include "pitaron/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pitaron {

namespace {

// Taylor core is applied once the scaled 1-norm is at most this.
constexpr double kScaledNormTarget = 0.5;
constexpr int kMaxTaylorTerms = 40;

double norm1(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

std::string describe(const char* where, const std::string& what) {
  std::ostringstream os;
  os << where << ": " << what;
  return os.str();
}

}  // namespace

void require_square_finite(const Matrix& a, const char* where) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument(describe(where, "matrix has dimension 0"));
  }
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << "matrix is not square (" << a.rows() << "x" << a.cols() << ")";
    throw std::invalid_argument(describe(where, os.str()));
  }
  if (!a.allFinite()) throw NumericalError(describe(where, "matrix has non-finite entries"));
}

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  return a.rows() == b.rows() && a.cols() == b.cols() && frobenius_distance(a, b) <= tol;
}

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

double unitarity_defect(const Matrix& a) {
  return (a.adjoint() * a - Matrix::Identity(a.rows(), a.cols())).norm();
}

double condition_number(const Matrix& a) {
  require_square_finite(a, "condition_number");
  Eigen::BDCSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

Matrix mat_exp(const Matrix& a) {
  require_square_finite(a, "mat_exp");
  const Eigen::Index n = a.rows();

  const double norm = norm1(a);
  int squarings = 0;
  if (norm > kScaledNormTarget) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormTarget)));
  }
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= kMaxTaylorTerms; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (norm1(term) <= std::numeric_limits<double>::epsilon() * 1e-2 * norm1(result)) break;
  }
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

EigenSystem hermitian_eig(const Matrix& a, double hermiticity_tol) {
  require_square_finite(a, "hermitian_eig");
  if (!is_hermitian(a, hermiticity_tol)) {
    throw NumericalError("hermitian_eig: input is not Hermitian within tolerance");
  }
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: eigensolver failed to converge");
  }
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix positive_sqrt(const Matrix& a, double tol) {
  const EigenSystem eig = hermitian_eig(a);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  if (eig.values(0) < -tol * scale) {
    std::ostringstream os;
    os << "positive_sqrt: matrix is not positive semidefinite (min eigenvalue "
       << eig.values(0) << ")";
    throw NumericalError(os.str());
  }
  return eig.apply([](double lambda) { return Complex(std::sqrt(std::max(lambda, 0.0)), 0.0); });
}

Matrix polar_unitary_factor(const Matrix& a) {
  require_square_finite(a, "polar_unitary_factor");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || s(0) / smin > kConditionLimit) {
    throw NumericalError("polar_unitary_factor: matrix is singular or ill-conditioned");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix lyapunov_solve(const Matrix& n, const Matrix& q) {
  require_square_finite(n, "lyapunov_solve");
  require_square_finite(q, "lyapunov_solve");
  if (n.rows() != q.rows()) {
    throw std::invalid_argument("lyapunov_solve: N and Q dimensions differ");
  }
  const EigenSystem eig = hermitian_eig(n);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  // Smallest pairwise sum is 2 * lambda_min.
  if (2.0 * eig.values(0) <= kPsdClampTol * scale) {
    throw NumericalError("lyapunov_solve: N is not positive definite");
  }
  const Matrix& v = eig.vectors;
  Matrix qt = v.adjoint() * q * v;
  for (Eigen::Index i = 0; i < qt.rows(); ++i) {
    for (Eigen::Index j = 0; j < qt.cols(); ++j) {
      qt(i, j) /= eig.values(i) + eig.values(j);
    }
  }
  return v * qt * v.adjoint();
}

}  // namespace pitaron
