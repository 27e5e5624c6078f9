#include "pitaron/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pitaron {

HamiltonianSpec::HamiltonianSpec(Eigen::Index dim, MatrixFunction smooth, std::vector<Kick> kicks)
    : dim_(dim), smooth_(std::move(smooth)), kicks_(std::move(kicks)) {
  if (dim_ < 1) throw std::invalid_argument("HamiltonianSpec: dimension must be >= 1");
  for (std::size_t k = 0; k < kicks_.size(); ++k) {
    const Kick& kick = kicks_[k];
    if (!std::isfinite(kick.time)) throw std::invalid_argument("HamiltonianSpec: non-finite kick time");
    if (kick.strength.rows() != dim_ || kick.strength.cols() != dim_) {
      throw std::invalid_argument("HamiltonianSpec: kick matrix dimension mismatch");
    }
    if (!kick.strength.allFinite()) throw NumericalError("HamiltonianSpec: non-finite kick matrix");
    if (k > 0 && !(kick.time > kicks_[k - 1].time)) {
      throw std::invalid_argument("HamiltonianSpec: kick times must be strictly increasing");
    }
  }
}

HamiltonianSpec HamiltonianSpec::constant(const Matrix& h) {
  require_square_finite(h, "HamiltonianSpec::constant");
  return HamiltonianSpec(h.rows(), [h](double) { return h; });
}

HamiltonianSpec HamiltonianSpec::zero(Eigen::Index dim) { return HamiltonianSpec(dim, {}); }

Matrix HamiltonianSpec::smooth_at(double t) const {
  if (!smooth_) return Matrix::Zero(dim_, dim_);
  Matrix h = smooth_(t);
  if (h.rows() != dim_ || h.cols() != dim_) {
    throw std::invalid_argument("HamiltonianSpec: smooth evaluator returned wrong shape");
  }
  if (!h.allFinite()) {
    std::ostringstream os;
    os << "HamiltonianSpec: smooth part is non-finite at t = " << t;
    throw NumericalError(os.str());
  }
  return h;
}

std::vector<Kick> HamiltonianSpec::kicks_in(double t0, double t) const {
  std::vector<Kick> out;
  for (const Kick& kick : kicks_) {
    if (kick.time > t0 && kick.time <= t) out.push_back(kick);
  }
  return out;
}

bool HamiltonianSpec::is_kick_time(double t) const {
  return std::any_of(kicks_.begin(), kicks_.end(), [t](const Kick& k) { return k.time == t; });
}

HamiltonianSpec HamiltonianSpec::with_breakpoints(std::vector<double> times) const {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw std::invalid_argument("HamiltonianSpec: non-finite breakpoint");
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw std::invalid_argument("HamiltonianSpec: breakpoints must be strictly increasing");
    }
  }
  HamiltonianSpec copy = *this;
  copy.breakpoints_ = std::move(times);
  return copy;
}

std::vector<double> HamiltonianSpec::breakpoints_in(double a, double b) const {
  std::vector<double> out;
  for (double t : breakpoints_) {
    if (t > a && t < b) out.push_back(t);
  }
  return out;
}

SplitHamiltonian hermitian_split(const Matrix& h) {
  require_square_finite(h, "hermitian_split");
  SplitHamiltonian split;
  split.h_part = 0.5 * (h + h.adjoint());
  split.j_part = 0.5 * kI * (h - h.adjoint());
  split.commutator_norm = commutator(split.h_part, split.j_part).norm();
  return split;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

HamiltonianSpec pauli_hamiltonian(ScalarFunction f1, ScalarFunction f2, ScalarFunction f3) {
  if (!f1 || !f2 || !f3) throw std::invalid_argument("pauli_hamiltonian: empty coefficient function");
  auto eval = [f1 = std::move(f1), f2 = std::move(f2), f3 = std::move(f3)](double t) {
    const double a = f1(t);
    const double b = f2(t);
    const double c = f3(t);
    Matrix m(2, 2);
    m << c, Complex(a, -b), Complex(a, b), -c;
    return m;
  };
  return HamiltonianSpec(2, std::move(eval));
}

Matrix nhse_hamiltonian(int sites, double onsite, std::span<const double> hop,
                        std::span<const double> gamma) {
  if (sites < 2) throw std::invalid_argument("nhse_hamiltonian: need at least 2 sites");
  const auto links = static_cast<std::size_t>(sites - 1);
  if (hop.size() != links || gamma.size() != links) {
    throw std::invalid_argument("nhse_hamiltonian: hop and gamma must have sites-1 entries");
  }
  Matrix h = Matrix::Zero(sites, sites);
  for (int i = 0; i < sites; ++i) h(i, i) = onsite;
  for (std::size_t i = 0; i < links; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    h(r, r + 1) = hop[i] - gamma[i];
    h(r + 1, r) = hop[i] + gamma[i];
  }
  if (!h.allFinite()) throw NumericalError("nhse_hamiltonian: non-finite parameters");
  return h;
}

HamiltonianSpec dirac_comb_spec(std::span<const double> strengths, std::span<const double> times,
                                Eigen::Index dim, const std::optional<Matrix>& generator) {
  if (strengths.size() != times.size()) {
    throw std::invalid_argument("dirac_comb_spec: strengths and times differ in length");
  }
  if (dim < 1) throw std::invalid_argument("dirac_comb_spec: dimension must be >= 1");
  const Matrix gen = generator ? *generator : identity(dim);
  if (gen.rows() != dim || gen.cols() != dim) {
    throw std::invalid_argument("dirac_comb_spec: generator dimension mismatch");
  }
  std::vector<Kick> kicks;
  kicks.reserve(strengths.size());
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    kicks.push_back(Kick{times[k], strengths[k] * gen});
  }
  return HamiltonianSpec(dim, {}, std::move(kicks));
}

}  // namespace pitaron
