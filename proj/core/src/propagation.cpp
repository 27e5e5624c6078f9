#include "pitaron/propagation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pitaron {

namespace {

Matrix smooth_factor(const HamiltonianSpec& spec, double from, double to) {
  if (!spec.has_smooth() || to == from) return identity(spec.dim());
  const double mid = 0.5 * (from + to);
  return mat_exp(-kI * (to - from) * spec.smooth_at(mid));
}

// Propagates `u` across (t0, t] in place. No check on kicks at t0: callers
// stitching adjacent cells rely on the left-open convention.
void advance(const HamiltonianSpec& spec, double t0, double t, int steps, Matrix& u) {
  const double dt = (t - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double a = t0 + k * dt;
    const double b = (k + 1 == steps) ? t : t0 + (k + 1) * dt;
    double cursor = a;
    for (const Kick& kick : spec.kicks_in(a, b)) {
      u = smooth_factor(spec, cursor, kick.time) * u;
      u = mat_exp(-kI * kick.strength) * u;
      cursor = kick.time;
    }
    u = smooth_factor(spec, cursor, b) * u;
  }
}

void check_interval(double t0, double t, int steps, const char* where) {
  if (steps < 1) throw std::invalid_argument(std::string(where) + ": steps must be >= 1");
  if (!std::isfinite(t0) || !std::isfinite(t) || !(t > t0)) {
    throw std::invalid_argument(std::string(where) + ": need finite t > t0");
  }
}

}  // namespace

Matrix step_propagator(const HamiltonianSpec& spec, double t0, double t, int steps) {
  check_interval(t0, t, steps, "step_propagator");
  if (spec.is_kick_time(t0)) {
    throw std::invalid_argument(
        "step_propagator: kick at the initial time; kicks belong to (t0, t]");
  }
  Matrix u = identity(spec.dim());
  advance(spec, t0, t, steps, u);
  return u;
}

Matrix normalization_operator(const Matrix& u) {
  require_square_finite(u, "normalization_operator");
  const double cond = condition_number(u);
  if (!(cond <= kConditionLimit)) {
    std::ostringstream os;
    os << "normalization_operator: U is ill-conditioned (cond = " << cond << ")";
    throw NumericalError(os.str());
  }
  // (U U^dagger)^{-1} shares eigenvectors with U U^dagger; invert the
  // eigenvalues instead of the matrix.
  const EigenSystem eig = hermitian_eig(u * u.adjoint());
  if (!(eig.values(0) > 0.0)) {
    throw NumericalError("normalization_operator: U U^dagger is not positive definite");
  }
  return eig.apply([](double lambda) { return Complex(1.0 / std::sqrt(lambda), 0.0); });
}

PropagatorTriple pitaron(const Matrix& u, double t0, double t) {
  PropagatorTriple triple;
  triple.t0 = t0;
  triple.t = t;
  triple.u = u;
  triple.n = normalization_operator(u);
  triple.p = triple.n * u;
  triple.defect_u = unitarity_defect(u);
  triple.defect_p = unitarity_defect(triple.p);
  triple.cond_u = condition_number(u);
  return triple;
}

double z_factor(const Matrix& u, const Vector& psi) {
  require_square_finite(u, "z_factor");
  if (psi.size() != u.cols()) throw std::invalid_argument("z_factor: state dimension mismatch");
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("z_factor: zero reference state");
  return (u * psi).norm() / norm;
}

Matrix liouville_rhs(const Matrix& h, const Matrix& n) { return -kI * commutator(h, n); }

Matrix general_n_rhs(const SplitHamiltonian& split, const Matrix& n) {
  return -kI * commutator(split.h_part, n) + n * split.j_part;
}

Matrix lyapunov_n_rhs(const Matrix& u, const Matrix& du, const Matrix& n) {
  require_square_finite(u, "lyapunov_n_rhs");
  require_square_finite(du, "lyapunov_n_rhs");
  require_square_finite(n, "lyapunov_n_rhs");
  if (condition_number(u) > kConditionLimit) {
    throw NumericalError("lyapunov_n_rhs: U is ill-conditioned");
  }
  const Matrix u_inv = u.partialPivLu().inverse();
  const Matrix n2 = n * n;
  const Matrix q = -(u_inv.adjoint() * du.adjoint() * n2 + n2 * du * u_inv);
  return lyapunov_solve(n, q);
}

Trajectory evolve_trajectory(const HamiltonianSpec& spec, double t0, double t1, int grid_points,
                             int steps_per_cell, const std::optional<Vector>& psi0) {
  if (grid_points < 2) throw std::invalid_argument("evolve_trajectory: grid_points must be >= 2");
  check_interval(t0, t1, steps_per_cell, "evolve_trajectory");
  if (psi0 && psi0->size() != spec.dim()) {
    throw std::invalid_argument("evolve_trajectory: reference state dimension mismatch");
  }

  Trajectory traj;
  const double cell = (t1 - t0) / (grid_points - 1);
  traj.grid.reserve(grid_points);
  for (int k = 0; k < grid_points; ++k) {
    traj.grid.push_back(k + 1 == grid_points ? t1 : t0 + k * cell);
  }

  Matrix u = identity(spec.dim());
  for (int k = 0; k < grid_points; ++k) {
    if (k > 0) advance(spec, traj.grid[k - 1], traj.grid[k], steps_per_cell, u);
    PropagatorTriple snap = pitaron(u, t0, traj.grid[k]);
    if (k == 0) {
      snap.n = identity(spec.dim());
      snap.p = identity(spec.dim());
      snap.defect_p = 0.0;
    }
    traj.n_distance.push_back((snap.n - identity(spec.dim())).norm());
    if (psi0) traj.z_factors.push_back(z_factor(u, *psi0));
    traj.snapshots.push_back(std::move(snap));
  }
  return traj;
}

double markov_check(const HamiltonianSpec& spec, double t0, double t1, double t2, int steps) {
  if (!(t0 < t1 && t1 < t2)) throw std::invalid_argument("markov_check: need t0 < t1 < t2");
  if (spec.is_kick_time(t1)) {
    throw std::invalid_argument("markov_check: intermediate time coincides with a kick");
  }
  const Matrix late = step_propagator(spec, t1, t2, steps);
  const Matrix early = step_propagator(spec, t0, t1, steps);
  const Matrix whole = step_propagator(spec, t0, t2, steps);
  return (late * early - whole).norm();
}

}  // namespace pitaron
