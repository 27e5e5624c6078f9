#pragma once

#include <optional>
#include <vector>

#include "pitaron/hamiltonian.hpp"
#include "pitaron/linalg.hpp"

namespace pitaron {

/// Standard propagator U, normalization operator N = (U U^dagger)^{-1/2} and
/// the unitary P = N U over one interval, with diagnostics.
struct PropagatorTriple {
  double t0 = 0.0;
  double t = 0.0;
  Matrix u;
  Matrix n;
  Matrix p;
  double defect_u = 0.0;  ///< ||U^dagger U - I||_F
  double defect_p = 0.0;  ///< ||P^dagger P - I||_F
  double cond_u = 1.0;
};

struct Trajectory {
  std::vector<double> grid;
  std::vector<PropagatorTriple> snapshots;
  std::vector<double> z_factors;   ///< empty unless a reference state was given
  std::vector<double> n_distance;  ///< ||N - I||_F per grid time
};

/// U(t, t0) as a time-ordered product of midpoint exponentials over `steps`
/// uniform substeps. Kicks with time in (t0, t] enter as the exact factor
/// exp(-i V) at their place in the product; a substep containing a kick is
/// split at the kick time. A kick exactly at t0 is rejected.
Matrix step_propagator(const HamiltonianSpec& spec, double t0, double t, int steps);

/// N = positive root of (U U^dagger)^{-1}. Throws NumericalError when
/// cond(U) exceeds kConditionLimit.
Matrix normalization_operator(const Matrix& u);

/// Builds {U, N, P = N U} plus defects and cond(U).
PropagatorTriple pitaron(const Matrix& u, double t0 = 0.0, double t = 0.0);

/// ||U psi|| / ||psi||.
double z_factor(const Matrix& u, const Vector& psi);

/// -i [H, N], the rate of change of N for a Hermitian generator.
Matrix liouville_rhs(const Matrix& h, const Matrix& n);

/// -i [h_part, N] + N j_part.
Matrix general_n_rhs(const SplitHamiltonian& split, const Matrix& n);

/// Solves N X + X N = -(U^{dagger -1} dU^dagger N^2 + N^2 dU U^{-1}) for X,
/// the rate of change of N obtained by differentiating U^dagger N^2 U = I.
Matrix lyapunov_n_rhs(const Matrix& u, const Matrix& du, const Matrix& n);

/// Snapshots on a uniform grid of `grid_points` times from t0 to t1. The
/// propagator is accumulated cell by cell in a single pass; N and P are
/// recomputed from U at each snapshot.
Trajectory evolve_trajectory(const HamiltonianSpec& spec, double t0, double t1, int grid_points,
                             int steps_per_cell, const std::optional<Vector>& psi0 = {});

/// ||U(t2, t1) U(t1, t0) - U(t2, t0)||_F, each factor built with `steps`
/// substeps. t1 must not coincide with a kick.
double markov_check(const HamiltonianSpec& spec, double t0, double t1, double t2, int steps);

}  // namespace pitaron
