#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pitaron/hamiltonian.hpp"
#include "pitaron/linalg.hpp"

namespace pitaron {

/// Truncated operator series. terms[k] carries k powers of H; terms[0] = I.
struct SeriesExpansion {
  int order = 0;
  std::vector<Matrix> terms;
  std::vector<Matrix> partial_sums;
  std::vector<double> term_norms;

  /// Fills partial_sums and term_norms from terms.
  static SeriesExpansion from_terms(std::vector<Matrix> terms);
  const Matrix& sum() const { return partial_sums.back(); }
};

inline constexpr int kMaxDysonOrder = 4;
inline constexpr int kDefaultPanels = 200;

/// Dyson series of U(t, t0): term k is (-i)^k times the time-ordered iterated
/// integral over t0 < t_k < ... < t_1 < t of H(t_1)...H(t_k). Each nesting
/// level is a composite Simpson rule with `panels` panels (even) over
/// [t0, outer variable]. Kicked specs are rejected: their iterated integrands
/// are not functions.
SeriesExpansion dyson_u(const HamiltonianSpec& spec, double t0, double t, int order,
                        int panels = kDefaultPanels);

/// Series for U^{-1}(t, t0): I + iA - A^2 + B + ..., where A = int H and
/// B = int dt' H(t') int^{t'} dt'' H(t''). Orders 3 and 4 use the
/// anti-time-ordered iterated integrals that solve dU^{-1}/dt = i U^{-1} H.
SeriesExpansion dyson_u_inverse(const HamiltonianSpec& spec, double t0, double t, int order,
                                int panels = kDefaultPanels);

/// N = I - A^2/2 + (1/2) int int_{t''<t'} {H(t'), H(t'')} for Hermitian H
/// (order <= 2).
SeriesExpansion norm_expansion_hermitian(const HamiltonianSpec& spec, double t0, double t,
                                         int order, int panels = kDefaultPanels);

/// P = I - iA - A^2/2 - (1/2) int int_{t''<t'} [H(t'), H(t'')] for Hermitian H
/// (order <= 2).
SeriesExpansion pitaron_expansion_hermitian(const HamiltonianSpec& spec, double t0, double t,
                                            int order, int panels = kDefaultPanels);

/// Second-order N for arbitrary (possibly non-Hermitian) H, keeping A and
/// A^dagger apart:
///   I + (i/2)(A - A^dag) - (3/8)(A^2 + A^dag^2) + (1/4)|A|^2 + (1/2)(B + B^dag)
/// with |A|^2 = A^dag A.
SeriesExpansion general_norm_expansion(const HamiltonianSpec& spec, double t0, double t,
                                       int panels = kDefaultPanels);

/// Second-order P = N U for arbitrary H:
///   I - (i/2)(A + A^dag) + (1/8)A^2 - (3/8)A^dag^2 - (1/4)|A|^2 - (1/2)B + (1/2)B^dag
SeriesExpansion general_pitaron_expansion(const HamiltonianSpec& spec, double t0, double t,
                                          int panels = kDefaultPanels);

/// Least-squares slope of log ||dyson partial sum(order, T) - exact(T)|| against
/// log T over the intervals [t0, t0 + T]. Throws NumericalError when any error
/// vanishes or is non-finite (degenerate fit), std::invalid_argument when
/// T_list spans less than a decade.
double convergence_order(const HamiltonianSpec& spec, double t0,
                         const std::function<Matrix(double)>& exact, int order,
                         std::span<const double> t_list, int panels = kDefaultPanels);

/// int_{t0}^{t} dt' int_{t0}^{t'} dt'' ||H(t'') H(t')||_F^2, the matrix-norm
/// stand-in for the state-wise absolute-convergence condition of the Dyson
/// second-order term.
double ordered_product_norm_integral(const HamiltonianSpec& spec, double t0, double t,
                                     int panels = kDefaultPanels);

}  // namespace pitaron
