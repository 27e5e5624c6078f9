// One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pitaron/hamiltonian.hpp"
#include "pitaron/linalg.hpp"
#include "pitaron/picard.hpp"
#include "pitaron/propagation.hpp"
#include "pitaron/series.hpp"
#include "pitaron/singular.hpp"
#include "support/oracles.hpp"

using namespace pitaron;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Random invertible matrices: P unitary and equal to the polar factor.
Outcome pitaron_unitarity() {
  auto gen = oracle::rng(1001);
  double worst_defect = 0.0, worst_polar = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 15;
    const Matrix u = oracle::ginibre(n, gen);
    const Matrix p = pitaron::pitaron(u).p;
    worst_defect = std::max(worst_defect, oracle::defect(p));
    // Polar factor from the SVD: W = U_svd V_svd^dagger.
    Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix w = svd.matrixU() * svd.matrixV().adjoint();
    worst_polar = std::max(worst_polar, frobenius_distance(p, w));
  }
  return {worst_defect <= 1e-10 && worst_polar <= 1e-9,
          "max defect " + fmt("%.3g", worst_defect) + ", max polar distance " + fmt("%.3g", worst_polar)};
}

// 2. Hermitian Pauli spec keeps N = I and Z = 1.
Outcome bounded_triviality() {
  const HamiltonianSpec spec = pauli_hamiltonian([](double t) { return std::cos(t); },
                                                 [](double t) { return std::sin(t); },
                                                 [](double) { return 0.5; });
  auto gen = oracle::rng(42);
  std::normal_distribution<double> normal;
  Vector psi(2);
  for (Eigen::Index k = 0; k < 2; ++k) psi(k) = Complex(normal(gen), normal(gen));
  const Trajectory traj = evolve_trajectory(spec, 0.0, 2.0, 201, 10, psi);
  double n_dist = 0.0, z_dev = 0.0;
  for (double d : traj.n_distance) n_dist = std::max(n_dist, d);
  for (double z : traj.z_factors) z_dev = std::max(z_dev, std::abs(z - 1.0));
  return {n_dist <= 1e-8 && z_dev <= 1e-8,
          "max ||N-I|| " + fmt("%.3g", n_dist) + ", max |Z-1| " + fmt("%.3g", z_dev)};
}

Matrix diag2(Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// 3. Commuting non-Hermitian generator has closed-form N and P.
Outcome commuting_closed_form() {
  const Matrix h = diag2(1.0, 2.0) - kI * diag2(0.3, -0.1);
  const PropagatorTriple t = pitaron::pitaron(step_propagator(HamiltonianSpec::constant(h), 0.0, 1.0, 1));
  const double dn = frobenius_distance(t.n, diag2(std::exp(0.3), std::exp(-0.1)));
  const double dp = frobenius_distance(t.p, diag2(std::exp(Complex(0, -1)), std::exp(Complex(0, -2))));
  return {dn <= 1e-9 && dp <= 1e-9, "||N - N*|| " + fmt("%.3g", dn) + ", ||P - P*|| " + fmt("%.3g", dp)};
}

// 4. Skin-effect chain: U far from unitary, P unitary, boundary norm changes.
Outcome nhse_contrast() {
  const std::vector<double> hop(3, 1.0), gamma(3, 0.5);
  const Matrix h = nhse_hamiltonian(4, 0.0, hop, gamma);
  const Matrix u = step_propagator(HamiltonianSpec::constant(h), 0.0, 2.0, 1);
  // Independent U from the (non-normal) eigendecomposition.
  Eigen::ComplexEigenSolver<Matrix> es(h);
  const Eigen::VectorXcd phases = (-kI * 2.0 * es.eigenvalues().array()).exp();
  const Matrix u_oracle = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().inverse();
  const PropagatorTriple t = pitaron::pitaron(u);
  Vector psi = Vector::Zero(4);
  psi(0) = 1.0;
  const double z = z_factor(u, psi);
  const double z_oracle = (u_oracle * psi).norm();
  const double oracle_gap = frobenius_distance(u, u_oracle);
  const bool pass = t.defect_u >= 0.1 && t.defect_p <= 1e-10 && std::abs(z - 1.0) >= 0.05 &&
                    oracle_gap <= 1e-10 * std::max(1.0, u.norm());
  return {pass, "defect_U " + fmt("%.4g", t.defect_u) + ", defect_P " + fmt("%.3g", t.defect_p) + ", Z " +
                    fmt("%.6g", z) + " (oracle " + fmt("%.6g", z_oracle) + ")"};
}

// 5. Three routes to dN/dt on a diagonal commuting family.
Outcome dn_dt_consistency() {
  const Matrix h_part = diag2(0.7, -1.3);
  const Matrix j_part = diag2(0.4, -0.25);
  const Matrix h = h_part - kI * j_part;
  const SplitHamiltonian split{h_part, j_part, 0.0};
  const auto u_at = [&](double t) { return mat_exp(-kI * t * h); };
  const double step = 1e-4;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = 0.1 + 1.9 * k / 19.0;
    const Matrix u = u_at(t);
    const Matrix n = normalization_operator(u);
    const Matrix general = general_n_rhs(split, n);
    const Matrix lyap = lyapunov_n_rhs(u, -kI * h * u, n);
    const Matrix fd =
        (normalization_operator(u_at(t + step)) - normalization_operator(u_at(t - step))) / (2.0 * step);
    worst = std::max({worst, frobenius_distance(general, lyap), frobenius_distance(general, fd),
                      frobenius_distance(lyap, fd)});
  }
  return {worst <= 1e-6, "max pairwise distance " + fmt("%.3g", worst)};
}

// 6. Lyapunov eigenbasis solve against the integral representation.
Outcome lyapunov_oracle() {
  auto gen = oracle::rng(1006);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const Matrix nmat = oracle::random_pd(n, gen, 0.5, 4.0);
    const Matrix q = oracle::random_hermitian(n, gen);
    const double lmin = hermitian_eig(nmat).values.minCoeff();
    worst = std::max(worst, frobenius_distance(lyapunov_solve(nmat, q), oracle::lyapunov_quadrature(nmat, q, lmin)));
  }
  return {worst <= 1e-8, "max distance to quadrature " + fmt("%.3g", worst)};
}

// 7. Dyson slopes on constant sigma_x, and the pitaron-expansion defect on a
// sigma_x / sigma_z piecewise generator.
Outcome dyson_orders() {
  const Matrix sx = pauli_x(), sz = pauli_z();
  const HamiltonianSpec constant = HamiltonianSpec::constant(sx);
  const std::vector<double> ts{0.05, 0.1, 0.2, 0.5};
  const auto exact = [&](double t) { return mat_exp(-kI * t * sx); };
  const double s1 = convergence_order(constant, 0.0, exact, 1, ts);
  const double s2 = convergence_order(constant, 0.0, exact, 2, ts);
  bool defects_ok = true;
  std::string defects;
  for (double t : ts) {
    const double t_switch = 0.5 * t;
    const HamiltonianSpec piecewise =
        HamiltonianSpec(2, [=](double s) { return s <= t_switch ? sx : sz; }).with_breakpoints({t_switch});
    const double du = unitarity_defect(dyson_u(piecewise, 0.0, t, 2).sum());
    const double dp = unitarity_defect(pitaron_expansion_hermitian(piecewise, 0.0, t, 2).sum());
    defects_ok = defects_ok && dp <= du;
    defects += " " + fmt("%.3g", dp) + "/" + fmt("%.3g", du) + " (" + fmt("%.2g", (dp - du) / du) + ")";
  }
  const bool pass = std::abs(s1 - 2.0) <= 0.2 && std::abs(s2 - 3.0) <= 0.3 && defects_ok;
  return {pass, "slopes " + fmt("%.4g", s1) + ", " + fmt("%.4g", s2) + "; defect P/U per T:" + defects};
}

// 8. Comb staircase, indefinite flags and the e^{-iS} identity.
Outcome comb_closed_forms() {
  const std::vector<double> strengths{0.6, 1.0, 1.2, 0.8}, times{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> expected{0.82, -0.28, -2.92, -5.48};
  double worst = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    worst = std::max(worst, std::abs(comb_truncated_norm(strengths, times, times[k]) - expected[k]));
  }
  const CombExpansionReport r = comb_expansion_terms(strengths, times, 5.0);
  bool identity_ok = true;
  for (double t = 0.0; t <= 5.0; t += 0.25) {
    double s = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) s += times[k] <= t ? strengths[k] : 0.0;
    const Complex taylor = 1.0 - kI * s + 0.5 * (-kI * s) * (-kI * s);
    identity_ok = identity_ok && std::abs(comb_pitaron_expansion(strengths, times, t) - taylor) <= 1e-15;
  }
  const bool pass = worst <= 1e-12 && r.indefinite.size() == 4 && identity_ok;
  return {pass, "staircase error " + fmt("%.3g", worst) + ", flags " + std::to_string(r.indefinite.size()) +
                    ", Taylor identity " + (identity_ok ? "holds" : "broken")};
}

// 9. Smeared second-order integral under symmetric and asymmetric limits.
Outcome smearing_pathology() {
  const double sym = smeared_second_order(1e-2, 1e-2, SmearingKind::kGaussian, 1.0, 2.0);
  const double a = smeared_second_order(1e-3, 1e-1, SmearingKind::kGaussian, 1.0, 2.0);
  const double b = smeared_second_order(1e-1, 1e-3, SmearingKind::kGaussian, 1.0, 2.0);
  const bool pass = std::abs(sym - 0.5) <= 0.02 && std::max(a, b) >= 0.9 && std::min(a, b) <= 0.1;
  return {pass, "symmetric " + fmt("%.6g", sym) + ", asymmetric " + fmt("%.6g", a) + " and " + fmt("%.6g", b)};
}

// 10. Dominated-convergence counterexamples.
Outcome dominated_convergence() {
  const std::vector<int> ns{1, 5, 10, 50, 100};
  const DominatedConvergenceReport r = dominated_convergence_demos(ns);
  bool ok = true;
  for (const auto& row : r.rows) {
    if (row.n == 1 || row.n == 10 || row.n == 100) ok = ok && row.box_integral == 1.0;
    if (row.n == 5 || row.n == 50) ok = ok && std::abs(row.gaussian_integral - 0.5) <= 1e-8;
  }
  bool monotone = true;
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    monotone = monotone && r.rows[k].gaussian_at_one < r.rows[k - 1].gaussian_at_one;
    // x = 1 is interior to the box support only once n > 1.
    if (r.rows[k - 1].n > 1) monotone = monotone && r.rows[k].box_at_one < r.rows[k - 1].box_at_one;
  }
  const double last_box = r.rows.back().box_at_one, last_gauss = r.rows.back().gaussian_at_one;
  return {ok && monotone && r.fatou_holds,
          std::string("integrals ") + (ok ? "match" : "off") + ", values at x=1 at n=100: " + fmt("%.3g", last_box) +
              " and " + fmt("%.3g", last_gauss) + (monotone ? ", monotone" : ", not monotone")};
}

// 11. Picard: bound, delta breakdown spread, identity square roots.
Outcome picard() {
  const PicardBound bound{std::exp(1.0), 1.0, 1.0};
  const PicardRun run = picard_iterate([](double, double y) { return y; }, 1.0, 0.0, 1.0, 12, 100000,
                                       [](double x) { return std::exp(x); }, bound);
  const double err = run.errors[12], limit = error_bound(bound.m, bound.nlip, bound.h, 12);
  const double c1 = picard_delta_breakdown(1.0, 1e-3, 1e-1, 2.0, 20000).second_order_correction;
  const double c2 = picard_delta_breakdown(1.0, 1e-1, 1e-3, 2.0, 20000).second_order_correction;
  const double spread = std::abs(c1 - c2);
  auto gen = oracle::rng(1011);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    double b = uni(gen);
    if (std::abs(b) < 1e-2) b = 1.0;
    const Matrix m = identity_sqrt_family(uni(gen), b);
    worst = std::max(worst, frobenius_distance(m * m, identity(2)) / std::max(1.0, m.squaredNorm()));
  }
  const bool pass = err <= limit && spread >= 0.4 && worst <= 1e-12;
  return {pass, "iterate-12 error " + fmt("%.3g", err) + " (bound " + fmt("%.3g", limit) + "), spread " +
                    fmt("%.4g", spread) + ", identity roots " + fmt("%.3g", worst)};
}

// 12. Markov composition.
Outcome markov() {
  auto gen = oracle::rng(1012);
  const Matrix h1 = oracle::random_hermitian(3, gen), h2 = oracle::random_hermitian(3, gen);
  const HamiltonianSpec piecewise(3, [=](double t) { return t < 0.7 ? h1 : h2; });
  // Step edges land on t = 0.7 for every factor.
  const double exact = markov_check(piecewise, 0.0, 0.35, 1.4, 12);
  const HamiltonianSpec smooth = pauli_hamiltonian([](double t) { return std::cos(t); },
                                                   [](double t) { return std::sin(t); },
                                                   [](double) { return 0.5; });
  const double coarse = markov_check(smooth, 0.0, 0.7, 2.0, 20);
  const double fine = markov_check(smooth, 0.0, 0.7, 2.0, 40);
  const double ratio = coarse / fine;
  return {exact <= 1e-10 && std::abs(ratio - 4.0) <= 0.4,
          "piecewise defect " + fmt("%.3g", exact) + ", smooth ratio " + fmt("%.4g", ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"pitaron unitarity", pitaron_unitarity},
      {"bounded Hermitian triviality", bounded_triviality},
      {"commuting non-Hermitian closed form", commuting_closed_form},
      {"skin-effect contrast", nhse_contrast},
      {"dN/dt consistency", dn_dt_consistency},
      {"Lyapunov oracle", lyapunov_oracle},
      {"Dyson convergence orders", dyson_orders},
      {"comb closed forms", comb_closed_forms},
      {"smearing pathology", smearing_pathology},
      {"dominated convergence", dominated_convergence},
      {"Picard", picard},
      {"Markov property", markov},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
