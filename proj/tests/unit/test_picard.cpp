#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pitaron/picard.hpp"
#include "support/oracles.hpp"

using namespace pitaron;

namespace {

double taylor_exp(double gx, int degree) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= degree; ++k) {
    term *= gx / k;
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("property: iterate n is the degree-n Taylor polynomial") {
  for (double g : {1.0, -0.7, 2.0}) {
    const int grid = 2000;
    const PicardRun run = picard_iterate([g](double, double y) { return g * y; }, 1.0, 0.0, 1.0, 6, grid);
    REQUIRE(run.iterates.size() == 7);
    const double tol = 10.0 * std::exp(std::abs(g)) * g * g / (grid * static_cast<double>(grid));
    for (int n = 0; n <= 6; ++n) {
      double worst = 0.0;
      for (std::size_t k = 0; k < run.grid.size(); k += 97) {
        worst = std::max(worst, std::abs(run.iterates[n][k] - taylor_exp(g * run.grid[k], n)));
      }
      CHECK(worst <= tol);
    }
  }
}

TEST_CASE("third iterate of y' = g y") {
  const double g = 1.5;
  const PicardRun run = picard_iterate([g](double, double y) { return g * y; }, 1.0, 0.0, 0.8, 3, 4000);
  const double x = 0.8;
  const double expected = 1.0 + g * x + 0.5 * g * g * x * x + g * g * g * x * x * x / 6.0;
  CHECK(run.value_at_end(3) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("property: measured error stays below the a-priori bound") {
  const PicardBound bound{std::exp(1.0), 1.0, 1.0};
  const PicardRun run = picard_iterate([](double, double y) { return y; }, 1.0, 0.0, 1.0, 12,
                                       100000, [](double x) { return std::exp(x); }, bound);
  REQUIRE(run.bound.has_value());
  for (int n = 1; n <= 12; ++n) CHECK(run.errors[n] <= error_bound(bound.m, bound.nlip, bound.h, n));
  for (int n = 1; n <= 12; ++n) CHECK(run.errors[n] < run.errors[n - 1]);
  CHECK(run.errors[12] < 1e-9);
}

TEST_CASE("errors without a reference are measured against the last iterate") {
  const PicardRun run = picard_iterate([](double, double y) { return -y; }, 2.0, 0.0, 1.0, 4, 64);
  CHECK(run.errors.back() == 0.0);
  CHECK(run.errors.front() > 0.0);
}

TEST_CASE("error_bound closed form") {
  CHECK(error_bound(2.0, 3.0, 0.5, 1) == doctest::Approx(2.0 * 0.5));
  CHECK(error_bound(2.0, 3.0, 0.5, 3) == doctest::Approx(2.0 * 9.0 * 0.125 / 6.0));
  // n = 170 would overflow h^n and n! separately.
  CHECK(std::isfinite(error_bound(1.0, 1.0, 50.0, 170)));
  CHECK_THROWS_AS(error_bound(1.0, 1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("picard_interval") {
  CHECK(picard_interval(1.0, 2.0, 4.0) == 0.5);
  CHECK(picard_interval(0.3, 2.0, 4.0) == 0.3);
  CHECK_THROWS_AS(picard_interval(1.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("picard_iterate validation") {
  const PicardRhs f = [](double, double y) { return y; };
  CHECK_THROWS_AS(picard_iterate(f, 1.0, 0.0, 1.0, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(picard_iterate(f, 1.0, 1.0, 0.0, 3, 100), std::invalid_argument);
  CHECK_THROWS_AS(picard_iterate({}, 1.0, 0.0, 1.0, 3, 100), std::invalid_argument);
  const PicardRhs pole = [](double x, double) { return 1.0 / (x - 0.5); };
  CHECK_THROWS_AS(picard_iterate(pole, 0.0, 0.0, 1.0, 1, 64), NumericalError);
}

TEST_CASE("delta breakdown with a single smearing") {
  const DeltaBreakdownReport r = picard_delta_breakdown(1.0, 1e-2, 2.0, 4, 4000);
  REQUIRE(r.values_at_x1.size() == 5);
  CHECK(r.values_at_x1[0] == 1.0);
  CHECK(r.values_at_x1[1] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.values_at_x1[2] == doctest::Approx(2.5).epsilon(1e-6));
  // Iterates rebuild sum_k 1/k! for a unit-mass kernel.
  CHECK(r.values_at_x1[4] == doctest::Approx(1.0 + 1.0 + 0.5 + 1.0 / 6.0 + 1.0 / 24.0).epsilon(1e-6));
  CHECK(r.second_order_correction == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.direct_solution == doctest::Approx(std::exp(1.0)));
  CHECK(picard_delta_breakdown(1.0, 1e-2, 0.5, 2, 4000).direct_solution == 1.0);
}

TEST_CASE("two-smearing correction matches the erf closed form") {
  const double a = 1.0, x1 = 2.0;
  for (auto [e1, e2] : std::vector<std::pair<double, double>>{{1e-3, 1e-1}, {1e-1, 1e-3}, {1e-2, 1e-2}}) {
    const DeltaBreakdownReport r = picard_delta_breakdown(a, e1, e2, x1, 20000);
    // y2 - y1 = int_0^{x1} d2(x) C1(x) dx + C2(x1) - C1(x1), with C the
    // kernel mass accumulated from 0, in closed form.
    const auto cdf = [](double x, double eps) {
      return 0.5 * (std::erf((x - 1.0) / (2.0 * std::sqrt(eps))) + std::erf(1.0 / (2.0 * std::sqrt(eps))));
    };
    const SmearedDelta d2(SmearingKind::kGaussian, e2, a);
    const double expected = oracle::simpson([&](double x) { return d2(x) * cdf(x, e1); }, 0.0, x1, 200000) +
                            cdf(x1, e2) - cdf(x1, e1);
    CHECK(r.second_order_correction == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("delta breakdown refuses unresolved widths") {
  CHECK_THROWS_AS(picard_delta_breakdown(1.0, 1e-6, 2.0, 3, 100), NumericalError);
  CHECK_THROWS_AS(picard_delta_breakdown(1.0, 1e-2, 2.0, 1, 4000), std::invalid_argument);
}

TEST_CASE("property: identity square-root family squares to I") {
  auto gen = oracle::rng(601);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    double b = uni(gen);
    if (std::abs(b) < 1e-2) b = 0.5;
    const Matrix m = identity_sqrt_family(uni(gen), b);
    CHECK(frobenius_distance(m * m, identity(2)) <= 1e-12 * std::max(1.0, m.squaredNorm()));
    // Traceless, so never the positive root.
    CHECK(std::abs(m.trace()) == 0.0);
  }
  CHECK(frobenius_distance(identity_sqrt_family(1.0, 0.0), identity(2)) == 0.0);
  CHECK(frobenius_distance(identity_sqrt_family(-1.0, 0.0), -identity(2)) == 0.0);
  CHECK_THROWS_AS(identity_sqrt_family(0.5, 0.0), std::invalid_argument);
  CHECK(frobenius_distance(positive_sqrt(identity(2)), identity(2)) < 1e-15);
}

TEST_CASE("two-branch solution of x y' = A") {
  CHECK(singular_ode_solution(2.0, 1.0, 3.0, 1.0) == 3.0);
  CHECK(singular_ode_solution(2.0, 1.0, 3.0, -1.0) == 1.0);
  CHECK(singular_ode_solution(2.0, 1.0, 3.0, std::exp(1.0)) == doctest::Approx(5.0));
  // x y' = A on either branch.
  const double x = -0.7, h = 1e-6;
  const double dy = (singular_ode_solution(2.0, 1.0, 3.0, x + h) - singular_ode_solution(2.0, 1.0, 3.0, x - h)) / (2 * h);
  CHECK(x * dy == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(singular_ode_solution(1.0, 0.0, 0.0, 0.0), std::domain_error);
}
