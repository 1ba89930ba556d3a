#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qdist/errors.hpp"
#include "qdist/lmoments.hpp"
#include "qdist/rng.hpp"

using namespace qdist;

namespace {

QuantileFunction tabulate(const GridPtr& grid, double (*q)(double)) {
  QuantileFunction qf{grid, {}, "s", "x"};
  for (double p : grid->levels()) qf.values.push_back(q(p));
  return qf;
}

double identity(double p) { return p; }
double exponential(double p) { return -std::log1p(-p); }

}  // namespace

TEST(LegendreBasis, CoefficientsMatchBinomialFormula) {
  const LegendreBasis basis;
  for (int r = 0; r <= kMaxLegendreDegree; ++r) {
    std::int64_t sum = 0;
    for (int k = 0; k <= r; ++k) {
      const long double expected = (((r - k) % 2 == 0) ? 1.0L : -1.0L) * oracle::binomial(r, k) * oracle::binomial(r + k, k);
      EXPECT_EQ(static_cast<long double>(basis.coefficient(r, k)), expected) << r << "," << k;
      sum += basis.coefficient(r, k);
    }
    EXPECT_EQ(sum, 1) << "P_" << r << "(1)";
  }
  EXPECT_THROW(basis.coefficient(kMaxLegendreDegree + 1, 0), ValidationError);
  EXPECT_THROW(LegendreBasis(kMaxLegendreDegree + 1), ValidationError);
}

TEST(LegendreShifted, KnownValues) {
  EXPECT_EQ(legendre_shifted(0, 0.37), 1.0);
  EXPECT_EQ(legendre_shifted(1, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(legendre_shifted(2, 1.0), 1.0);
  EXPECT_THROW(legendre_shifted(-1, 0.5), ValidationError);
}

TEST(LegendreShifted, RecurrenceAgreesWithPowerFormAndOracle) {
  const LegendreBasis basis;
  for (int r = 0; r <= kMaxLegendreDegree; ++r)
    for (double p = 0.0; p <= 1.0; p += 1.0 / 64.0) {
      const double oracle_value = oracle::legendre_binomial(r, p);
      EXPECT_NEAR(legendre_shifted(r, p), oracle_value, 1e-9);
      EXPECT_NEAR(basis.evaluate_power_form(r, p), oracle_value, 1e-6);
    }
  const auto all = legendre_shifted_all(6, 0.3);
  ASSERT_EQ(all.size(), 6u);
  for (int r = 0; r < 6; ++r) EXPECT_DOUBLE_EQ(all[static_cast<std::size_t>(r)], legendre_shifted(r, 0.3));
}

TEST(LegendreShifted, OrthogonalityImprovesWithResolution) {
  double previous = 1.0;
  for (std::size_t m : {50u, 500u, 5000u}) {
    const QuantileGrid grid = QuantileGrid::midpoint(m);
    double worst = 0.0;
    for (int r = 0; r <= 6; ++r)
      for (int s = 0; s <= 6; ++s) {
        std::vector<double> f;
        for (double p : grid.levels()) f.push_back(legendre_shifted(r, p) * legendre_shifted(s, p));
        worst = std::max(worst, std::abs(integrate_on_grid(f, grid) - (r == s ? 1.0 / (2 * r + 1) : 0.0)));
      }
    EXPECT_LT(worst, previous);
    previous = worst;
  }
}

TEST(LMomentsFromQuantile, UniformConstantAndExponential) {
  const auto grid = make_grid(10000);
  const auto u = lmoments_from_quantile(tabulate(grid, identity), 4);
  EXPECT_NEAR(u[0], 0.5, 1e-12);
  EXPECT_NEAR(u[1], 1.0 / 6.0, 1e-6);
  EXPECT_NEAR(u[2], 0.0, 1e-6);
  EXPECT_NEAR(u[3], 0.0, 1e-6);

  QuantileFunction c{grid, std::vector<double>(grid->size(), 4.2), "s", "x"};
  const auto lc = lmoments_from_quantile(c, 4);
  EXPECT_NEAR(lc[0], 4.2, 1e-12);
  for (int r = 1; r < 4; ++r) EXPECT_NEAR(lc[static_cast<std::size_t>(r)], 0.0, 1e-6);

  const auto e = lmoments_from_quantile(tabulate(grid, exponential), 4);
  EXPECT_NEAR(e[0], 1.0, 5e-3);
  EXPECT_NEAR(e[1], 0.5, 1e-3);
  EXPECT_NEAR(e[2], 1.0 / 6.0, 1e-3);
  EXPECT_NEAR(e[3], 1.0 / 12.0, 1e-3);
}

TEST(LMomentsSample, SmallCases) {
  const auto two = lmoments_sample(std::vector<double>{5.0, 1.0}, 2);
  EXPECT_DOUBLE_EQ(two[0], 3.0);
  EXPECT_DOUBLE_EQ(two[1], 2.0);
  const auto flat = lmoments_sample(std::vector<double>{2.0, 2.0, 2.0}, 2);
  EXPECT_DOUBLE_EQ(flat[0], 2.0);
  EXPECT_DOUBLE_EQ(flat[1], 0.0);
  try {
    lmoments_sample(std::vector<double>{1.0, 2.0}, 3);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient sample for order K"), std::string::npos);
  }
}

TEST(LMomentsSample, MatchesDirectOrderStatisticFormula) {
  for (std::uint64_t t = 0; t < 40; ++t) {
    CounterRng rng(8, t);
    std::vector<double> x(6 + rng.below(40));
    for (auto& v : x) v = std::round(3.0 * rng.normal() * 4.0) / 4.0;
    const auto lm = lmoments_sample(x, 6);
    double mean = 0.0;
    for (double v : x) mean += v;
    EXPECT_DOUBLE_EQ(lm[0], mean / static_cast<double>(x.size()));
    for (int r = 1; r <= 6; ++r)
      EXPECT_NEAR(lm[static_cast<std::size_t>(r - 1)], oracle::sample_lmoment_direct(x, r), 1e-10) << "r=" << r;
    EXPECT_GE(lm[1], 0.0);
  }
}

TEST(LMomentsSample, LocationScaleEquivariance) {
  CounterRng rng(9, 0);
  std::vector<double> x(50), y(50);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::exp(rng.normal());
    y[i] = 3.0 * x[i] + 7.0;
  }
  const auto lx = lmoments_sample(x, 4), ly = lmoments_sample(y, 4);
  EXPECT_NEAR(ly[0], 3.0 * lx[0] + 7.0, 1e-12);
  for (int r = 1; r < 4; ++r) EXPECT_NEAR(ly[static_cast<std::size_t>(r)], 3.0 * lx[static_cast<std::size_t>(r)], 1e-12);

  const auto grid = make_grid(100);
  const auto px = lmoments_from_quantile(estimate_quantile_function(x, grid), 4);
  const auto py = lmoments_from_quantile(estimate_quantile_function(y, grid), 4);
  EXPECT_NEAR(py[0], 3.0 * px[0] + 7.0, 1e-12);
  for (int r = 1; r < 4; ++r) EXPECT_NEAR(py[static_cast<std::size_t>(r)], 3.0 * px[static_cast<std::size_t>(r)], 1e-12);
}

TEST(LMomentsSample, OutlierMovesL2LinearlyButRawMomentsQuartically) {
  CounterRng rng(10, 0);
  std::vector<double> x(200);
  for (auto& v : x) v = rng.normal();
  const auto base = lmoments_sample(x, 2);
  double base_m4 = 0.0;
  for (double v : x) base_m4 += std::pow(v, 4) / 200.0;
  for (double delta : {10.0, 100.0, 1000.0}) {
    auto y = x;
    y[0] += delta;
    const auto moved = lmoments_sample(y, 2);
    EXPECT_NEAR(moved[0] - base[0], delta / 200.0, 1e-9);
    EXPECT_LE(std::abs(moved[1] - base[1]), delta / 200.0 + 1e-12);
    double m4 = 0.0;
    for (double v : y) m4 += std::pow(v, 4) / 200.0;
    EXPECT_GT(m4 - base_m4, 0.5 * std::pow(delta, 4) / 200.0);
  }
}

TEST(Reconstruct, ConstantUniformAndAffine) {
  const auto grid = QuantileGrid::midpoint(100);
  for (double v : reconstruct_quantile(LMomentVector{{2.5}, "", ""}, grid)) EXPECT_EQ(v, 2.5);
  const auto u = reconstruct_quantile(LMomentVector{{0.5, 1.0 / 6.0}, "", ""}, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_NEAR(u[j], grid.level(j), 1e-15);
  const auto a = reconstruct_quantile(LMomentVector{{1.0, 0.3}, "", ""}, grid);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    EXPECT_NEAR(a[j] - a[j - 1], 6.0 * 0.3 * (grid.level(j) - grid.level(j - 1)), 1e-14);
    EXPECT_GE(a[j], a[j - 1]);
  }
}

TEST(Reconstruct, ProjectionIsIdempotent) {
  const auto grid = make_grid(2000);
  const LMomentVector lm{{0.3, 0.7, -0.2, 0.1, 0.05}, "s", "x"};
  QuantileFunction qf{grid, reconstruct_quantile(lm, *grid), "s", "x"};
  const auto back = lmoments_from_quantile(qf, 5);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_NEAR(back[r], lm[r], 1e-5);
}

TEST(Pve, Properties) {
  const auto grid = make_grid(100);
  const auto uniform = pve(tabulate(grid, identity), 4);
  EXPECT_EQ(uniform.tau_sq[0], 0.0);
  EXPECT_NEAR(uniform.tau_sq[1], 1.0, 1e-4);

  const auto fine = make_grid(20000);
  const auto expo = pve(tabulate(fine, exponential), 4);
  EXPECT_GT(expo.tau_sq[3], 0.9);
  EXPECT_LT(expo.tau_sq[3], 1.0);

  QuantileFunction flat{grid, std::vector<double>(grid->size(), 3.0), "s", "x"};
  const auto f = pve(flat, 4);
  EXPECT_EQ(f.tau_sq[0], 0.0);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(f.tau_sq[k], 1.0);

  for (std::uint64_t t = 0; t < 50; ++t) {
    CounterRng rng(11, t);
    std::vector<double> x(3 + rng.below(100));
    for (auto& v : x) v = std::exp(2.0 * rng.normal());
    const auto profile = pve(estimate_quantile_function(x, grid), 10);
    EXPECT_EQ(profile.tau_sq[0], 0.0);
    for (std::size_t k = 1; k < profile.tau_sq.size(); ++k) {
      EXPECT_GE(profile.tau_sq[k], profile.tau_sq[k - 1]);
      EXPECT_LE(profile.tau_sq[k], 1.0);
    }
  }
}

TEST(RegularMoments, FromQuantileFunction) {
  const auto grid = make_grid(100);
  QuantileFunction c{grid, std::vector<double>(grid->size(), 2.0), "s", "x"};
  const auto mc = regular_moments_from_quantile(c, 4);
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(mc[static_cast<std::size_t>(k - 1)], std::pow(2.0, k), 1e-12);
  const auto mu = regular_moments_from_quantile(tabulate(grid, identity), 2);
  EXPECT_NEAR(mu[0], 0.5, 1e-15);
  EXPECT_NEAR(mu[1], 1.0 / 3.0, 1e-4);
}

TEST(CentralMoments, BinomialExpansion) {
  const auto normal = central_moments(std::vector<double>{0.0, 1.0, 0.0, 3.0});
  EXPECT_NEAR(normal[0], 1.0, 1e-15);
  EXPECT_NEAR(normal[1], 0.0, 1e-15);
  EXPECT_NEAR(normal[2], 3.0, 1e-15);
  const double c = 1.7;
  for (double v : central_moments(std::vector<double>{c, c * c, c * c * c, c * c * c * c})) EXPECT_NEAR(v, 0.0, 1e-12);
  const auto u = central_moments(std::vector<double>{0.5, 1.0 / 3.0, 0.25, 0.2});
  EXPECT_NEAR(u[0], 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(u[1], 0.0, 1e-15);
  EXPECT_NEAR(u[2], 1.0 / 80.0, 1e-15);
  EXPECT_THROW(central_moments(std::vector<double>{1.0, 2.0}), ValidationError);
}
