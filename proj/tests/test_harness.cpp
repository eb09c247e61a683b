#include <gtest/gtest.h>

#include <cmath>

#include "eddy2d/harness.hpp"

using namespace eddy2d;

namespace {

DomainSpec small_domain() {
  DomainSpec d = default_domain();
  d.truncation_radius = 6.0;
  return d;
}

}  // namespace

TEST(FitRate, ExactPowerLaw) {
  const RateFit f = fit_rate({{0.4, 3.0 * 0.16}, {0.2, 3.0 * 0.04}, {0.1, 3.0 * 0.01}});
  EXPECT_NEAR(f.slope, 2.0, 1e-13);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-13);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-13);
  EXPECT_EQ(f.points, 3u);
}

TEST(FitRate, HandComputedLeastSquares) {
  // log-log points (0, 0), (1, 1), (2, 3): slope 1.5, intercept -1/6, R^2 = 27/28.
  const double e = std::exp(1.0);
  const RateFit f = fit_rate({{1.0, 1.0}, {e, e}, {e * e, std::exp(3.0)}});
  EXPECT_NEAR(f.slope, 1.5, 1e-13);
  EXPECT_NEAR(f.intercept, -1.0 / 6.0, 1e-13);
  EXPECT_NEAR(f.r_squared, 27.0 / 28.0, 1e-13);
}

TEST(FitRate, RejectsBadInput) {
  EXPECT_THROW(fit_rate({{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(fit_rate({{1.0, 1.0}, {2.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(fit_rate({{-1.0, 1.0}, {2.0, 1.0}}), std::invalid_argument);
}

TEST(FitRate, RefitDropsLargestX) {
  // Clean x^1 except for an outlier at the largest x.
  const std::vector<std::pair<double, double>> pts{{0.4, 40.0}, {0.2, 0.2}, {0.1, 0.1}, {0.05, 0.05}};
  const RateFitReport r = fit_rate_with_refit(pts, 0.98);
  ASSERT_TRUE(r.refit.has_value());
  EXPECT_LT(r.first.r_squared, 0.98);
  EXPECT_NEAR(r.accepted().slope, 1.0, 1e-13);
  EXPECT_EQ(r.accepted().points, 3u);

  const RateFitReport clean = fit_rate_with_refit({{0.4, 0.4}, {0.2, 0.2}, {0.1, 0.1}}, 0.98);
  EXPECT_FALSE(clean.refit.has_value());
}

TEST(Variation, Ratios) {
  EXPECT_DOUBLE_EQ(variation({2.0, 8.0, 4.0}), 4.0);
  EXPECT_DOUBLE_EQ(variation({}), 1.0);
  EXPECT_TRUE(std::isinf(variation({0.0, 1.0})));
}

TEST(Psi, RecipesAreSeededAndSmooth) {
  EXPECT_EQ(make_psi(PsiRecipe::One, 1)({3.0, -4.0}), Complex(1.0));
  const SampledFunction a = make_psi(PsiRecipe::Bump, 42), b = make_psi(PsiRecipe::Bump, 42),
                        c = make_psi(PsiRecipe::Bump, 43);
  EXPECT_EQ(a({0.3, 0.1}), b({0.3, 0.1}));
  EXPECT_NE(a({0.3, 0.1}), c({0.3, 0.1}));
  EXPECT_LE(std::abs(a({0.3, 0.1})), 1.0);
  EXPECT_LT(std::abs(a({50.0, 0.0})), 1e-100);
  EXPECT_EQ(psi_recipe_from_string(to_string(PsiRecipe::Bump)), PsiRecipe::Bump);
  EXPECT_THROW(psi_recipe_from_string("two"), std::invalid_argument);
}

TEST(Sweep, SmallRunConservesCurrent) {
  SweepConfig c;
  c.domain = small_domain();
  c.eps_list = {0.4, 0.2, 0.1, 0.05};
  c.far_h = 0.5;
  const SweepReport r = run_epsilon_sweep(c);
  ASSERT_EQ(r.rows.size(), 4u);
  for (const SweepRow& row : r.rows) {
    EXPECT_LT(std::abs(row.currents[1] - 1.0), 1e-8);
    EXPECT_LT(std::abs(row.currents[2] + 1.0), 1e-8);
    EXPECT_LT(std::abs(row.currents[0]), 1e-8);
    EXPECT_LT(row.omega0_average, 1e-9);
    EXPECT_NEAR(row.energy_scaled, row.eps * row.grad_sq, 1e-12 * row.energy_scaled);
  }
  EXPECT_GT(r.rows[0].weighted_error, r.rows[3].weighted_error);
  ASSERT_TRUE(r.rate.has_value());
  EXPECT_GT(r.rate->accepted().slope, 0.0);
}

TEST(Sweep, ThreadsDoNotChangeResults) {
  SweepConfig c;
  c.domain = small_domain();
  c.eps_list = {0.4, 0.2, 0.1, 0.05};
  c.far_h = 0.5;
  const SweepReport one = run_epsilon_sweep(c);
  c.threads = 2;
  const SweepReport two = run_epsilon_sweep(c);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].weighted_error, two.rows[i].weighted_error);
    EXPECT_EQ(one.rows[i].grad_lp_ball, two.rows[i].grad_lp_ball);
  }
}

TEST(Sweep, ValidatesConfig) {
  SweepConfig c;
  c.domain = small_domain();
  c.eps_list = {0.4, 0.2, 0.1};
  EXPECT_THROW(run_epsilon_sweep(c), std::invalid_argument);
  c.eps_list = {0.4, 0.1, 0.2, 0.05};
  EXPECT_THROW(run_epsilon_sweep(c), std::invalid_argument);
  c.eps_list = {0.4, 0.2, 0.1, 0.05};
  c.p = 2.5;
  EXPECT_THROW(run_epsilon_sweep(c), std::invalid_argument);
}

TEST(Truncation, DifferencesShrink) {
  TruncationConfig c;
  c.domain = small_domain();
  c.domain.omega0.reset();
  c.radii = {5.0, 10.0, 20.0};
  c.h = 1.0;
  const TruncationReport r = run_truncation_study(c);
  ASSERT_EQ(r.rows.size(), 3u);
  ASSERT_TRUE(r.rows[0].difference && r.rows[1].difference);
  EXPECT_FALSE(r.rows[2].difference.has_value());
  EXPECT_LT(*r.rows[1].difference, *r.rows[0].difference);
}

TEST(Assess, SyntheticSweep) {
  SweepReport r;
  for (double eps : {0.4, 0.2, 0.1}) {
    SweepRow row;
    row.eps = eps;
    row.weighted_error = eps;
    row.grad_sq = 1.0 / eps;
    row.energy_scaled = 1.0;
    row.l2_osc_scaled = row.l1_osc_scaled = row.grad_lp_ball = 1.0;
    row.currents = {Complex(0.0), Complex(2.0), Complex(-2.0)};
    r.rows.push_back(row);
  }
  r.rate = fit_rate_with_refit({{0.4, 0.4}, {0.2, 0.2}, {0.1, 0.1}});
  for (const Assessment& a : assess(r, 2.0)) EXPECT_TRUE(a.passed) << a.name;
  r.rows[1].weighted_error = 1.0;
  const auto list = assess(r, 2.0);
  EXPECT_FALSE(list.front().passed);
  EXPECT_EQ(list.front().name, "weighted_error_increases");
}

TEST(DefaultDomain, Layout) {
  const DomainSpec d = default_domain();
  ASSERT_TRUE(d.omega0.has_value());
  EXPECT_EQ(d.omega0->radius, 1.0);
  EXPECT_EQ(d.inductors[0].center, (Point{2.0, 0.0}));
  EXPECT_EQ(d.inductors[1].center, (Point{-2.0, 0.0}));
  EXPECT_EQ(d.truncation_radius, 10.0);
  EXPECT_NO_THROW(d.validate());
}
