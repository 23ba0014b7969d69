#include <gtest/gtest.h>

#include <cmath>

#include "dyadic/error.hpp"
#include "dyadic/statkit.hpp"
#include "dyadic/synthbench.hpp"
#include "oracles.hpp"

using namespace dyadic;
using namespace dyadic::stats;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::Io;
}

std::vector<double> normals(synth::CounterRng& rng, int n, double m = 0, double sd = 1) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(m, sd);
  return v;
}

}  // namespace

TEST(Pearson, Examples) {
  const std::vector<double> x = {1, 2, 3, 4}, y = {2, 1, 4, 3};
  EXPECT_NEAR(pearson(x, y), 0.6, 1e-15);
  EXPECT_NEAR(pearson(x, x), 1.0, 1e-15);
  std::vector<double> anti;
  for (double v : x) anti.push_back(-2 * v + 7);
  EXPECT_NEAR(pearson(x, anti), -1.0, 1e-15);
}

TEST(Pearson, Errors) {
  const std::vector<double> a = {1, 2, 3}, c = {5, 5, 5}, shorter = {1, 2};
  EXPECT_EQ(code_of([&] { pearson(a, c); }), Errc::ZeroVariance);
  EXPECT_EQ(code_of([&] { pearson(a, shorter); }), Errc::LengthMismatch);
  EXPECT_EQ(code_of([&] { pearson(shorter, shorter); }), Errc::InsufficientPairs);
}

TEST(PearsonProperty, AffineInvariance) {
  synth::CounterRng rng(1, 1);
  for (int k = 0; k < 20; ++k) {
    const auto x = normals(rng, 30), y = normals(rng, 30);
    const double r = pearson(x, y);
    const double a = rng.uniform(0.1, 5), b = rng.uniform(-3, 3);
    std::vector<double> xp, xn;
    for (double v : x) {
      xp.push_back(a * v + b);
      xn.push_back(-a * v + b);
    }
    EXPECT_NEAR(pearson(xp, y), r, 1e-12);
    EXPECT_NEAR(pearson(xn, y), -r, 1e-12);
    EXPECT_NEAR(r, oracle::pearson(x, y), 1e-12);
  }
}

TEST(FisherZ, ValuesAndProperties) {
  EXPECT_EQ(fisher_z(0.0), 0.0);
  EXPECT_NEAR(fisher_z(0.5), 0.549306144334055, 1e-12);
  EXPECT_EQ(fisher_z(0.3), -fisher_z(-0.3));
  EXPECT_EQ(code_of([] { fisher_z(1.0); }), Errc::OutOfRange);
  EXPECT_EQ(code_of([] { fisher_z(std::nan("")); }), Errc::OutOfRange);
  double prev = -INFINITY;
  for (double r = -0.999; r < 1.0; r += 0.001) {
    const double z = fisher_z(r);
    EXPECT_GT(z, prev);
    prev = z;
  }
}

TEST(FisherZ, TanhRoundTrip) {
  for (double x = -5; x <= 5; x += 0.125) EXPECT_NEAR(fisher_z(std::tanh(x)), x, 1e-12);
}

TEST(ClampCorrelation, Bounds) {
  EXPECT_EQ(clamp_correlation(1.0), 1.0 - kCorrelationClamp);
  EXPECT_EQ(clamp_correlation(-1.0), -(1.0 - kCorrelationClamp));
  EXPECT_EQ(clamp_correlation(0.25), 0.25);
}

TEST(TDistribution, Values) {
  EXPECT_NEAR(student_t_two_sided_p(2.0, 10), 0.0734, 5e-5);
  EXPECT_NEAR(student_t_two_sided_p(2.0, 10), oracle::t_two_sided_p(2.0, 10), 1e-12);
  for (double df : {1.0, 2.5, 10.0, 1e6}) EXPECT_DOUBLE_EQ(student_t_cdf(0.0, df), 0.5);
  double prev = 0;
  for (double t = -8; t <= 8; t += 0.1) {
    const double c = student_t_cdf(t, 4);
    EXPECT_GE(c, prev);
    prev = c;
  }
  for (double t : {-3.0, -1.0, 0.5, 2.0}) EXPECT_LT(std::abs(student_t_cdf(t, 1e6) - normal_cdf(t)), 1e-3);
  EXPECT_EQ(code_of([] { student_t_cdf(1.0, 0.0); }), Errc::OutOfRange);
}

TEST(FDistribution, MatchesOracle) {
  for (double f : {0.2, 1.0, 4.0, 20.99}) {
    EXPECT_NEAR(f_survival(f, 1, 104), oracle::f_survival(f, 1, 104), 1e-12);
    EXPECT_NEAR(f_survival(f, 3, 17), oracle::f_survival(f, 3, 17), 1e-12);
  }
  EXPECT_EQ(f_survival(0.0, 1, 10), 1.0);
}

TEST(IncompleteBeta, Identities) {
  EXPECT_DOUBLE_EQ(incomplete_beta(1, 1, 0.3), 0.3);
  EXPECT_NEAR(incomplete_beta(2, 3, 0.4) + incomplete_beta(3, 2, 0.6), 1.0, 1e-14);
  EXPECT_EQ(code_of([] { incomplete_beta(0, 1, 0.5); }), Errc::OutOfRange);
  EXPECT_EQ(code_of([] { incomplete_beta(1, 1, 1.5); }), Errc::OutOfRange);
}

TEST(TTest, Examples) {
  const std::vector<double> a = {0.1, 0.2, 0.3};
  const auto r = one_sample_t(a);
  EXPECT_NEAR(r.t, 3.4641016151377544, 1e-12);
  EXPECT_EQ(r.df, 2);
  const std::vector<double> sym = {-1, 1};
  const auto s = one_sample_t(sym);
  EXPECT_EQ(s.t, 0.0);
  EXPECT_NEAR(s.p_two_sided, 1.0, 1e-15);
  const std::vector<double> c = {2, 2, 2};
  EXPECT_EQ(code_of([&] { one_sample_t(c); }), Errc::ZeroVariance);
  const std::vector<double> one = {1};
  EXPECT_EQ(code_of([&] { one_sample_t(one); }), Errc::InsufficientPairs);
}

TEST(TTest, PairedEqualsOneSampleOnDifferences) {
  const std::vector<double> a = {1.0, 2.5, 3.1, 0.2}, b = {0.5, 2.0, 2.0, 0.9};
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
  EXPECT_DOUBLE_EQ(paired_t(a, b).t, one_sample_t(d).t);
  const std::vector<double> shorter = {1};
  EXPECT_EQ(code_of([&] { paired_t(a, shorter); }), Errc::LengthMismatch);
}

namespace {

struct Layout {
  std::vector<double> y;
  std::vector<int> a, b;
};

Layout layout(const std::vector<double> cell_means, int n, double noise, std::uint64_t seed) {
  synth::CounterRng rng(seed, 2);
  Layout l;
  for (int ab = 0; ab < 4; ++ab) {
    for (int i = 0; i < n; ++i) {
      l.y.push_back(cell_means[ab] + (noise > 0 ? rng.normal(0, noise) : 0.0));
      l.a.push_back(ab / 2);
      l.b.push_back(ab % 2);
    }
  }
  return l;
}

}  // namespace

TEST(Anova, PureAEffectWithoutNoise) {
  const auto l = layout({0, 0, 1, 1}, 5, 0.0, 1);
  const auto t = anova_2x2(l.y, l.a, l.b);
  EXPECT_TRUE(t.residual_zero);
  EXPECT_TRUE(std::isinf(t.effect("A").f));
  EXPECT_EQ(t.effect("B").f, 0.0);
  EXPECT_EQ(t.effect("A:B").f, 0.0);
  EXPECT_NEAR(t.effect("A").ss, 5.0, 1e-12);
}

TEST(Anova, AllEqual) {
  const auto l = layout({2, 2, 2, 2}, 3, 0.0, 1);
  const auto t = anova_2x2(l.y, l.a, l.b);
  EXPECT_EQ(t.total_ss, 0.0);
  for (const auto& e : t.effects) {
    EXPECT_EQ(e.ss, 0.0);
    EXPECT_EQ(e.f, 0.0);
  }
}

TEST(Anova, MatchesExplicitSumsOfSquares) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto l = layout({0.2, -0.1, 0.5, 0.9}, 27, 0.7, seed);
    const auto t = anova_2x2(l.y, l.a, l.b);
    const auto ss = oracle::two_way_ss(l.y, l.a, l.b);
    EXPECT_NEAR(t.effect("A").ss, ss.a, 1e-10 * ss.total);
    EXPECT_NEAR(t.effect("B").ss, ss.b, 1e-10 * ss.total);
    EXPECT_NEAR(t.effect("A:B").ss, ss.ab, 1e-10 * ss.total);
    EXPECT_NEAR(t.residual_ss, ss.residual, 1e-10 * ss.total);
    EXPECT_EQ(t.residual_df, 104);
    // Decomposition is complete under balance.
    const double sum = t.effect("A").ss + t.effect("B").ss + t.effect("A:B").ss + t.residual_ss;
    EXPECT_NEAR(sum, t.total_ss, 1e-10 * t.total_ss);
  }
}

TEST(Anova, Errors) {
  std::vector<double> y = {1, 2, 3};
  std::vector<int> a = {0, 0, 1}, b = {0, 1, 0};
  EXPECT_EQ(code_of([&] { anova_2x2(y, a, b); }), Errc::EmptyCell);
  y = {1, 2, 3, 4, 5};
  a = {0, 0, 1, 1, 1};
  b = {0, 1, 0, 1, 1};
  EXPECT_EQ(code_of([&] { anova_2x2(y, a, b); }), Errc::Unbalanced);
  a = {0, 0, 1, 2, 1};
  EXPECT_EQ(code_of([&] { anova_2x2(y, a, b); }), Errc::OutOfRange);
}

TEST(Ols, ExactLine) {
  Eigen::MatrixXd X(5, 2);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 1;
    X(i, 1) = i;
    y(i) = 3 + 2 * i;
  }
  const auto f = ols(y, X, {"intercept", "x"});
  EXPECT_NEAR(f.coef("intercept").estimate, 3, 1e-12);
  EXPECT_NEAR(f.coef("x").estimate, 2, 1e-12);
  EXPECT_NEAR(f.residual_variance, 0, 1e-20);
}

TEST(Ols, OrthogonalResponseGivesZeroSlope) {
  Eigen::MatrixXd X(4, 2);
  X << 1, -1, 1, 1, 1, -1, 1, 1;
  Eigen::VectorXd y(4);
  y << 1, 1, 2, 2;  // y has no component along x
  EXPECT_NEAR(ols(y, X, {"i", "x"}).coef("x").estimate, 0, 1e-14);
}

TEST(Ols, RankDeficient) {
  Eigen::MatrixXd X(5, 3);
  for (int i = 0; i < 5; ++i) X.row(i) << 1, i, 2 * i;
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, 0, 1);
  EXPECT_EQ(code_of([&] { ols(y, X, {"a", "b", "c"}); }), Errc::RankDeficient);
  EXPECT_EQ(code_of([&] { ols(y.head(2), X.topRows(2), {"a", "b", "c"}); }), Errc::RankDeficient);
}

TEST(OlsProperty, MatchesNormalEquationsAndResidualsOrthogonal) {
  synth::CounterRng rng(9, 1);
  for (int k = 0; k < 10; ++k) {
    const int n = 40 + 10 * k, p = 2 + k % 4;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    std::vector<std::vector<double>> Xo(n, std::vector<double>(p));
    std::vector<double> yo(n);
    std::vector<std::string> cols;
    for (int j = 0; j < p; ++j) cols.push_back("c" + std::to_string(j));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) Xo[i][j] = X(i, j) = j == 0 ? 1.0 : rng.normal(0, j);
      yo[i] = y(i) = X.row(i).sum() + rng.normal();
    }
    const auto f = ols(y, X, cols);
    const auto ref = oracle::normal_equations(Xo, yo);
    for (int j = 0; j < p; ++j) EXPECT_NEAR(f.coefficients[j].estimate, ref[j], 1e-8 * std::max(1.0, std::abs(ref[j])));
    for (int j = 0; j < p; ++j) {
      const double c = f.residuals.dot(X.col(j)) / (f.residuals.norm() * X.col(j).norm());
      EXPECT_LT(std::abs(c), 1e-8);
    }
  }
}

TEST(LinearCombination, SumOfTwoCoefficients) {
  std::vector<Coefficient> cs = {{"a", 1.0, 0, 0, 1}, {"b", 2.0, 0, 0, 1}};
  Eigen::MatrixXd cov(2, 2);
  cov << 0.04, 0.01, 0.01, 0.09;
  Eigen::VectorXd w(2);
  w << 1, 1;
  const auto c = linear_combination(cs, cov, w, 50, "a+b");
  EXPECT_DOUBLE_EQ(c.estimate, 3.0);
  EXPECT_NEAR(c.se, std::sqrt(0.04 + 0.09 + 0.02), 1e-15);
  EXPECT_NEAR(c.t, 3.0 / c.se, 1e-12);
}

namespace {

struct Grouped {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<int> g;
};

Grouped grouped(std::uint64_t seed, double sd_b, double sd_e, int G, int m, bool covariate) {
  synth::CounterRng rng(seed, 3);
  Grouped d{Eigen::VectorXd(G * m), Eigen::MatrixXd(G * m, covariate ? 2 : 1), std::vector<int>(G * m)};
  for (int g = 0; g < G; ++g) {
    const double b = rng.normal(0, sd_b);
    for (int i = 0; i < m; ++i) {
      const int r = g * m + i;
      d.X(r, 0) = 1;
      double mu = 1.0 + b;
      if (covariate) {
        d.X(r, 1) = rng.normal();
        mu += -0.2 * d.X(r, 1);
      }
      d.y(r) = mu + rng.normal(0, sd_e);
      d.g[r] = g * 7 + 3;  // arbitrary labels
    }
  }
  return d;
}

}  // namespace

TEST(Mixed, BalancedOneWayMatchesMomentEstimator) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto d = grouped(seed, 0.6, 0.4, 15, 8, false);
    const auto fit = mixed_random_intercept(d.y, d.X, d.g, {"intercept"});
    std::vector<std::vector<double>> groups(15);
    for (int r = 0; r < d.y.size(); ++r) groups[r / 8].push_back(d.y(r));
    const double ref = oracle::one_way_between_variance(groups);
    if (ref > 0) {
      EXPECT_NEAR(fit.group_variance, ref, 1e-6 * std::max(1.0, ref)) << "seed " << seed;
    } else {
      EXPECT_TRUE(fit.collapsed_to_ols);
    }
  }
}

TEST(Mixed, RecoversVarianceComponents) {
  std::vector<double> s2b, s2e;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto d = grouped(seed, 0.5, 0.3, 40, 25, true);
    const auto fit = mixed_random_intercept(d.y, d.X, d.g, {"intercept", "x"});
    s2b.push_back(fit.group_variance);
    s2e.push_back(fit.residual_variance);
    EXPECT_TRUE(fit.converged);
  }
  std::sort(s2b.begin(), s2b.end());
  std::sort(s2e.begin(), s2e.end());
  const double mb = 0.5 * (s2b[9] + s2b[10]), me = 0.5 * (s2e[9] + s2e[10]);
  EXPECT_NEAR(mb, 0.25, 0.3 * 0.25);
  EXPECT_NEAR(me, 0.09, 0.3 * 0.09);
}

TEST(Mixed, OptimumBeatsGrid) {
  const auto d = grouped(4, 0.3, 0.5, 12, 10, true);
  const auto fit = mixed_random_intercept(d.y, d.X, d.g, {"intercept", "x"});
  ASSERT_FALSE(fit.collapsed_to_ols);
  const double at = reml_criterion(d.y, d.X, d.g, std::exp(fit.log_ratio));
  EXPECT_NEAR(at, fit.reml_criterion, 1e-9 * std::abs(at));
  for (int i = 0; i < 64; ++i) {
    const double lr = -12.0 + 24.0 * i / 63.0;
    EXPECT_LE(fit.reml_criterion, reml_criterion(d.y, d.X, d.g, std::exp(lr)) + 1e-9);
  }
}

TEST(Mixed, ZeroGroupVarianceCollapsesToOls) {
  // Group means of y are identical, so the between-group variance estimate is zero.
  Eigen::MatrixXd X(12, 1);
  X.setOnes();
  Eigen::VectorXd y(12);
  y << 1, 2, 3, 3, 2, 1, 2, 1, 3, 1, 3, 2;
  std::vector<int> g = {0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
  const auto fit = mixed_random_intercept(y, X, g, {"intercept"});
  EXPECT_TRUE(fit.collapsed_to_ols);
  EXPECT_FALSE(fit.warning.empty());
  EXPECT_EQ(fit.group_variance, 0.0);
  const auto o = ols(y, X, {"intercept"});
  EXPECT_NEAR(fit.coef("intercept").estimate, o.coef("intercept").estimate, 1e-12);
  EXPECT_NEAR(fit.coef("intercept").se, o.coef("intercept").se, 1e-12);
}

TEST(Mixed, Errors) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(6, 1);
  Eigen::VectorXd y(6);
  y << 1, 2, 3, 4, 5, 6;
  std::vector<int> one_group(6, 0);
  EXPECT_EQ(code_of([&] { mixed_random_intercept(y, X, one_group, {"i"}); }), Errc::Singular);
  std::vector<int> short_groups = {0, 1};
  EXPECT_EQ(code_of([&] { mixed_random_intercept(y, X, short_groups, {"i"}); }), Errc::LengthMismatch);
}
