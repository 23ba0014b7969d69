#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Self-contained statistics engine: correlation, Fisher transform, Student-t and
// F distributions, t-tests, balanced 2x2 ANOVA, OLS and a random-intercept
// linear mixed model fitted by profiled REML.
namespace dyadic::stats {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // n - 1 denominator

// Product-moment correlation. Requires n >= 3 and nonzero variances.
double pearson(std::span<const double> x, std::span<const double> y);

// atanh(r); throws OutOfRange unless |r| < 1.
double fisher_z(double r);

inline constexpr double kCorrelationClamp = 1e-7;
// Clamps r into [-(1 - eps), 1 - eps].
double clamp_correlation(double r, double eps = kCorrelationClamp);

// ---------------------------------------------------------------------------
// Distributions

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction
// (relative tolerance 1e-16, at most 20000 terms), using the symmetry
// I_x(a,b) = 1 - I_{1-x}(b,a) when x > (a+1)/(a+b+2).
double incomplete_beta(double a, double b, double x);

double normal_cdf(double z);
double student_t_cdf(double t, double df);
double student_t_two_sided_p(double t, double df);
// Upper tail P(F > f) for F(d1, d2).
double f_survival(double f, double d1, double d2);

// ---------------------------------------------------------------------------
// Tests

struct TTestResult {
  double t = 0;
  double df = 0;
  double p_two_sided = 1;
  double mean = 0;
  double se = 0;
};

TTestResult one_sample_t(std::span<const double> xs, double mu0 = 0.0);
// One-sample t on the differences a - b.
TTestResult paired_t(std::span<const double> a, std::span<const double> b);

struct AnovaEffect {
  std::string name;
  double ss = 0;
  double df = 0;
  double f = 0;
  double p = 1;
};

struct AnovaTable {
  std::vector<AnovaEffect> effects;  // A, B, A:B
  double residual_ss = 0;
  double residual_df = 0;
  double total_ss = 0;
  int cell_n = 0;
  bool residual_zero = false;  // F for nonzero effects is +inf

  const AnovaEffect& effect(std::string_view name) const;
};

// Balanced two-way layout; factor levels are 0/1. Throws EmptyCell or Unbalanced.
AnovaTable anova_2x2(std::span<const double> values, std::span<const int> factor_a,
                     std::span<const int> factor_b, std::string name_a = "A",
                     std::string name_b = "B");

// ---------------------------------------------------------------------------
// Regression

struct Coefficient {
  std::string name;
  double estimate = 0;
  double se = 0;
  double t = 0;
  double p = 1;
};

struct RegressionFit {
  std::vector<Coefficient> coefficients;
  Eigen::MatrixXd covariance;  // of the coefficient estimates
  Eigen::VectorXd residuals;
  double residual_variance = 0;
  int n = 0;
  int df_residual = 0;
  std::vector<std::string> columns;

  const Coefficient& coef(std::string_view name) const;
  Eigen::VectorXd estimates() const;
};

// Least squares via Householder QR. Requires n > p and full column rank
// (RankDeficient otherwise).
RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                  std::vector<std::string> columns);

// Linear combination w' beta with its standard error, t and two-sided p.
Coefficient linear_combination(const std::vector<Coefficient>& coefficients,
                               const Eigen::MatrixXd& covariance, const Eigen::VectorXd& weights,
                               double df, std::string name);

struct MixedFit {
  std::vector<Coefficient> coefficients;
  Eigen::MatrixXd covariance;
  double group_variance = 0;     // sigma^2_b
  double residual_variance = 0;  // sigma^2_e
  double reml_criterion = 0;     // -2 restricted log-likelihood at the optimum
  double log_ratio = 0;          // log(sigma^2_b / sigma^2_e); -inf when collapsed
  bool converged = false;
  bool collapsed_to_ols = false;  // between-group variance estimated at zero
  std::string warning;
  int n = 0;
  int n_groups = 0;
  int df_residual = 0;
  std::vector<std::string> columns;

  const Coefficient& coef(std::string_view name) const;
  Eigen::VectorXd estimates() const;
};

struct MixedOptions {
  double log_ratio_min = -12.0;
  double log_ratio_max = 12.0;
  int grid_points = 64;
  double tolerance = 1e-8;  // on log variance ratio
  int max_iterations = 200;
};

// y = X beta + b_group + e with b ~ N(0, s2b), e ~ N(0, s2e). Group labels are
// arbitrary integers. For a fixed ratio lambda = s2b / s2e the generalized least
// squares solution is closed-form per group (Sherman-Morrison), so the fit is a
// scalar search over log lambda: a grid scan followed by Brent refinement.
MixedFit mixed_random_intercept(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                std::span<const int> groups, std::vector<std::string> columns,
                                const MixedOptions& options = {});

// -2 restricted log-likelihood profiled over beta and s2e at variance ratio
// lambda (lambda = 0 gives the OLS restricted likelihood).
double reml_criterion(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      std::span<const int> groups, double lambda);

}  // namespace dyadic::stats
