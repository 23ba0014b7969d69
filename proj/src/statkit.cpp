#include "dyadic/statkit.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "dyadic/error.hpp"

namespace dyadic::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Continued fraction for I_x(a,b) (modified Lentz). y = 1 - x supplied by the caller.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxTerms = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(Errc::InsufficientPairs, "mean of empty series");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(Errc::InsufficientPairs, "variance needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "pearson: series differ in length");
  if (x.size() < 3) throw Error(Errc::InsufficientPairs, "pearson needs at least 3 pairs");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ZeroVariance, "pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double fisher_z(double r) {
  if (!(std::fabs(r) < 1.0)) throw Error(Errc::OutOfRange, "fisher_z requires |r| < 1");
  return std::atanh(r);
}

double clamp_correlation(double r, double eps) { return std::clamp(r, -(1.0 - eps), 1.0 - eps); }

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error(Errc::OutOfRange, "incomplete_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::OutOfRange, "incomplete_beta: x outside [0,1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::OutOfRange, "t distribution needs df > 0");
  if (std::isnan(t)) return kNaN;
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  return std::clamp(incomplete_beta_xy(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2)), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double f_survival(double f, double d1, double d2) {
  if (!(d1 > 0.0 && d2 > 0.0)) throw Error(Errc::OutOfRange, "F distribution needs d1, d2 > 0");
  if (std::isnan(f)) return kNaN;
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double denom = d2 + d1 * f;
  return std::clamp(incomplete_beta_xy(0.5 * d2, 0.5 * d1, d2 / denom, d1 * f / denom), 0.0, 1.0);
}

TTestResult one_sample_t(std::span<const double> xs, double mu0) {
  if (xs.size() < 2) throw Error(Errc::InsufficientPairs, "t-test needs at least 2 values");
  const double var = sample_variance(xs);
  if (var == 0.0) throw Error(Errc::ZeroVariance, "t-test on constant series");
  TTestResult r;
  r.mean = mean(xs);
  r.df = static_cast<double>(xs.size() - 1);
  r.se = std::sqrt(var / static_cast<double>(xs.size()));
  r.t = (r.mean - mu0) / r.se;
  r.p_two_sided = student_t_two_sided_p(r.t, r.df);
  return r;
}

TTestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "paired t: series differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return one_sample_t(d, 0.0);
}

const AnovaEffect& AnovaTable::effect(std::string_view name) const {
  for (const auto& e : effects)
    if (e.name == name) return e;
  throw Error(Errc::OutOfRange, "no ANOVA effect named " + std::string(name));
}

AnovaTable anova_2x2(std::span<const double> values, std::span<const int> factor_a,
                     std::span<const int> factor_b, std::string name_a, std::string name_b) {
  if (values.size() != factor_a.size() || values.size() != factor_b.size()) {
    throw Error(Errc::LengthMismatch, "anova_2x2: values and factors differ in length");
  }
  double sum[2][2] = {{0, 0}, {0, 0}};
  int count[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int a = factor_a[i];
    const int b = factor_b[i];
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
      throw Error(Errc::OutOfRange, "anova_2x2: factor levels must be 0 or 1");
    }
    sum[a][b] += values[i];
    ++count[a][b];
  }
  for (auto& row : count)
    for (int c : row)
      if (c == 0) throw Error(Errc::EmptyCell, "anova_2x2: a cell has no observations");
  const int n = count[0][0];
  if (count[0][1] != n || count[1][0] != n || count[1][1] != n) {
    throw Error(Errc::Unbalanced, "anova_2x2: cells differ in size");
  }

  double cell[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) cell[a][b] = sum[a][b] / n;
  const double grand = (cell[0][0] + cell[0][1] + cell[1][0] + cell[1][1]) / 4.0;
  const double ma[2] = {(cell[0][0] + cell[0][1]) / 2.0, (cell[1][0] + cell[1][1]) / 2.0};
  const double mb[2] = {(cell[0][0] + cell[1][0]) / 2.0, (cell[0][1] + cell[1][1]) / 2.0};

  AnovaTable t;
  t.cell_n = n;
  double ss_a = 0, ss_b = 0, ss_ab = 0;
  for (int i = 0; i < 2; ++i) {
    ss_a += 2.0 * n * (ma[i] - grand) * (ma[i] - grand);
    ss_b += 2.0 * n * (mb[i] - grand) * (mb[i] - grand);
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double inter = cell[a][b] - ma[a] - mb[b] + grand;
      ss_ab += n * inter * inter;
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = values[i] - cell[factor_a[i]][factor_b[i]];
    t.residual_ss += r * r;
    t.total_ss += (values[i] - grand) * (values[i] - grand);
  }
  t.residual_df = 4.0 * n - 4.0;
  t.residual_zero = t.residual_ss <= 1e-14 * std::max(1.0, t.total_ss);

  auto make = [&](std::string name, double ss) {
    AnovaEffect e{std::move(name), ss, 1.0, 0.0, 1.0};
    if (ss <= 1e-14 * std::max(1.0, t.total_ss)) return e;  // F = 0
    if (t.residual_zero || t.residual_df <= 0) {
      e.f = t.residual_zero ? kInf : kNaN;
      e.p = t.residual_zero ? 0.0 : kNaN;
      return e;
    }
    e.f = ss / (t.residual_ss / t.residual_df);
    e.p = f_survival(e.f, 1.0, t.residual_df);
    return e;
  };
  t.effects.push_back(make(name_a, ss_a));
  t.effects.push_back(make(name_b, ss_b));
  t.effects.push_back(make(name_a + ":" + name_b, ss_ab));
  return t;
}

// ---------------------------------------------------------------------------

namespace {

const Coefficient& find_coef(const std::vector<Coefficient>& cs, std::string_view name) {
  for (const auto& c : cs)
    if (c.name == name) return c;
  throw Error(Errc::OutOfRange, "no coefficient named " + std::string(name));
}

std::vector<Coefficient> make_coefficients(const Eigen::VectorXd& beta, const Eigen::MatrixXd& cov,
                                           const std::vector<std::string>& names, double df) {
  std::vector<Coefficient> out;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Coefficient c;
    c.name = names[j];
    c.estimate = beta(j);
    c.se = std::sqrt(std::max(0.0, cov(j, j)));
    c.t = c.se > 0.0 ? c.estimate / c.se : (c.estimate == 0.0 ? 0.0 : std::copysign(kInf, c.estimate));
    c.p = df > 0.0 ? student_t_two_sided_p(c.t, df) : kNaN;
    out.push_back(std::move(c));
  }
  return out;
}

void check_design(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                  const std::vector<std::string>& columns) {
  if (X.rows() != y.size()) throw Error(Errc::LengthMismatch, "design rows differ from y length");
  if (static_cast<Eigen::Index>(columns.size()) != X.cols()) {
    throw Error(Errc::LengthMismatch, "column names differ from design width");
  }
  if (X.rows() <= X.cols()) {
    throw Error(Errc::RankDeficient, "need more observations than design columns");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw Error(Errc::RankDeficient, "design matrix is rank deficient");
}

}  // namespace

const Coefficient& RegressionFit::coef(std::string_view name) const {
  return find_coef(coefficients, name);
}

Eigen::VectorXd RegressionFit::estimates() const {
  Eigen::VectorXd b(coefficients.size());
  for (std::size_t j = 0; j < coefficients.size(); ++j) b(j) = coefficients[j].estimate;
  return b;
}

RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                  std::vector<std::string> columns) {
  check_design(y, X, columns);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));

  RegressionFit fit;
  fit.n = static_cast<int>(n);
  fit.df_residual = static_cast<int>(n - p);
  fit.residuals = y - X * beta;
  fit.residual_variance = fit.residuals.squaredNorm() / static_cast<double>(n - p);
  fit.covariance = fit.residual_variance * (r_inv * r_inv.transpose());
  fit.coefficients = make_coefficients(beta, fit.covariance, columns, fit.df_residual);
  fit.columns = std::move(columns);
  return fit;
}

Coefficient linear_combination(const std::vector<Coefficient>& coefficients,
                               const Eigen::MatrixXd& covariance, const Eigen::VectorXd& weights,
                               double df, std::string name) {
  if (static_cast<std::size_t>(weights.size()) != coefficients.size()) {
    throw Error(Errc::LengthMismatch, "contrast weights differ from coefficient count");
  }
  Coefficient c;
  c.name = std::move(name);
  for (Eigen::Index j = 0; j < weights.size(); ++j) c.estimate += weights(j) * coefficients[j].estimate;
  c.se = std::sqrt(std::max(0.0, weights.dot(covariance * weights)));
  c.t = c.se > 0.0 ? c.estimate / c.se : (c.estimate == 0.0 ? 0.0 : std::copysign(kInf, c.estimate));
  c.p = df > 0.0 ? student_t_two_sided_p(c.t, df) : kNaN;
  return c;
}

// ---------------------------------------------------------------------------
// Random-intercept model

namespace {

// Per-group sufficient statistics; every REML evaluation is O(groups * p^2).
struct GroupStats {
  std::vector<double> n;
  std::vector<Eigen::MatrixXd> xtx;
  std::vector<Eigen::VectorXd> xt1;
  std::vector<Eigen::VectorXd> xty;
  std::vector<double> sum_y;
  std::vector<double> yty;
  Eigen::Index p = 0;
  Eigen::Index n_total = 0;
};

GroupStats group_stats(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       std::span<const int> groups) {
  if (static_cast<Eigen::Index>(groups.size()) != y.size()) {
    throw Error(Errc::LengthMismatch, "group labels differ from y length");
  }
  std::map<int, std::size_t> index;
  for (int g : groups) index.emplace(g, 0);
  std::size_t k = 0;
  for (auto& [label, slot] : index) slot = k++;

  GroupStats s;
  s.p = X.cols();
  s.n_total = X.rows();
  const std::size_t G = index.size();
  s.n.assign(G, 0.0);
  s.xtx.assign(G, Eigen::MatrixXd::Zero(s.p, s.p));
  s.xt1.assign(G, Eigen::VectorXd::Zero(s.p));
  s.xty.assign(G, Eigen::VectorXd::Zero(s.p));
  s.sum_y.assign(G, 0.0);
  s.yty.assign(G, 0.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const std::size_t g = index[groups[i]];
    const Eigen::VectorXd xi = X.row(i).transpose();
    s.n[g] += 1.0;
    s.xtx[g].noalias() += xi * xi.transpose();
    s.xt1[g] += xi;
    s.xty[g] += xi * y(i);
    s.sum_y[g] += y(i);
    s.yty[g] += y(i) * y(i);
  }
  return s;
}

struct GlsSolution {
  Eigen::VectorXd beta;
  Eigen::MatrixXd a_inv;  // (X' V^-1 X)^-1 with V = I + lambda Z Z'
  double quad = 0;        // r' V^-1 r
  double log_det_v = 0;
  double log_det_a = 0;
  double criterion = 0;
};

GlsSolution solve_gls(const GroupStats& s, double lambda) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(s.p, s.p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s.p);
  double yvy = 0.0;
  double log_det_v = 0.0;
  for (std::size_t g = 0; g < s.n.size(); ++g) {
    const double c = lambda / (1.0 + lambda * s.n[g]);
    A += s.xtx[g] - c * s.xt1[g] * s.xt1[g].transpose();
    b += s.xty[g] - c * s.xt1[g] * s.sum_y[g];
    yvy += s.yty[g] - c * s.sum_y[g] * s.sum_y[g];
    log_det_v += std::log1p(lambda * s.n[g]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(Errc::Singular, "X' V^-1 X is not positive definite");
  }
  GlsSolution sol;
  sol.beta = ldlt.solve(b);
  sol.a_inv = ldlt.solve(Eigen::MatrixXd::Identity(s.p, s.p));
  const double dof = static_cast<double>(s.n_total - s.p);
  sol.quad = std::max(yvy - b.dot(sol.beta), std::numeric_limits<double>::min() * dof);
  sol.log_det_v = log_det_v;
  sol.log_det_a = ldlt.vectorD().array().log().sum();
  sol.criterion = dof * (1.0 + std::log(2.0 * std::numbers::pi * sol.quad / dof)) +
                  sol.log_det_v + sol.log_det_a;
  return sol;
}

}  // namespace

const Coefficient& MixedFit::coef(std::string_view name) const {
  return find_coef(coefficients, name);
}

Eigen::VectorXd MixedFit::estimates() const {
  Eigen::VectorXd b(coefficients.size());
  for (std::size_t j = 0; j < coefficients.size(); ++j) b(j) = coefficients[j].estimate;
  return b;
}

double reml_criterion(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      std::span<const int> groups, double lambda) {
  return solve_gls(group_stats(y, X, groups), lambda).criterion;
}

MixedFit mixed_random_intercept(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                std::span<const int> groups, std::vector<std::string> columns,
                                const MixedOptions& options) {
  check_design(y, X, columns);
  const GroupStats s = group_stats(y, X, groups);
  if (s.n.size() < 2) throw Error(Errc::Singular, "random intercept needs at least 2 groups");
  if (X.rows() <= X.cols() + 1) {
    throw Error(Errc::Singular, "need n > p + 1 observations for REML");
  }

  auto objective = [&](double log_ratio) { return solve_gls(s, std::exp(log_ratio)).criterion; };

  // Grid scan brackets the global minimum, Brent refines it.
  const int m = std::max(3, options.grid_points);
  const double lo = options.log_ratio_min;
  const double hi = options.log_ratio_max;
  const double step = (hi - lo) / (m - 1);
  int best = 0;
  double best_value = kInf;
  for (int i = 0; i < m; ++i) {
    const double v = objective(lo + step * i);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + step * std::max(0, best - 1);
  const double b = lo + step * std::min(m - 1, best + 1);
  // Brent's relative precision 2^(1-bits) ~ tolerance.
  const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(options.tolerance))), 8, 50);
  std::uintmax_t iterations = static_cast<std::uintmax_t>(options.max_iterations);
  auto [t_opt, v_opt] = boost::math::tools::brent_find_minima(objective, a, b, bits, iterations);
  if (best_value < v_opt) {
    t_opt = lo + step * best;
    v_opt = best_value;
  }

  MixedFit fit;
  fit.n = static_cast<int>(X.rows());
  fit.n_groups = static_cast<int>(s.n.size());
  fit.df_residual = static_cast<int>(X.rows() - X.cols());
  fit.converged = iterations < static_cast<std::uintmax_t>(options.max_iterations);

  const double dof = static_cast<double>(fit.df_residual);
  const GlsSolution at_zero = solve_gls(s, 0.0);
  if (at_zero.criterion <= v_opt) {
    // Between-group variance at the boundary: the model is ordinary least squares.
    RegressionFit o = ols(y, X, columns);
    fit.coefficients = std::move(o.coefficients);
    fit.covariance = std::move(o.covariance);
    fit.residual_variance = o.residual_variance;
    fit.group_variance = 0.0;
    fit.reml_criterion = at_zero.criterion;
    fit.log_ratio = -kInf;
    fit.collapsed_to_ols = true;
    fit.converged = true;
    fit.warning = "between-group variance estimated at zero; collapsed to OLS";
    fit.columns = std::move(columns);
    return fit;
  }

  if (!std::isfinite(v_opt)) throw Error(Errc::NotConverged, "REML criterion is not finite");
  const double lambda = std::exp(t_opt);
  const GlsSolution sol = solve_gls(s, lambda);
  fit.residual_variance = sol.quad / dof;
  fit.group_variance = lambda * fit.residual_variance;
  fit.reml_criterion = sol.criterion;
  fit.log_ratio = t_opt;
  fit.covariance = fit.residual_variance * sol.a_inv;
  fit.coefficients = make_coefficients(sol.beta, fit.covariance, columns, dof);
  fit.columns = std::move(columns);
  if (t_opt >= hi - step) fit.warning = "variance ratio at the upper search bound";
  return fit;
}

}  // namespace dyadic::stats
