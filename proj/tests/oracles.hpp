#pragma once

// Brute-force reference computations used by the tests. They deliberately share
// no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

inline std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

// Full (n+1) x (m+1) table.
inline std::size_t levenshtein(std::string_view a8, std::string_view b8) {
  const auto a = decode_utf8(a8), b = decode_utf8(b8);
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return d[a.size()][b.size()];
}

// Raw-sum formula in extended precision.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += (long double)x[i] * x[i];
    syy += (long double)y[i] * y[i];
    sxy += (long double)x[i] * y[i];
  }
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

template <class F>
double simpson(F f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const long double h = ((long double)b - a) / intervals;
  long double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(a + i * h);
  return static_cast<double>(s * h / 3.0L);
}

inline double t_density(double t, double df) {
  return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI) -
                  (df + 1) / 2 * std::log1p(t * t / df));
}

// Upper tail mass beyond |t|. For |t| >= 1 the tail is integrated directly
// after substituting x = |t| / s, s in (0, 1], which avoids cancellation for
// small p; otherwise 0.5 minus the mass over [0, |t|].
inline double t_tail(double t, double df) {
  const double a = std::abs(t);
  if (a >= 1.0) {
    auto g = [&](double s) { return s <= 0.0 ? 0.0 : t_density(a / s, df) * a / (s * s); };
    return simpson(g, 0.0, 1.0, 200000);
  }
  return 0.5 - simpson([&](double x) { return t_density(x, df); }, 0.0, a, 200000);
}

inline double t_two_sided_p(double t, double df) { return 2.0 * t_tail(t, df); }

inline double t_cdf(double t, double df) { return t >= 0 ? 1.0 - t_tail(t, df) : t_tail(t, df); }

// F survival through the Beta(d1/2, d2/2) density of X = d1 F / (d1 F + d2),
// integrated over [x0, 1] after substituting x = u^2 (removes the x^(-1/2)
// singularity for d1 = 1).
inline double f_survival(double f, double d1, double d2) {
  const double a = d1 / 2, b = d2 / 2;
  const double x0 = d1 * f / (d1 * f + d2);
  const double logB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto dens = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return (u >= 1.0 && b == 1.0) ? 2.0 * std::exp((2 * a - 1) * std::log(u) - logB) : 0.0;
    return 2.0 * std::exp((2 * a - 1) * std::log(u) + (b - 1) * std::log1p(-u * u) - logB);
  };
  return simpson(dens, std::sqrt(x0), 1.0, 400000);
}

// Solves (X'X) b = X'y by Gaussian elimination with partial pivoting in long double.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& X,
                                            const std::vector<double>& y) {
  const std::size_t p = X[0].size();
  std::vector<std::vector<long double>> A(p, std::vector<long double>(p + 1, 0));
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) A[r][c] += (long double)X[i][r] * X[i][c];
      A[r][p] += (long double)X[i][r] * y[i];
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < p; ++r) {
      if (std::fabs(A[r][k]) > std::fabs(A[piv][k])) piv = r;
    }
    std::swap(A[k], A[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == k) continue;
      const long double m = A[r][k] / A[k][k];
      for (std::size_t c = k; c <= p; ++c) A[r][c] -= m * A[k][c];
    }
  }
  std::vector<double> b(p);
  for (std::size_t k = 0; k < p; ++k) b[k] = static_cast<double>(A[k][p] / A[k][k]);
  return b;
}

struct TwoWaySS {
  double a, b, ab, residual, total;
};

// Explicit decomposition for a balanced 2 x 2 layout with levels 0/1.
inline TwoWaySS two_way_ss(const std::vector<double>& y, const std::vector<int>& fa,
                           const std::vector<int>& fb) {
  long double grand = 0, ma[2] = {0, 0}, mb[2] = {0, 0}, cell[2][2] = {{0, 0}, {0, 0}};
  int na[2] = {0, 0}, nb[2] = {0, 0}, nc[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < y.size(); ++i) {
    grand += y[i];
    ma[fa[i]] += y[i];
    mb[fb[i]] += y[i];
    cell[fa[i]][fb[i]] += y[i];
    ++na[fa[i]];
    ++nb[fb[i]];
    ++nc[fa[i]][fb[i]];
  }
  grand /= y.size();
  for (int k = 0; k < 2; ++k) {
    ma[k] /= na[k];
    mb[k] /= nb[k];
    for (int l = 0; l < 2; ++l) cell[k][l] /= nc[k][l];
  }
  TwoWaySS s{0, 0, 0, 0, 0};
  long double a = 0, b = 0, ab = 0, res = 0, tot = 0;
  for (int k = 0; k < 2; ++k) {
    a += na[k] * (ma[k] - grand) * (ma[k] - grand);
    b += nb[k] * (mb[k] - grand) * (mb[k] - grand);
    for (int l = 0; l < 2; ++l) {
      const long double e = cell[k][l] - ma[k] - mb[l] + grand;
      ab += nc[k][l] * e * e;
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    res += (y[i] - cell[fa[i]][fb[i]]) * (y[i] - cell[fa[i]][fb[i]]);
    tot += (y[i] - grand) * (y[i] - grand);
  }
  s.a = a;
  s.b = b;
  s.ab = ab;
  s.residual = res;
  s.total = tot;
  return s;
}

// Method-of-moments between-group variance for a balanced one-way layout.
inline double one_way_between_variance(const std::vector<std::vector<double>>& groups) {
  const double m = groups[0].size();
  const double k = groups.size();
  long double grand = 0;
  std::vector<long double> means;
  for (const auto& g : groups) {
    long double s = 0;
    for (double v : g) s += v;
    means.push_back(s / m);
    grand += s;
  }
  grand /= k * m;
  long double ssb = 0, ssw = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    ssb += m * (means[i] - grand) * (means[i] - grand);
    for (double v : groups[i]) ssw += (v - means[i]) * (v - means[i]);
  }
  const double msb = static_cast<double>(ssb / (k - 1));
  const double msw = static_cast<double>(ssw / (k * (m - 1)));
  return std::max(0.0, (msb - msw) / m);
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 1e-300) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), abs_floor});
}

}  // namespace oracle
