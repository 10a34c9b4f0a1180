// SPDX-License-Identifier: Apache-2.0
//
// Self-contained statistical kernel: midrank assignment, the
// Mann-Whitney U test (normal approximation and exact small-sample mode),
// ordinary least squares with standard errors and standardized
// coefficients, and the distribution functions those tests need.
#ifndef FUNNELCAST_STATS_HPP
#define FUNNELCAST_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace funnelcast {

// --- Distribution functions -------------------------------------------------

/// Standard normal CDF. Accurate to well under 1e-10 over the real line.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

/// Two-sided normal p-value 2(1 - Phi(|z|)), evaluated as erfc(|z|/sqrt 2)
/// so extreme statistics keep their true tiny magnitude instead of
/// rounding to zero.
inline double normal_two_sided_p(double z) {
  return std::clamp(std::erfc(std::fabs(z) * M_SQRT1_2), 0.0, 1.0);
}

namespace detail {

/// Continued-fraction core of the regularized incomplete beta function
/// (modified Lentz algorithm).
inline double beta_cf(double a, double b, double x) {
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b), evaluated by continued fraction.
/// Stable for the large degrees of freedom needed by t tests.
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
  return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Student-t CDF with integer degrees of freedom.
inline double student_t_cdf(double t, int df) {
  if (df < 1) throw std::invalid_argument("student_t_cdf requires df >= 1");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

// --- Ranks and the Mann-Whitney test -----------------------------------------

/// Midrank assignment: tied values receive the average of the ranks they
/// span, so the rank sum is always n(n+1)/2.
inline std::vector<double> rank_with_ties(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
    i = j + 1;
  }
  return ranks;
}

enum class RankTestMode { NormalApprox, Exact };

struct RankTestResult {
  double u1 = 0;            // R_a - n_a(n_a+1)/2
  double u2 = 0;            // n_a*n_b - u1
  double u = 0;             // reported statistic: min(u1, u2)
  double rank_sum_a = 0;
  double rank_sum_b = 0;
  double z = 0;             // signed by group-a rank elevation
  double p_two_sided = 1;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool tie_corrected = false;
  bool degenerate = false;  // all pooled observations equal
  RankTestMode mode = RankTestMode::NormalApprox;
};

namespace detail {

inline double mwu_sigma(std::size_t n_a, std::size_t n_b, std::span<const double> pooled_sorted,
                        bool tie_correction) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double n = na + nb;
  double variance = na * nb * (n + 1.0) / 12.0;
  if (tie_correction && n > 1.0) {
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pooled_sorted.size()) {
      std::size_t j = i;
      while (j + 1 < pooled_sorted.size() && pooled_sorted[j + 1] == pooled_sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  }
  return variance > 0.0 ? std::sqrt(variance) : 0.0;
}

/// Distribution of the scaled rank sum (twice the midrank sum, an integer)
/// over all ways of choosing n_a of the pooled observations. Counts fit in
/// doubles exactly for n <= 20.
inline std::vector<std::vector<double>> rank_sum_distribution(
    const std::vector<std::int64_t>& scaled_ranks, std::size_t n_a) {
  const std::int64_t total = std::accumulate(scaled_ranks.begin(), scaled_ranks.end(),
                                             std::int64_t{0});
  std::vector<std::vector<double>> ways(n_a + 1,
                                        std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
  ways[0][0] = 1.0;
  for (const std::int64_t r : scaled_ranks) {
    for (std::size_t j = n_a; j >= 1; --j) {
      auto& dst = ways[j];
      const auto& src = ways[j - 1];
      for (std::int64_t s = total - r; s >= 0; --s) {
        if (src[static_cast<std::size_t>(s)] != 0.0)
          dst[static_cast<std::size_t>(s + r)] += src[static_cast<std::size_t>(s)];
      }
    }
  }
  return ways;
}

}  // namespace detail

/// Mann-Whitney U test of sample_a against sample_b.
///
/// U1 = R_a - n_a(n_a+1)/2 with midranks over the pooled data; the
/// reported U is min(U1, U2). The normal approximation uses
/// Z = (U1 - n_a n_b / 2) / sigma with no continuity correction and the
/// tie-corrected variance only when requested; p = 2(1 - Phi(|Z|)). When
/// all pooled observations are equal the variance degenerates and the
/// result is Z = 0, p = 1. Exact mode (n_a + n_b <= 20) computes the
/// two-sided p as P(min(U1', U2') <= min(U1, U2)) by full enumeration of
/// the permutation distribution of U over group assignments.
inline RankTestResult mann_whitney(std::span<const double> sample_a,
                                   std::span<const double> sample_b,
                                   bool tie_correction = false,
                                   RankTestMode mode = RankTestMode::NormalApprox) {
  const std::size_t n_a = sample_a.size();
  const std::size_t n_b = sample_b.size();
  if (n_a == 0 || n_b == 0) throw std::invalid_argument("mann_whitney requires non-empty samples");
  if (mode == RankTestMode::Exact && n_a + n_b > 20)
    throw std::invalid_argument("exact mode requires n_a + n_b <= 20");

  std::vector<double> pooled;
  pooled.reserve(n_a + n_b);
  pooled.insert(pooled.end(), sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  const std::vector<double> ranks = rank_with_ties(pooled);

  RankTestResult res;
  res.n_a = n_a;
  res.n_b = n_b;
  res.tie_corrected = tie_correction;
  res.mode = mode;
  for (std::size_t i = 0; i < n_a; ++i) res.rank_sum_a += ranks[i];
  for (std::size_t i = n_a; i < n_a + n_b; ++i) res.rank_sum_b += ranks[i];

  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  res.u1 = res.rank_sum_a - na * (na + 1.0) / 2.0;
  res.u2 = na * nb - res.u1;
  res.u = std::min(res.u1, res.u2);

  std::vector<double> pooled_sorted = pooled;
  std::sort(pooled_sorted.begin(), pooled_sorted.end());
  const double sigma = detail::mwu_sigma(n_a, n_b, pooled_sorted, tie_correction);
  const bool all_equal = pooled_sorted.front() == pooled_sorted.back();
  if (sigma == 0.0 || all_equal) {
    res.degenerate = true;
    res.z = 0.0;
    res.p_two_sided = 1.0;
    if (mode == RankTestMode::NormalApprox) return res;
  } else {
    res.z = (res.u1 - na * nb / 2.0) / sigma;
    res.p_two_sided = normal_two_sided_p(res.z);
  }

  if (mode == RankTestMode::Exact) {
    std::vector<std::int64_t> scaled(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i)
      scaled[i] = static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));
    const auto ways = detail::rank_sum_distribution(scaled, n_a);
    // Scaled statistic: 2*U1 = 2*R_a - n_a(n_a+1).
    const std::int64_t offset = static_cast<std::int64_t>(n_a) * (static_cast<std::int64_t>(n_a) + 1);
    const std::int64_t two_nanb = 2 * static_cast<std::int64_t>(n_a) * static_cast<std::int64_t>(n_b);
    const std::int64_t obs_min =
        static_cast<std::int64_t>(std::llround(2.0 * res.u));
    double extreme = 0.0;
    double total = 0.0;
    const auto& row = ways[n_a];
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] == 0.0) continue;
      total += row[s];
      const std::int64_t two_u1 = static_cast<std::int64_t>(s) - offset;
      const std::int64_t two_min = std::min(two_u1, two_nanb - two_u1);
      if (two_min <= obs_min) extreme += row[s];
    }
    res.p_two_sided = extreme / total;
  }
  return res;
}

/// Recovers the test statistics from a published group-a rank sum. With no
/// tie information the plain (uncorrected) normal approximation is used.
inline RankTestResult mann_whitney_from_rank_sum(double rank_sum_a, std::size_t n_a,
                                                 std::size_t n_b) {
  if (n_a == 0 || n_b == 0) throw std::invalid_argument("group sizes must be positive");
  RankTestResult res;
  res.n_a = n_a;
  res.n_b = n_b;
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double n = na + nb;
  res.rank_sum_a = rank_sum_a;
  res.rank_sum_b = n * (n + 1.0) / 2.0 - rank_sum_a;
  res.u1 = rank_sum_a - na * (na + 1.0) / 2.0;
  res.u2 = na * nb - res.u1;
  res.u = std::min(res.u1, res.u2);
  const double sigma = std::sqrt(na * nb * (n + 1.0) / 12.0);
  if (sigma == 0.0) {
    res.degenerate = true;
    res.z = 0.0;
    res.p_two_sided = 1.0;
    return res;
  }
  res.z = (res.u1 - na * nb / 2.0) / sigma;
  res.p_two_sided = normal_two_sided_p(res.z);
  return res;
}

// --- Ordinary least squares ---------------------------------------------------

class RankDeficient : public std::runtime_error {
 public:
  explicit RankDeficient(int column)
      : std::runtime_error("rank-deficient design matrix at column " + std::to_string(column)),
        column_(column) {}
  /// Index into the regressor matrix (-1 when the intercept column is the
  /// dependent one).
  int column() const { return column_; }

 private:
  int column_;
};

/// Regression output. Index 0 is the intercept, indices 1..k follow the
/// regressor order. The standardized coefficient of the intercept does not
/// exist, hence the optional.
struct OlsResult {
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> t_statistics;
  std::vector<double> p_values;
  std::vector<std::optional<double>> standardized;
  double rss = 0;
  double r_squared = 0;
  std::size_t df_resid = 0;
};

/// Least squares of y on X (n rows, k regressors; an intercept column is
/// added internally). The fit uses a Householder QR decomposition;
/// collinear columns beyond a 1e-10 relative tolerance raise RankDeficient
/// with the offending column index. Standard errors come from
/// s^2 (X'X)^-1 with s^2 = RSS / (n - k - 1); p-values are two-sided
/// Student-t with n - k - 1 degrees of freedom; standardized coefficients
/// rescale by sd(x_j) / sd(y).
inline OlsResult ols(const std::vector<std::vector<double>>& X, std::span<const double> y) {
  const std::size_t n = X.size();
  if (n == 0 || y.size() != n) throw std::invalid_argument("ols: X and y sizes disagree");
  const std::size_t k = X[0].size();
  for (const auto& row : X)
    if (row.size() != k) throw std::invalid_argument("ols: ragged design matrix");
  const std::size_t m = k + 1;
  if (n <= m) throw std::invalid_argument("ols requires n > k + 1");

  // Augmented column-major design matrix; column 0 is the intercept.
  std::vector<std::vector<double>> a(m, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    a[0][i] = 1.0;
    for (std::size_t j = 0; j < k; ++j) a[j + 1][i] = X[i][j];
  }
  std::vector<double> qty(y.begin(), y.end());

  // Householder QR, applied in place; R accumulates in the top triangle.
  double max_diag = 0.0;
  std::vector<double> diag(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += a[j][i] * a[j][i];
    norm = std::sqrt(norm);
    const double rjj = a[j][j] >= 0.0 ? -norm : norm;
    diag[j] = std::fabs(rjj);
    max_diag = std::max(max_diag, diag[j]);
    if (diag[j] <= 1e-10 * std::max(max_diag, 1e-300))
      throw RankDeficient(static_cast<int>(j) - 1);

    // Householder vector v = x - rjj*e1, stored in a[j][j..n).
    a[j][j] -= rjj;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += a[j][i] * a[j][i];
    if (vnorm2 > 0.0) {
      for (std::size_t c = j + 1; c < m; ++c) {
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += a[j][i] * a[c][i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) a[c][i] -= f * a[j][i];
      }
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += a[j][i] * qty[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) qty[i] -= f * a[j][i];
    }
    a[j][j] = rjj;  // restore R's diagonal entry
    for (std::size_t i = j + 1; i < n; ++i) a[j][i] = 0.0;
  }

  // R is now in the upper triangle of the column-major store: R[r][c] = a[c][r].
  auto R = [&](std::size_t r, std::size_t c) { return a[c][r]; };

  OlsResult res;
  res.coefficients.assign(m, 0.0);
  for (std::size_t j = m; j-- > 0;) {
    double v = qty[j];
    for (std::size_t c = j + 1; c < m; ++c) v -= R(j, c) * res.coefficients[c];
    res.coefficients[j] = v / R(j, j);
  }

  double rss = 0.0;
  for (std::size_t i = m; i < n; ++i) rss += qty[i] * qty[i];
  res.rss = rss;
  res.df_resid = n - m;
  const double s2 = rss / static_cast<double>(res.df_resid);

  // (X'X)^-1 = Rinv Rinv'.
  std::vector<std::vector<double>> rinv(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    rinv[j][j] = 1.0 / R(j, j);
    for (std::size_t r = j; r-- > 0;) {
      double sum = 0.0;
      for (std::size_t c = r + 1; c <= j; ++c) sum += R(r, c) * rinv[c][j];
      rinv[r][j] = -sum / R(r, r);
    }
  }
  res.standard_errors.assign(m, 0.0);
  res.t_statistics.assign(m, 0.0);
  res.p_values.assign(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    double cjj = 0.0;
    for (std::size_t c = j; c < m; ++c) cjj += rinv[j][c] * rinv[j][c];
    res.standard_errors[j] = std::sqrt(s2 * cjj);
    if (res.standard_errors[j] > 0.0) {
      res.t_statistics[j] = res.coefficients[j] / res.standard_errors[j];
      res.p_values[j] = std::clamp(
          2.0 * (1.0 - student_t_cdf(std::fabs(res.t_statistics[j]),
                                     static_cast<int>(res.df_resid))),
          0.0, 1.0);
    }
  }

  // Standardized coefficients and R^2.
  double y_mean = 0.0;
  for (const double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  double tss = 0.0;
  for (const double v : y) tss += (v - y_mean) * (v - y_mean);
  res.r_squared = tss > 0.0 ? 1.0 - rss / tss : (rss <= 1e-12 ? 1.0 : 0.0);

  const double sd_y = std::sqrt(tss / static_cast<double>(n - 1));
  res.standardized.assign(m, std::nullopt);
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += X[i][j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (X[i][j] - mean) * (X[i][j] - mean);
    const double sd_x = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd_y > 0.0) res.standardized[j + 1] = res.coefficients[j + 1] * sd_x / sd_y;
  }
  return res;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_STATS_HPP
