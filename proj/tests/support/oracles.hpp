#pragma once

// Reference implementations used only by tests. Each one is written from the
// defining formula, independently of the library code path it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace qdist::oracle {

/// Q(p) = (1-w) X_(k) + w X_(k+1) with h = (n+1)p, k = floor(h), w = h - k,
/// order statistics clamped at both ends.
inline double quantile_direct(std::vector<double> sample, double p) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  const double h = (n + 1.0) * p;
  if (h <= 1.0) return sample.front();
  if (h >= n) return sample.back();
  const auto k = static_cast<std::size_t>(std::floor(h));
  const double w = h - static_cast<double>(k);
  return sample[k - 1] + w * (sample[k] - sample[k - 1]);
}

/// O(n^2) count over positive-negative pairs; ties count one half.
inline double auc_pairwise(std::span<const double> scores, std::span<const double> labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1.0) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0.0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Least squares by column-pivoted Householder QR.
inline Eigen::VectorXd ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return x.colPivHouseholderQr().solve(y);
}

inline long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return c;
}

/// Shifted Legendre polynomial from its explicit binomial sum
///   P_r(p) = sum_k (-1)^(r+k) C(r,k) C(r+k,k) p^k.
inline double legendre_binomial(int r, double p) {
  long double sum = 0.0L, power = 1.0L;
  for (int k = 0; k <= r; ++k) {
    const long double sign = ((r + k) % 2 == 0) ? 1.0L : -1.0L;
    sum += sign * binomial(r, k) * binomial(r + k, k) * power;
    power *= static_cast<long double>(p);
  }
  return static_cast<double>(sum);
}

/// Direct order-statistic form of the unbiased sample L-moment
///   l_r = (1/r) C(n,r)^-1 sum_i [sum_k (-1)^k C(r-1,k) C(i-1,r-1-k) C(n-i,k)] x_(i),
/// which does not go through probability weighted moments.
inline double sample_lmoment_direct(std::vector<double> x, int r) {
  std::sort(x.begin(), x.end());
  const int n = static_cast<int>(x.size());
  long double sum = 0.0L;
  for (int i = 1; i <= n; ++i) {
    long double w = 0.0L;
    for (int k = 0; k <= r - 1; ++k) {
      const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
      w += sign * binomial(r - 1, k) * binomial(i - 1, r - 1 - k) * binomial(n - i, k);
    }
    sum += w * static_cast<long double>(x[static_cast<std::size_t>(i - 1)]);
  }
  return static_cast<double>(sum / (static_cast<long double>(r) * binomial(n, r)));
}

/// Cox-de Boor recursion for B_{i,k} on the knot vector t. The right end of
/// the domain is assigned to the last non-degenerate span.
inline double cox_de_boor(const std::vector<double>& t, int i, int degree, double x) {
  const auto u = [&](int j) { return t[static_cast<std::size_t>(j)]; };
  if (degree == 0) {
    const double last = t.back();
    if (x == last) {
      // Basis function owning the final non-empty span.
      int owner = static_cast<int>(t.size()) - 2;
      while (owner > 0 && u(owner) == u(owner + 1)) --owner;
      return i == owner ? 1.0 : 0.0;
    }
    return (u(i) <= x && x < u(i + 1)) ? 1.0 : 0.0;
  }
  double left = 0.0, right = 0.0;
  if (u(i + degree) > u(i)) left = (x - u(i)) / (u(i + degree) - u(i)) * cox_de_boor(t, i, degree - 1, x);
  if (u(i + degree + 1) > u(i + 1))
    right = (u(i + degree + 1) - x) / (u(i + degree + 1) - u(i + 1)) * cox_de_boor(t, i + 1, degree - 1, x);
  return left + right;
}

/// Clamped knots with equally spaced interior knots.
inline std::vector<double> clamped_knots(double lower, double upper, int degree, int size) {
  std::vector<double> t;
  const int interior = size - degree - 1;
  for (int j = 0; j <= degree; ++j) t.push_back(lower);
  for (int j = 1; j <= interior; ++j) t.push_back(lower + (upper - lower) * j / (interior + 1));
  for (int j = 0; j <= degree; ++j) t.push_back(upper);
  return t;
}

/// Normal scores by explicit counting: midrank_i = #{x_j < x_i} + (#{x_j == x_i} + 1) / 2.
inline std::vector<double> normal_scores_direct(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  std::vector<double> out;
  for (double xi : x) {
    double below = 0.0, equal = 0.0;
    for (double xj : x) {
      if (xj < xi) below += 1.0;
      if (xj == xi) equal += 1.0;
    }
    const double midrank = below + (equal + 1.0) / 2.0;
    out.push_back(boost::math::quantile(boost::math::normal(), (midrank - 0.5) / n));
  }
  return out;
}

/// Binomial deviance of probabilities mu against 0/1 outcomes y.
inline double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    d += -2.0 * (y(i) * std::log(mu(i)) + (1.0 - y(i)) * std::log(1.0 - mu(i)));
  return d;
}

}  // namespace qdist::oracle
