#include "qdist/lmoments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qdist/errors.hpp"

namespace qdist {

namespace {

void check_degree(int r) {
  if (r < 0) throw ValidationError("Legendre degree must be nonnegative");
  if (r > kMaxLegendreDegree) {
    std::ostringstream msg;
    msg << "Legendre degree " << r << " exceeds the supported maximum " << kMaxLegendreDegree;
    throw ValidationError(msg.str());
  }
}

void check_order(int order) {
  if (order < 1) throw ValidationError("L-moment order must be at least 1");
  check_degree(order - 1);
}

std::int64_t binomial(int n, int k) {
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

LegendreBasis::LegendreBasis(int max_degree) : max_degree_(max_degree) {
  check_degree(max_degree);
  table_.resize(static_cast<std::size_t>(max_degree) + 1);
  for (int r = 0; r <= max_degree; ++r) {
    auto& row = table_[static_cast<std::size_t>(r)];
    row.resize(static_cast<std::size_t>(r) + 1);
    for (int k = 0; k <= r; ++k) {
      const std::int64_t sign = ((r - k) % 2 == 0) ? 1 : -1;
      row[static_cast<std::size_t>(k)] = sign * binomial(r, k) * binomial(r + k, k);
    }
  }
}

std::int64_t LegendreBasis::coefficient(int r, int k) const {
  if (r < 0 || r > max_degree_ || k < 0 || k > r)
    throw ValidationError("Legendre coefficient index out of range");
  return table_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
}

double LegendreBasis::evaluate_power_form(int r, double p) const {
  if (r < 0 || r > max_degree_) throw ValidationError("Legendre degree out of range");
  const auto& row = table_[static_cast<std::size_t>(r)];
  double acc = 0.0;
  for (auto it = row.rbegin(); it != row.rend(); ++it) acc = acc * p + static_cast<double>(*it);
  return acc;
}

std::vector<double> legendre_shifted_all(int count, double p) {
  if (count < 0) throw ValidationError("Legendre degree must be nonnegative");
  if (count > 0) check_degree(count - 1);
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 0) return out;
  const double x = 2.0 * p - 1.0;
  out[0] = 1.0;
  if (count > 1) out[1] = x;
  for (int n = 1; n + 1 < count; ++n) {
    const auto i = static_cast<std::size_t>(n);
    out[i + 1] = ((2.0 * n + 1.0) * x * out[i] - n * out[i - 1]) / (n + 1.0);
  }
  return out;
}

double legendre_shifted(int r, double p) {
  check_degree(r);
  return legendre_shifted_all(r + 1, p).back();
}

LMomentVector lmoments_from_quantile(const QuantileFunction& qf, int order) {
  check_order(order);
  if (!qf.grid) throw ValidationError("quantile function has no grid");
  const auto& grid = *qf.grid;
  if (qf.size() != grid.size()) throw ValidationError("quantile function does not match its grid");
  LMomentVector lm{std::vector<double>(static_cast<std::size_t>(order), 0.0), qf.subject_id,
                   qf.feature_id};
  std::vector<double> integrand(grid.size());
  std::vector<std::vector<double>> poly(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) poly[j] = legendre_shifted_all(order, grid.level(j));
  std::vector<double> column(grid.size());
  for (int r = 0; r < order; ++r) {
    const auto k = static_cast<std::size_t>(r);
    for (std::size_t j = 0; j < grid.size(); ++j) column[j] = poly[j][k];
    // The quadrature of P_r (r >= 1) is O(1/M^2) rather than zero; removing
    // it keeps L_2.. exactly invariant to shifts of Q.
    const double drift = r == 0 ? 0.0 : integrate_on_grid(column, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) integrand[j] = qf.values[j] * (column[j] - drift);
    lm.values[k] = integrate_on_grid(integrand, grid);
  }
  return lm;
}

LMomentVector lmoments_sample(std::span<const double> sample, int order) {
  check_order(order);
  const std::size_t n = sample.size();
  if (n < static_cast<std::size_t>(order)) {
    std::ostringstream msg;
    msg << "insufficient sample for order K: " << n << " observation(s), K = " << order;
    throw ValidationError(msg.str());
  }
  for (double v : sample)
    if (!std::isfinite(v)) throw ValidationError("non-finite value in L-moment sample");

  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());

  // b_r = n^{-1} sum_j [C(j-1, r) / C(n-1, r)] x_(j), j = 1..n.
  std::vector<double> b(static_cast<std::size_t>(order), 0.0);
  const double nd = static_cast<double>(n);
  b[0] = std::accumulate(x.begin(), x.end(), 0.0) / nd;
  for (std::size_t j = 0; j < n; ++j) {
    const double jd = static_cast<double>(j);
    double weight = 1.0;
    for (int r = 1; r < order; ++r) {
      // Hits zero at r = j + 1 and stays there.
      weight *= (jd - r + 1.0) / (nd - r);
      b[static_cast<std::size_t>(r)] += weight * x[j];
    }
  }
  for (int r = 1; r < order; ++r) b[static_cast<std::size_t>(r)] /= nd;

  const LegendreBasis basis(order - 1);
  LMomentVector lm{std::vector<double>(static_cast<std::size_t>(order), 0.0), {}, {}};
  lm.values[0] = b[0];
  for (int r = 1; r < order; ++r) {
    double acc = 0.0;
    for (int k = 0; k <= r; ++k)
      acc += static_cast<double>(basis.coefficient(r, k)) * b[static_cast<std::size_t>(k)];
    lm.values[static_cast<std::size_t>(r)] = acc;
  }
  return lm;
}

std::vector<double> reconstruct_quantile(const LMomentVector& lm, const QuantileGrid& grid) {
  check_order(lm.order());
  std::vector<double> q(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto poly = legendre_shifted_all(lm.order(), grid.level(j));
    double acc = 0.0;
    for (int r = 1; r <= lm.order(); ++r) {
      const auto i = static_cast<std::size_t>(r - 1);
      acc += (2.0 * r - 1.0) * lm.values[i] * poly[i];
    }
    q[j] = acc;
  }
  return q;
}

PveProfile pve(const QuantileFunction& qf, int order) {
  const LMomentVector lm = lmoments_from_quantile(qf, order);
  const auto& grid = *qf.grid;
  const double mu = lm.values[0];

  std::vector<double> dev(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) dev[j] = (qf.values[j] - mu) * (qf.values[j] - mu);
  const double total = integrate_on_grid(dev, grid);
  // Rounding in mu leaves a tiny positive total for a constant Q.
  const double eps = std::numeric_limits<double>::epsilon();
  const bool flat = total <= 1e4 * eps * eps * mu * mu;

  // The residual integral equals total - sum_{r=2..k} (2r-1) L_r^2 when the
  // Legendre polynomials are orthogonal; using that identity keeps tau_k^2
  // nondecreasing in k on a discrete grid, where orthogonality is approximate.
  // The clamp absorbs quadrature error in the Bessel bound.
  PveProfile out;
  out.tau_sq.resize(static_cast<std::size_t>(order));
  out.tau_sq[0] = 0.0;
  double explained = 0.0;
  for (int k = 2; k <= order; ++k) {
    const double l = lm.values[static_cast<std::size_t>(k - 1)];
    explained += (2.0 * k - 1.0) * l * l;
    out.tau_sq[static_cast<std::size_t>(k - 1)] = flat ? 1.0 : std::min(1.0, explained / total);
  }
  return out;
}

std::vector<double> regular_moments_from_quantile(const QuantileFunction& qf, int order) {
  if (order < 1) throw ValidationError("moment order must be at least 1");
  if (!qf.grid) throw ValidationError("quantile function has no grid");
  std::vector<double> out(static_cast<std::size_t>(order));
  std::vector<double> power(qf.values.size(), 1.0);
  for (int k = 1; k <= order; ++k) {
    for (std::size_t j = 0; j < power.size(); ++j) power[j] *= qf.values[j];
    out[static_cast<std::size_t>(k - 1)] = integrate_on_grid(power, *qf.grid);
  }
  return out;
}

std::vector<double> central_moments(std::span<const double> raw) {
  if (raw.size() < 4) throw ValidationError("central moments need at least four raw moments");
  const double m = raw[0];
  // mu'_0 = 1; c_k = sum_j C(k,j) mu'_j (-m)^{k-j}.
  std::vector<double> out;
  for (std::size_t k = 2; k <= raw.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double mj = (j == 0) ? 1.0 : raw[j - 1];
      acc += static_cast<double>(binomial(static_cast<int>(k), static_cast<int>(j))) * mj *
             std::pow(-m, static_cast<double>(k - j));
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace qdist
