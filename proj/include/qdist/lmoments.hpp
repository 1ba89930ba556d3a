#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdist/quantiles.hpp"

namespace qdist {

/// Highest shifted-Legendre degree supported. L-moments up to order 13.
inline constexpr int kMaxLegendreDegree = 12;
inline constexpr int kDefaultLMomentOrder = 4;

/// Exact integer coefficients of the shifted Legendre polynomials
///   P_r(p) = sum_k s_{r,k} p^k,  s_{r,k} = (-1)^{r-k} C(r,k) C(r+k,k).
class LegendreBasis {
 public:
  explicit LegendreBasis(int max_degree = kMaxLegendreDegree);

  int max_degree() const noexcept { return max_degree_; }
  std::int64_t coefficient(int r, int k) const;

  /// Power-form evaluation from the integer table.
  double evaluate_power_form(int r, double p) const;

 private:
  int max_degree_;
  std::vector<std::vector<std::int64_t>> table_;
};

/// P_r(p) by the three-term recurrence
///   (n+1) P_{n+1} = (2n+1)(2p-1) P_n - n P_{n-1}.
double legendre_shifted(int r, double p);

/// P_0(p)..P_{count-1}(p) in one pass.
std::vector<double> legendre_shifted_all(int count, double p);

struct LMomentVector {
  std::vector<double> values;  // L_1..L_K
  std::string subject_id;
  std::string feature_id;

  int order() const noexcept { return static_cast<int>(values.size()); }
  double operator[](std::size_t r) const { return values[r]; }  // 0-based: [0] is L_1
};

/// L_r = integral of Q(p) P_{r-1}(p) dp on the grid.
LMomentVector lmoments_from_quantile(const QuantileFunction& qf, int order = kDefaultLMomentOrder);

/// Unbiased sample L-moments from probability weighted moments b_r of the
/// order statistics: L_{r+1} = sum_k s_{r,k} b_k.
LMomentVector lmoments_sample(std::span<const double> sample, int order = kDefaultLMomentOrder);

/// Q^K(p) = sum_{r=1..K} (2r-1) L_r P_{r-1}(p) on the grid levels.
std::vector<double> reconstruct_quantile(const LMomentVector& lm, const QuantileGrid& grid);

struct PveProfile {
  std::vector<double> tau_sq;  // tau_sq[k-1] = tau_k^2
};

/// Proportion of the quantile function's variance about its mean explained by
/// its first k L-moments, k = 1..order. A constant quantile function has
/// tau_1^2 = 0 and tau_k^2 = 1 for k >= 2.
PveProfile pve(const QuantileFunction& qf, int order = kDefaultLMomentOrder);

/// Raw moments mu'_k = integral Q(p)^k dp, k = 1..order.
std::vector<double> regular_moments_from_quantile(const QuantileFunction& qf, int order = 4);

/// Central moments c_2..c_m from raw moments mu'_1..mu'_m (m >= 4) by binomial
/// expansion about mu'_1.
std::vector<double> central_moments(std::span<const double> raw);

}  // namespace qdist
