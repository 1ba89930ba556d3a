#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qdist {

/// Strictly increasing quantile levels in (0, 1) with midpoint-rule cell
/// weights. The cell of level j spans from the midpoint with its left
/// neighbour to the midpoint with its right neighbour; the outer cells extend
/// to 0 and 1.
class QuantileGrid {
 public:
  explicit QuantileGrid(std::vector<double> levels);

  /// p_j = (j - 0.5) / resolution, j = 1..resolution.
  static QuantileGrid midpoint(std::size_t resolution = 100);

  std::size_t size() const noexcept { return levels_.size(); }
  double level(std::size_t j) const { return levels_[j]; }
  std::span<const double> levels() const noexcept { return levels_; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool operator==(const QuantileGrid& other) const noexcept { return levels_ == other.levels_; }

 private:
  std::vector<double> levels_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const QuantileGrid>;

inline GridPtr make_grid(std::size_t resolution = 100) {
  return std::make_shared<const QuantileGrid>(QuantileGrid::midpoint(resolution));
}

/// Values of one subject-feature quantile function on a shared grid.
struct QuantileFunction {
  GridPtr grid;
  std::vector<double> values;
  std::string subject_id;
  std::string feature_id;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  bool is_nondecreasing() const noexcept;
};

bool same_grid(const QuantileFunction& a, const QuantileFunction& b) noexcept;

/// Interpolated order statistic estimator:
///   Q(p) = (1-w) X_(k) + w X_(k+1),  k = floor((n+1)p),  w = (n+1)p - k,
/// with order-statistic indices clamped to [1, n].
QuantileFunction estimate_quantile_function(std::span<const double> sample, GridPtr grid,
                                            std::string subject_id = {},
                                            std::string feature_id = {});

/// Pointwise average; the quantile function of the 2-Wasserstein barycenter.
QuantileFunction group_mean_quantile(std::span<const QuantileFunction> curves);

double wasserstein2_distance(const QuantileFunction& a, const QuantileFunction& b);

/// Midpoint-rule integral over [0, 1] of a function sampled on the grid.
double integrate_on_grid(std::span<const double> values, const QuantileGrid& grid);

}  // namespace qdist
