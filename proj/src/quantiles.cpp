#include "qdist/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdist/errors.hpp"

namespace qdist {

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ValidationError("quantile grid must contain at least one level");
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    const double p = levels_[j];
    if (!(p > 0.0 && p < 1.0)) {
      std::ostringstream msg;
      msg << "quantile level " << p << " at position " << j << " is outside (0, 1)";
      throw ValidationError(msg.str());
    }
    if (j > 0 && !(p > levels_[j - 1]))
      throw ValidationError("quantile levels must be strictly increasing");
  }
  const std::size_t m = levels_.size();
  weights_.resize(m);
  double left = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double right = (j + 1 < m) ? 0.5 * (levels_[j] + levels_[j + 1]) : 1.0;
    weights_[j] = right - left;
    left = right;
  }
}

QuantileGrid QuantileGrid::midpoint(std::size_t resolution) {
  if (resolution == 0) throw ValidationError("grid resolution must be positive");
  std::vector<double> levels(resolution);
  const double m = static_cast<double>(resolution);
  for (std::size_t j = 0; j < resolution; ++j) levels[j] = (static_cast<double>(j) + 0.5) / m;
  QuantileGrid grid(std::move(levels));
  // Uniform cells; assign exactly rather than through midpoint arithmetic.
  std::fill(grid.weights_.begin(), grid.weights_.end(), 1.0 / m);
  return grid;
}

bool QuantileFunction::is_nondecreasing() const noexcept {
  return std::is_sorted(values.begin(), values.end());
}

bool same_grid(const QuantileFunction& a, const QuantileFunction& b) noexcept {
  if (a.grid == b.grid) return true;
  return a.grid && b.grid && *a.grid == *b.grid;
}

QuantileFunction estimate_quantile_function(std::span<const double> sample, GridPtr grid,
                                            std::string subject_id, std::string feature_id) {
  if (!grid) throw ValidationError("quantile grid is null");
  if (sample.empty()) throw ValidationError("no observations");
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (!std::isfinite(sample[i])) bad.push_back(i);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "non-finite observation(s) at index";
    for (std::size_t i = 0; i < bad.size() && i < 10; ++i) msg << ' ' << bad[i];
    if (bad.size() > 10) msg << " ... (" << bad.size() << " total)";
    if (!subject_id.empty()) msg << " for subject " << subject_id;
    throw ValidationError(msg.str());
  }

  std::vector<double> x(sample.begin(), sample.end());
  std::stable_sort(x.begin(), x.end());
  const auto n = static_cast<long long>(x.size());

  QuantileFunction qf{grid, std::vector<double>(grid->size()), std::move(subject_id),
                      std::move(feature_id)};
  for (std::size_t j = 0; j < grid->size(); ++j) {
    const double h = static_cast<double>(n + 1) * grid->level(j);
    const auto k = static_cast<long long>(std::floor(h));
    const double w = h - static_cast<double>(k);
    const long long lo = std::clamp(k, 1LL, n);
    const long long hi = std::clamp(k + 1, 1LL, n);
    const double a = x[static_cast<std::size_t>(lo - 1)];
    const double b = x[static_cast<std::size_t>(hi - 1)];
    // lo == hi covers both tail clamps; otherwise interpolate and keep the
    // rounded value inside [a, b] so monotonicity survives floating point.
    qf.values[j] = (lo == hi) ? a : std::clamp(a + w * (b - a), a, b);
  }
  return qf;
}

QuantileFunction group_mean_quantile(std::span<const QuantileFunction> curves) {
  if (curves.empty()) throw ValidationError("group mean of an empty list of quantile functions");
  const auto& first = curves.front();
  QuantileFunction mean{first.grid, std::vector<double>(first.size(), 0.0), "mean",
                        first.feature_id};
  for (const auto& c : curves) {
    if (!same_grid(c, first) || c.size() != first.size())
      throw ValidationError("quantile functions are on different grids");
    for (std::size_t j = 0; j < c.size(); ++j) mean.values[j] += c.values[j];
  }
  const double n = static_cast<double>(curves.size());
  for (double& v : mean.values) v /= n;
  return mean;
}

double integrate_on_grid(std::span<const double> values, const QuantileGrid& grid) {
  if (values.size() != grid.size()) {
    std::ostringstream msg;
    msg << "integrand has " << values.size() << " values but the grid has " << grid.size()
        << " levels";
    throw ValidationError(msg.str());
  }
  const auto w = grid.weights();
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) total += w[j] * values[j];
  return total;
}

double wasserstein2_distance(const QuantileFunction& a, const QuantileFunction& b) {
  if (!same_grid(a, b) || a.size() != b.size())
    throw ValidationError("quantile functions are on different grids");
  std::vector<double> sq(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a.values[j] - b.values[j];
    sq[j] = d * d;
  }
  return std::sqrt(integrate_on_grid(sq, *a.grid));
}

}  // namespace qdist
