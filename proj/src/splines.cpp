#include "qdist/splines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qdist/diagnostics.hpp"
#include "qdist/errors.hpp"

namespace qdist {

SplineBasis::SplineBasis(double lower, double upper, int degree, int size)
    : lower_(lower), upper_(upper), degree_(degree), size_(size) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
    throw ValidationError("spline domain must satisfy lower < upper");
  if (degree < 0) throw ValidationError("spline degree must be nonnegative");
  if (size < degree + 1) {
    std::ostringstream msg;
    msg << "spline basis of degree " << degree << " needs at least " << degree + 1
        << " functions, got " << size;
    throw ValidationError(msg.str());
  }
  const int spans = size - degree;
  knots_.reserve(static_cast<std::size_t>(size + degree + 1));
  for (int i = 0; i <= degree; ++i) knots_.push_back(lower);
  for (int i = 1; i < spans; ++i)
    knots_.push_back(lower + (upper - lower) * static_cast<double>(i) / spans);
  for (int i = 0; i <= degree; ++i) knots_.push_back(upper);
}

bool SplineBasis::contains(double x) const noexcept { return x >= lower_ && x <= upper_; }

double SplineBasis::clamp(double x) const noexcept { return std::clamp(x, lower_, upper_); }

int SplineBasis::find_span(double x) const {
  // Index s with knots[s] <= x < knots[s+1]; the right end maps to the last span.
  const int last = size_ - 1;
  if (x >= knots_[static_cast<std::size_t>(last + 1)]) return last;
  const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + last + 1, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

Eigen::VectorXd SplineBasis::evaluate(double x, int derivative) const {
  if (derivative < 0) throw ValidationError("derivative order must be nonnegative");
  const double slack = 1e-12 * (upper_ - lower_);
  if (!(x >= lower_ - slack && x <= upper_ + slack)) {
    std::ostringstream msg;
    msg << "spline evaluation point " << x << " outside [" << lower_ << ", " << upper_ << "]";
    throw ValidationError(msg.str());
  }
  x = clamp(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size_);
  const int p = degree_;
  if (derivative > p) return out;

  // Cox-de Boor triangle with derivatives (Piegl & Tiller, A2.3).
  const int span = find_span(x);
  const auto& U = knots_;
  std::vector<double> left(static_cast<std::size_t>(p) + 1), right(static_cast<std::size_t>(p) + 1);
  Eigen::MatrixXd ndu(p + 1, p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = x - U[static_cast<std::size_t>(span + 1 - j)];
    right[static_cast<std::size_t>(j)] = U[static_cast<std::size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    ndu(j, j) = saved;
  }

  Eigen::VectorXd values(p + 1);
  if (derivative == 0) {
    for (int j = 0; j <= p; ++j) values(j) = ndu(j, p);
  } else {
    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
      int s1 = 0, s2 = 1;
      a(0, 0) = 1.0;
      double d = 0.0;
      for (int k = 1; k <= derivative; ++k) {
        d = 0.0;
        const int rk = r - k, pk = p - k;
        if (r >= k) {
          a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
          d = a(s2, 0) * ndu(rk, pk);
        }
        const int j1 = (rk >= -1) ? 1 : -rk;
        const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
        for (int j = j1; j <= j2; ++j) {
          a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
          d += a(s2, j) * ndu(rk + j, pk);
        }
        if (r <= pk) {
          a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
          d += a(s2, k) * ndu(r, pk);
        }
        std::swap(s1, s2);
      }
      values(r) = d;
    }
    double factor = p;
    for (int k = 1; k < derivative; ++k) factor *= (p - k);
    values *= factor;
  }
  for (int j = 0; j <= p; ++j) out(span - p + j) = values(j);
  return out;
}

Eigen::MatrixXd SplineBasis::evaluate(std::span<const double> xs, int derivative) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), size_);
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = evaluate(xs[i], derivative).transpose();
  return out;
}

std::vector<double> SplineBasis::greville() const {
  std::vector<double> g(static_cast<std::size_t>(size_));
  for (int i = 0; i < size_; ++i) {
    double acc = 0.0;
    for (int k = 1; k <= degree_; ++k) acc += knots_[static_cast<std::size_t>(i + k)];
    g[static_cast<std::size_t>(i)] = degree_ > 0 ? acc / degree_ : knots_[static_cast<std::size_t>(i)];
  }
  return g;
}

SplineBasis build_basis(double lower, double upper, int degree, int size) {
  return SplineBasis(lower, upper, degree, size);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
  if (points < 1) throw ValidationError("Gauss-Legendre rule needs at least one point");
  std::vector<double> nodes(static_cast<std::size_t>(points)), weights(nodes.size());
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n == 1) {
    nodes[0] = 0.0;
    weights[0] = 2.0;
  }
  return {nodes, weights};
}

PenaltyMatrix second_derivative_penalty(const SplineBasis& basis) {
  if (basis.degree() < 2)
    throw ValidationError("second-derivative penalty needs a basis of degree at least 2");
  const int points = basis.degree() + 1;
  const auto [nodes, weights] = gauss_legendre(points);
  const int k = basis.size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(k, k);
  const auto& U = basis.knots();
  for (std::size_t s = 0; s + 1 < U.size(); ++s) {
    const double a = U[s], b = U[s + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < points; ++q) {
      const double x = mid + half * nodes[static_cast<std::size_t>(q)];
      const Eigen::VectorXd d2 = basis.evaluate(x, 2);
      P.noalias() += (half * weights[static_cast<std::size_t>(q)]) * d2 * d2.transpose();
    }
  }
  P = 0.5 * (P + P.transpose()).eval();
  return {std::move(P), PenaltyKind::second_derivative};
}

PenaltyMatrix second_difference_penalty(int size) {
  if (size < 3) throw ValidationError("second-difference penalty needs at least 3 coefficients");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(size - 2, size);
  for (int i = 0; i < size - 2; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  return {D.transpose() * D, PenaltyKind::second_difference};
}

PenaltyMatrix kronecker_penalty(const PenaltyMatrix& penalty_q, const PenaltyMatrix& penalty_p,
                                double lambda_q, double lambda_p) {
  if (lambda_q < 0.0 || lambda_p < 0.0)
    throw ValidationError("smoothing parameters must be nonnegative");
  const Eigen::MatrixXd& Pq = penalty_q.matrix;
  const Eigen::MatrixXd& Pp = penalty_p.matrix;
  if (Pq.rows() != Pq.cols() || Pp.rows() != Pp.cols())
    throw ValidationError("penalty matrices must be square");
  const Eigen::Index kq = Pq.rows(), kp = Pp.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(kq * kp, kq * kp);
  for (Eigen::Index a = 0; a < kq; ++a)
    for (Eigen::Index b = 0; b < kq; ++b)
      for (Eigen::Index l = 0; l < kp; ++l) out(a * kp + l, b * kp + l) += lambda_q * Pq(a, b);
  for (Eigen::Index k = 0; k < kq; ++k)
    out.block(k * kp, k * kp, kp, kp) += lambda_p * Pp;
  return {std::move(out), PenaltyKind::tensor};
}

Eigen::VectorXd tensor_design_row(std::span<const double> q_values, const SplineBasis& basis_q,
                                  const Eigen::MatrixXd& p_basis_on_grid,
                                  const QuantileGrid& grid) {
  if (q_values.size() != grid.size() ||
      p_basis_on_grid.rows() != static_cast<Eigen::Index>(grid.size()))
    throw ValidationError("tensor design inputs do not match the grid");
  const Eigen::Index kq = basis_q.size(), kp = p_basis_on_grid.cols();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(kq * kp);
  const auto w = grid.weights();
  std::size_t clamped = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double q = q_values[j];
    if (!basis_q.contains(q)) {
      ++clamped;
      q = basis_q.clamp(q);
    }
    const Eigen::VectorXd bq = basis_q.evaluate(q);
    const auto bp = p_basis_on_grid.row(static_cast<Eigen::Index>(j));
    for (Eigen::Index k = 0; k < kq; ++k) {
      if (bq(k) == 0.0) continue;
      row.segment(k * kp, kp) += (w[j] * bq(k)) * bp.transpose();
    }
  }
  if (clamped > 0) {
    std::ostringstream msg;
    msg << clamped << " quantile value(s) outside the q-basis domain [" << basis_q.lower() << ", "
        << basis_q.upper() << "] were clamped";
    warn(msg.str());
  }
  return row;
}

Eigen::VectorXd tensor_design_row(std::span<const double> q_values, const SplineBasis& basis_q,
                                  const SplineBasis& basis_p, const QuantileGrid& grid) {
  return tensor_design_row(q_values, basis_q, basis_p.evaluate(grid.levels()), grid);
}

}  // namespace qdist
