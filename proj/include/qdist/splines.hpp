#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "qdist/quantiles.hpp"

namespace qdist {

/// Clamped B-spline basis with equally spaced interior knots on [lower, upper].
class SplineBasis {
 public:
  SplineBasis(double lower, double upper, int degree, int size);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  int degree() const noexcept { return degree_; }
  int size() const noexcept { return size_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  bool contains(double x) const noexcept;
  double clamp(double x) const noexcept;

  /// All basis functions (or a derivative of them) at x in [lower, upper].
  Eigen::VectorXd evaluate(double x, int derivative = 0) const;

  /// Row i holds evaluate(xs[i], derivative).
  Eigen::MatrixXd evaluate(std::span<const double> xs, int derivative = 0) const;

  /// Knot averages; the coefficients of the identity function x.
  std::vector<double> greville() const;

 private:
  int find_span(double x) const;

  double lower_, upper_;
  int degree_, size_;
  std::vector<double> knots_;
};

/// Equally spaced interior knots; cubic by default.
SplineBasis build_basis(double lower, double upper, int degree = 3, int size = 10);

enum class PenaltyKind { second_derivative, second_difference, tensor };

struct PenaltyMatrix {
  Eigen::MatrixXd matrix;
  PenaltyKind kind = PenaltyKind::second_derivative;

  Eigen::Index size() const noexcept { return matrix.rows(); }
};

/// P_kl = integral of B_k''(x) B_l''(x) over the domain, by Gauss-Legendre
/// quadrature on each knot span (exact for the piecewise polynomial integrand).
PenaltyMatrix second_derivative_penalty(const SplineBasis& basis);

/// D^T D for the (size-2) x size second-order difference matrix D.
PenaltyMatrix second_difference_penalty(int size);

/// lambda_q (P_q kron I_p) + lambda_p (I_q kron P_p), for coefficients
/// ordered with the q index varying slowest: theta[k * size_p + l].
PenaltyMatrix kronecker_penalty(const PenaltyMatrix& penalty_q, const PenaltyMatrix& penalty_p,
                                double lambda_q, double lambda_p);

/// W_i entries: integral of B_{Q,k}(Q_i(p)) B_{P,l}(p) dp over the grid, in
/// the same ordering as kronecker_penalty. q-values outside the q-basis domain
/// are clamped to it with a warning.
Eigen::VectorXd tensor_design_row(std::span<const double> q_values, const SplineBasis& basis_q,
                                  const SplineBasis& basis_p, const QuantileGrid& grid);

/// Same, with the p-basis already evaluated at the grid levels (grid x size_p).
Eigen::VectorXd tensor_design_row(std::span<const double> q_values, const SplineBasis& basis_q,
                                  const Eigen::MatrixXd& p_basis_on_grid,
                                  const QuantileGrid& grid);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points);

}  // namespace qdist
