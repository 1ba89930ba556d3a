#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qdist {

/// Gaussian uses the identity link, binomial the logit link.
enum class Family { gaussian, binomial };

std::string to_string(Family family);
Family parse_family(const std::string& name);

/// Contiguous penalized columns [start, start + size) of the design, with one
/// or more penalty matrices; each penalty has its own smoothing parameter.
struct PenalizedBlock {
  std::string name;
  Eigen::Index start = 0;
  Eigen::Index size = 0;
  std::vector<Eigen::MatrixXd> penalties;
};

/// Design and penalty structure of a penalized GLM. Columns
/// [0, unpenalized) are unpenalized; column 0 is the intercept.
struct ModelSpec {
  Family family = Family::gaussian;
  Eigen::MatrixXd design;
  std::vector<std::string> column_names;
  Eigen::Index unpenalized = 1;
  std::vector<PenalizedBlock> blocks;

  Eigen::Index rows() const noexcept { return design.rows(); }
  Eigen::Index columns() const noexcept { return design.cols(); }
  std::size_t penalty_count() const noexcept;

  /// Throws ValidationError on a malformed layout or an indefinite penalty.
  void validate() const;
};

struct ConvergenceReport {
  int iterations = 0;
  double final_step_norm = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
};

struct BlockLayout {
  std::string name;
  Eigen::Index start = 0;
  Eigen::Index size = 0;
};

struct PenalizedFit {
  Family family = Family::gaussian;
  Eigen::VectorXd coefficients;
  std::vector<std::string> column_names;
  Eigen::Index unpenalized = 1;
  std::vector<BlockLayout> blocks;
  std::vector<double> lambdas;  // one per penalty, in block order
  double edf = 0.0;
  std::vector<double> block_edf;
  Eigen::MatrixXd covariance;  // scale * (X'WX + S_lambda)^{-1}
  double scale = 1.0;
  double deviance = 0.0;
  double null_deviance = 0.0;
  double gcv = 0.0;
  Eigen::Index n = 0;
  Eigen::VectorXd linear_predictor;
  Eigen::VectorXd fitted;  // response scale
  double jitter = 0.0;     // diagonal jitter added to a singular system, if any
  ConvergenceReport convergence;

  Eigen::VectorXd block_coefficients(std::size_t block) const;
  double deviance_explained() const;
};

struct PirlsOptions {
  int max_iterations = 50;
  double gradient_tolerance = 1e-8;
  double jitter = 1e-10;
  double separation_eta = 25.0;  // |eta| beyond this is treated as separation
};

/// Minimizes deviance + sum_b lambda_b beta' S_b beta. Gaussian-identity is a
/// single penalized least squares solve; binomial-logit runs Newton (P-IRLS)
/// with step halving until the penalized score is below tolerance.
PenalizedFit fit_pirls(const ModelSpec& spec, const Eigen::VectorXd& y,
                       std::span<const double> lambdas, const PirlsOptions& options = {});

/// 41 log-spaced values over [1e-6, 1e6].
std::vector<double> default_lambda_grid(std::size_t points = 41, double lo = 1e-6,
                                        double hi = 1e6);

struct GcvOptions {
  std::vector<double> grid = default_lambda_grid();
  // Up to this many penalties are searched over the full product grid;
  // beyond it, cyclic coordinate search is used.
  std::size_t max_product_penalties = 2;
  int coordinate_sweeps = 3;
  PirlsOptions pirls;
};

/// Picks smoothing parameters minimizing GCV = n D / (n - edf)^2 over the
/// grid. Ties go to the larger lambda. Failing grid points are skipped with a
/// warning; if all fail the last error is rethrown.
PenalizedFit select_lambda_gcv(const ModelSpec& spec, const Eigen::VectorXd& y,
                               const GcvOptions& options = {});
PenalizedFit select_lambda_gcv(const ModelSpec& spec, const Eigen::VectorXd& y,
                               std::span<const double> grid);

struct Band {
  Eigen::VectorXd estimate;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// estimate(j) +- z * sqrt(b_j' V b_j) for rows b_j of basis_eval, using the
/// covariance of columns [first_column, first_column + basis_eval.cols()).
Band pointwise_ci(const PenalizedFit& fit, Eigen::Index first_column,
                  const Eigen::MatrixXd& basis_eval, double z = 1.96);

/// Same for a penalized block.
Band pointwise_ci(const PenalizedFit& fit, std::size_t block, const Eigen::MatrixXd& basis_eval,
                  double z = 1.96);

/// 1 - deviance / null deviance.
double deviance_explained(const PenalizedFit& fit);

struct CoefficientTest {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Wald tests from the coefficient covariance: normal reference for binomial,
/// t with n - edf degrees of freedom for Gaussian.
std::vector<CoefficientTest> wald_tests(const PenalizedFit& fit);

double inverse_link(Family family, double eta);

}  // namespace qdist
