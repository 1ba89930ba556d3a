#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdist/dataset.hpp"
#include "qdist/pglm.hpp"
#include "qdist/quantiles.hpp"
#include "qdist/splines.hpp"

namespace qdist {

/// beta(p) on the grid levels with 95% pointwise bands.
struct FunctionalCoefficient {
  std::vector<double> levels;
  Eigen::VectorXd estimate;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// F(q, p) sampled on a q-grid (rows) by p-grid (columns).
struct SurfaceCoefficient {
  std::vector<double> q_grid;
  std::vector<double> p_grid;
  Eigen::MatrixXd values;
  /// Basis-evaluated slice q -> F(q, p) at an arbitrary level p, on q_grid.
  std::function<Eigen::VectorXd(double)> slice;
};

/// Equal-width bins shared across subjects.
struct BinSpec {
  double lower = 0.0;
  double upper = 1.0;
  int bins = 10;

  std::vector<double> edges() const;
  std::vector<double> midpoints() const;
  void validate() const;
  /// 22 bins of width 10 on [35, 255], the step-velocity setting.
  static BinSpec step_velocity() { return {35.0, 255.0, 22}; }
};

struct HistogramPredictor {
  std::vector<double> edges;
  std::vector<double> midpoints;
  Eigen::MatrixXd frequencies;  // subjects x bins; rows sum to 1
};

/// Relative-frequency histograms; observations outside the bins are clamped
/// to the end bins with a warning.
HistogramPredictor subject_histograms(const RepeatedMeasuresDataset& data,
                                      const std::string& feature, const BinSpec& bins);

/// Settings shared by every model.
struct RegressionOptions {
  std::string feature;
  std::vector<std::string> covariates;
  std::optional<Family> family;  // default: binomial for 0/1 outcomes, else gaussian
  std::size_t grid_resolution = 100;
  std::vector<double> lambda_grid = default_lambda_grid();
  PirlsOptions pirls;
};

enum class BasisKind { bspline, legendre };

struct SoqfrOptions : RegressionOptions {
  BasisKind basis = BasisKind::bspline;
  int basis_size = 10;
  int degree = 3;
  std::optional<double> lambda;  // fixed smoothing parameter; GCV otherwise
};

struct FgamOptions : RegressionOptions {
  FgamOptions() { lambda_grid = default_lambda_grid(11); }
  int q_size = 7;
  int p_size = 7;
  int degree = 3;
  double q_margin = 0.02;  // fraction of the observed q-range added on each side
  int q_points = 50;       // resolution of the reported surface in q
  std::vector<double> slice_levels{0.1, 0.25, 0.5, 0.75, 0.9};
};

struct SoqfrLOptions : RegressionOptions {
  int order = 4;
};

struct GamLOptions : RegressionOptions {
  int order = 4;
  int basis_size = 6;
  int degree = 3;
};

struct HistogramOptions : RegressionOptions {
  BinSpec bins = BinSpec::step_velocity();
  int basis_size = 10;
  int degree = 3;
};

/// One additive term of a model: raw columns computed from a dataset, an
/// optional centring + reparametrization to drop the direction confounded
/// with the intercept, and its penalties.
struct ModelTerm {
  std::string name;
  std::function<Eigen::MatrixXd(const RepeatedMeasuresDataset&)> columns;
  std::vector<std::string> column_names;
  bool penalized = false;
  bool constrained = false;     // centre columns and drop the constant direction
  Eigen::RowVectorXd centre;    // training column means (constrained terms)
  Eigen::MatrixXd transform;    // raw coefficients = transform * model coefficients
  std::vector<Eigen::MatrixXd> penalties;      // in model coordinates, unscaled
  std::vector<double> penalty_scales;          // applied before the GCV search
};

/// A fitted model that can score new subjects with the training-time
/// preprocessing (grid, basis domains, centring).
class FittedModel {
 public:
  virtual ~FittedModel() = default;
  virtual std::string kind() const = 0;
  const PenalizedFit& fit() const noexcept { return fit_; }
  const std::vector<ModelTerm>& terms() const noexcept { return terms_; }
  const std::vector<std::string>& covariates() const noexcept { return covariates_; }
  /// Smoothing parameters multiplied by the internal penalty scaling, i.e.
  /// the weights on the unscaled penalties.
  std::vector<double> effective_lambdas() const;

  Eigen::MatrixXd design(const RepeatedMeasuresDataset& data) const;
  Eigen::VectorXd linear_predictor(const RepeatedMeasuresDataset& data) const;
  /// Response scale.
  Eigen::VectorXd predict(const RepeatedMeasuresDataset& data) const;
  /// Model coefficients of one term.
  Eigen::VectorXd term_coefficients(std::size_t term) const;
  Eigen::Index term_start(std::size_t term) const;

  /// Builds the design on training data, freezes centring, and fits. Fixed
  /// smoothing parameters skip the GCV search.
  void train(const RepeatedMeasuresDataset& data, const RegressionOptions& options,
             std::vector<ModelTerm> terms, std::optional<std::vector<double>> fixed_lambdas);

 protected:
  PenalizedFit fit_;
  std::vector<ModelTerm> terms_;
  std::vector<std::string> covariates_;
};

class SoqfrModel : public FittedModel {
 public:
  std::string kind() const override { return "soqfr"; }
  FunctionalCoefficient beta;
  GridPtr grid;
  BasisKind basis = BasisKind::bspline;
};

class FgamModel : public FittedModel {
 public:
  std::string kind() const override { return "fgam"; }
  SurfaceCoefficient surface;
  std::vector<double> slice_levels;
  double q_lower = 0.0, q_upper = 0.0;
  GridPtr grid;
};

class SoqfrLModel : public FittedModel {
 public:
  std::string kind() const override { return "soqfr-l"; }
  std::vector<CoefficientTest> tests;
  FunctionalCoefficient induced_beta;
  int order = 0;
};

/// Fitted smooth h_k of one L-moment on its observed range.
struct SmoothEffect {
  std::string name;
  std::vector<double> x;
  Eigen::VectorXd estimate;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double edf = 0.0;
};

class GamLModel : public FittedModel {
 public:
  std::string kind() const override { return "gam-l"; }
  std::vector<SmoothEffect> smooths;
  int order = 0;
};

class HistogramModel : public FittedModel {
 public:
  std::string kind() const override { return "hist"; }
  BinSpec bins;
  SmoothEffect effect;  // f_x at the bin midpoints
};

SoqfrModel fit_soqfr(const RepeatedMeasuresDataset& data, const SoqfrOptions& options);
FgamModel fit_fgam_qf(const RepeatedMeasuresDataset& data, const FgamOptions& options);
SoqfrLModel fit_soqfr_l(const RepeatedMeasuresDataset& data, const SoqfrLOptions& options);
GamLModel fit_gam_lmoments(const RepeatedMeasuresDataset& data, const GamLOptions& options);
HistogramModel fit_histogram_glm(const RepeatedMeasuresDataset& data,
                                 const HistogramOptions& options);

/// Fits a model on a training set; used by cross-validation.
using ModelRecipe =
    std::function<std::unique_ptr<FittedModel>(const RepeatedMeasuresDataset& train)>;

ModelRecipe soqfr_recipe(SoqfrOptions options);
ModelRecipe fgam_recipe(FgamOptions options);
ModelRecipe soqfr_l_recipe(SoqfrLOptions options);
ModelRecipe gam_l_recipe(GamLOptions options);
ModelRecipe histogram_recipe(HistogramOptions options);

/// The family used when none is configured.
Family resolve_family(const RepeatedMeasuresDataset& data, const std::optional<Family>& family);

}  // namespace qdist
