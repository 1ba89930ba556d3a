#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "qdist/evaluate.hpp"
#include "qdist/jive.hpp"
#include "qdist/lmoments.hpp"
#include "qdist/quantiles.hpp"
#include "qdist/simulate.hpp"
#include "qdist/soqfr.hpp"

namespace qdist {

using Json = nlohmann::ordered_json;

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

/// subject_id,feature_id,p,q
void write_quantiles_csv(const std::filesystem::path& path, std::span<const QuantileFunction> curves);
/// feature_id,group,p,value
struct Barycenter {
  std::string feature_id;
  std::string group;
  QuantileFunction curve;
};
void write_barycenters_csv(const std::filesystem::path& path, std::span<const Barycenter> curves);
/// subject_id,feature_id,L1..LK
void write_lmoments_csv(const std::filesystem::path& path, std::span<const LMomentVector> rows);

/// p,estimate,lower,upper
void write_functional_csv(const std::filesystem::path& path, const FunctionalCoefficient& beta);
/// q,p,value in long format.
void write_surface_csv(const std::filesystem::path& path, const SurfaceCoefficient& surface);
/// p,q,value for each requested slice level.
void write_slices_csv(const std::filesystem::path& path, const SurfaceCoefficient& surface,
                      std::span<const double> levels);
/// smooth,x,estimate,lower,upper,edf
void write_smooths_csv(const std::filesystem::path& path, std::span<const SmoothEffect> smooths);

/// Coefficients, Wald tests, smoothing parameters, edf and deviance summary.
Json fit_summary(const FittedModel& model);

/// Ranks, variance fractions, convergence.
Json jive_summary(const JiveDecomposition& decomposition, const LMomentBlockMatrix& blocks);
/// subject_id,score_name,value
void write_scores_csv(const std::filesystem::path& path, const JiveDecomposition& decomposition,
                      const LMomentBlockMatrix& blocks);
/// component,domain,row_label,value
void write_loadings_csv(const std::filesystem::path& path, const JiveDecomposition& decomposition,
                        const LMomentBlockMatrix& blocks);
/// score,domain,row_label,correlation,zero_variance
void write_cross_correlation_csv(const std::filesystem::path& path,
                                 std::span<const ScoreCorrelation> rows);

/// model,metric,mean,sd,B,k,seed
void write_cv_report_csv(const std::filesystem::path& path, std::span<const MetricReport> reports);

Json ground_truth_json(const GroundTruth& truth);

}  // namespace qdist
