#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdist/dataset.hpp"
#include "qdist/soqfr.hpp"

namespace qdist {

struct CvPlan {
  std::size_t folds = 10;
  std::size_t repeats = 100;
  std::uint64_t seed = 1;
  bool stratify = true;  // by class, for binary outcomes
};

enum class MetricKind { cv_auc, cv_r2, deviance_explained };

std::string to_string(MetricKind kind);

struct MetricReport {
  std::string model;
  MetricKind kind = MetricKind::cv_auc;
  std::vector<double> per_repeat;  // valid repeats only, in repeat order
  double mean = 0.0;
  double sd = 0.0;                 // sample standard deviation over repeats
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::size_t failed_folds = 0;
  std::size_t invalid_repeats = 0;
};

/// Mann-Whitney estimate of P(score+ > score-) + P(tie) / 2 using midranks.
double auc(std::span<const double> scores, std::span<const double> labels);

/// 1 - SSE / SST where SST is taken about the supplied per-prediction
/// baselines (the training-fold mean for each held-out subject).
double cv_r2(std::span<const double> predictions, std::span<const double> truths,
             std::span<const double> baselines);
/// Same with the mean of the truths as baseline.
double cv_r2(std::span<const double> predictions, std::span<const double> truths);

/// Fold index of every subject for one repeat. Stratified plans deal each
/// class round-robin after an independent shuffle.
std::vector<std::size_t> assign_folds(std::span<const double> outcomes, const CvPlan& plan,
                                      std::size_t repeat);

/// Called after each training-fold fit with the training subject positions.
using FoldObserver = std::function<void(std::size_t repeat, std::size_t fold,
                                        const FittedModel& model,
                                        std::span<const std::size_t> training)>;

struct CvOptions {
  std::string model_name = "model";
  // Defaults to cvAUC for binary outcomes and cv-R^2 otherwise.
  std::optional<MetricKind> metric;
  FoldObserver observer;
};

/// Repeated k-fold cross-validation. Every model is refit on the training
/// subjects only; test predictions are pooled within a repeat and the metric
/// averaged over repeats. A fold whose fit fails numerically is skipped; a
/// repeat with more than 10% failed folds is dropped.
MetricReport cross_validate(const ModelRecipe& recipe, const RepeatedMeasuresDataset& data,
                            const CvPlan& plan, const CvOptions& options = {});

}  // namespace qdist
