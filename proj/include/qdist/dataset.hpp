#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdist/quantiles.hpp"

namespace qdist {

enum class OutcomeKind { binary, continuous };

struct SubjectRecord {
  std::string id;
  double outcome = 0.0;
  std::vector<double> covariates;  // aligned with RepeatedMeasuresDataset::covariate_names
  std::map<std::string, std::vector<double>> observations;  // feature_id -> raw sample
};

/// Subjects with scalar outcomes, named covariates and per-feature repeated
/// observations. Subject order is the order of the subjects file and is
/// preserved by every operation.
struct RepeatedMeasuresDataset {
  std::vector<std::string> covariate_names;
  std::vector<SubjectRecord> subjects;
  std::map<std::string, std::string> domains;  // feature_id -> domain label

  std::size_t size() const noexcept { return subjects.size(); }

  /// Binary when every outcome is exactly 0 or 1.
  OutcomeKind outcome_kind() const;

  std::vector<double> outcomes() const;

  /// Sorted union of feature ids present in any subject.
  std::vector<std::string> feature_ids() const;

  /// Column index of a covariate, or throws ValidationError.
  std::size_t covariate_index(const std::string& name) const;

  /// Copy restricted to the given subject positions, in the given order.
  RepeatedMeasuresDataset subset(std::span<const std::size_t> positions) const;

  /// Throws unless every subject has at least min_obs observations of feature.
  /// The message names the offending subjects.
  void require_feature(const std::string& feature, std::size_t min_obs = 2) const;
};

/// One quantile function per subject (dataset order) for a feature.
std::vector<QuantileFunction> subject_quantile_functions(const RepeatedMeasuresDataset& data,
                                                         const std::string& feature,
                                                         GridPtr grid);

struct DatasetPaths {
  std::filesystem::path observations;  // subject_id,feature_id,value
  std::filesystem::path subjects;      // subject_id,outcome,<covariates...>
  std::optional<std::filesystem::path> domains;  // feature_id,domain
};

RepeatedMeasuresDataset load_dataset(const DatasetPaths& paths);

void write_observations_csv(const RepeatedMeasuresDataset& data,
                            const std::filesystem::path& path);
void write_subjects_csv(const RepeatedMeasuresDataset& data, const std::filesystem::path& path);
void write_domains_csv(const RepeatedMeasuresDataset& data, const std::filesystem::path& path);

}  // namespace qdist
