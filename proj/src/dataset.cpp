#include "qdist/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "qdist/csv.hpp"
#include "qdist/errors.hpp"

namespace qdist {

OutcomeKind RepeatedMeasuresDataset::outcome_kind() const {
  for (const auto& s : subjects)
    if (s.outcome != 0.0 && s.outcome != 1.0) return OutcomeKind::continuous;
  return OutcomeKind::binary;
}

std::vector<double> RepeatedMeasuresDataset::outcomes() const {
  std::vector<double> y;
  y.reserve(subjects.size());
  for (const auto& s : subjects) y.push_back(s.outcome);
  return y;
}

std::vector<std::string> RepeatedMeasuresDataset::feature_ids() const {
  std::set<std::string> ids;
  for (const auto& s : subjects)
    for (const auto& [f, _] : s.observations) ids.insert(f);
  return {ids.begin(), ids.end()};
}

std::size_t RepeatedMeasuresDataset::covariate_index(const std::string& name) const {
  for (std::size_t i = 0; i < covariate_names.size(); ++i)
    if (covariate_names[i] == name) return i;
  throw ValidationError("unknown covariate '" + name + "'");
}

RepeatedMeasuresDataset RepeatedMeasuresDataset::subset(
    std::span<const std::size_t> positions) const {
  RepeatedMeasuresDataset out;
  out.covariate_names = covariate_names;
  out.domains = domains;
  out.subjects.reserve(positions.size());
  for (std::size_t i : positions) out.subjects.push_back(subjects.at(i));
  return out;
}

void RepeatedMeasuresDataset::require_feature(const std::string& feature,
                                              std::size_t min_obs) const {
  std::vector<std::string> missing;
  for (const auto& s : subjects) {
    auto it = s.observations.find(feature);
    if (it == s.observations.end() || it->second.size() < min_obs) missing.push_back(s.id);
  }
  if (missing.empty()) return;
  std::ostringstream msg;
  msg << "feature '" << feature << "' has fewer than " << min_obs
      << " observations for subject(s):";
  for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg << ' ' << missing[i];
  if (missing.size() > 20) msg << " ... (" << missing.size() << " total)";
  throw ValidationError(msg.str());
}

std::vector<QuantileFunction> subject_quantile_functions(const RepeatedMeasuresDataset& data,
                                                         const std::string& feature,
                                                         GridPtr grid) {
  data.require_feature(feature);
  std::vector<QuantileFunction> out;
  out.reserve(data.size());
  for (const auto& s : data.subjects)
    out.push_back(estimate_quantile_function(s.observations.at(feature), grid, s.id, feature));
  return out;
}

RepeatedMeasuresDataset load_dataset(const DatasetPaths& paths) {
  // Parse everything before building so a bad file fails fast.
  const csv::Table subjects = csv::read(paths.subjects);
  const csv::Table observations = csv::read(paths.observations);
  std::optional<csv::Table> domains;
  if (paths.domains) domains = csv::read(*paths.domains);

  RepeatedMeasuresDataset data;
  const std::size_t sid_col = subjects.column("subject_id");
  const std::size_t out_col = subjects.column("outcome");
  std::vector<std::size_t> cov_cols;
  for (std::size_t c = 0; c < subjects.header.size(); ++c) {
    if (c == sid_col || c == out_col) continue;
    cov_cols.push_back(c);
    data.covariate_names.push_back(subjects.header[c]);
  }

  std::unordered_map<std::string, std::size_t> index;
  for (const auto& row : subjects.rows) {
    SubjectRecord rec;
    rec.id = row.fields[sid_col];
    if (rec.id.empty())
      throw ValidationError(paths.subjects.string() + ":" + std::to_string(row.line) +
                            ": empty subject_id");
    rec.outcome = csv::parse_double(row.fields[out_col], subjects, row, "outcome");
    for (std::size_t c : cov_cols)
      rec.covariates.push_back(csv::parse_double(row.fields[c], subjects, row, subjects.header[c]));
    if (!index.emplace(rec.id, data.subjects.size()).second)
      throw ValidationError(paths.subjects.string() + ":" + std::to_string(row.line) +
                            ": duplicate subject_id '" + rec.id + "'");
    data.subjects.push_back(std::move(rec));
  }

  const std::size_t o_sid = observations.column("subject_id");
  const std::size_t o_feat = observations.column("feature_id");
  const std::size_t o_val = observations.column("value");
  for (const auto& row : observations.rows) {
    auto it = index.find(row.fields[o_sid]);
    if (it == index.end())
      throw ValidationError(paths.observations.string() + ":" + std::to_string(row.line) +
                            ": subject '" + row.fields[o_sid] + "' is not in the subjects file");
    const double v = csv::parse_double(row.fields[o_val], observations, row, "value");
    data.subjects[it->second].observations[row.fields[o_feat]].push_back(v);
  }

  if (domains) {
    const std::size_t d_feat = domains->column("feature_id");
    const std::size_t d_dom = domains->column("domain");
    for (const auto& row : domains->rows) data.domains[row.fields[d_feat]] = row.fields[d_dom];
  }
  return data;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  return out;
}

}  // namespace

void write_observations_csv(const RepeatedMeasuresDataset& data,
                            const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "subject_id,feature_id,value\n";
  for (const auto& s : data.subjects)
    for (const auto& [feature, values] : s.observations)
      for (double v : values)
        csv::write_row(out, {s.id, feature, csv::format_double(v)});
}

void write_subjects_csv(const RepeatedMeasuresDataset& data, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  std::vector<std::string> header{"subject_id", "outcome"};
  header.insert(header.end(), data.covariate_names.begin(), data.covariate_names.end());
  csv::write_row(out, header);
  for (const auto& s : data.subjects) {
    std::vector<std::string> row{s.id, csv::format_double(s.outcome)};
    for (double z : s.covariates) row.push_back(csv::format_double(z));
    csv::write_row(out, row);
  }
}

void write_domains_csv(const RepeatedMeasuresDataset& data, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "feature_id,domain\n";
  for (const auto& [feature, domain] : data.domains) csv::write_row(out, {feature, domain});
}

}  // namespace qdist
