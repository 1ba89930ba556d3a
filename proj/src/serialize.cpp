#include "qdist/serialize.hpp"

#include <fstream>

#include "qdist/csv.hpp"
#include "qdist/errors.hpp"

namespace qdist {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

std::string num(double v) { return csv::format_double(v); }

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

}  // namespace

void write_json(const std::filesystem::path& path, const Json& value) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_quantiles_csv(const std::filesystem::path& path, std::span<const QuantileFunction> curves) {
  auto out = open_output(path);
  csv::write_row(out, {"subject_id", "feature_id", "p", "q"});
  for (const auto& c : curves)
    for (std::size_t j = 0; j < c.size(); ++j)
      csv::write_row(out, {c.subject_id, c.feature_id, num(c.grid->level(j)), num(c.values[j])});
}

void write_barycenters_csv(const std::filesystem::path& path, std::span<const Barycenter> curves) {
  auto out = open_output(path);
  csv::write_row(out, {"feature_id", "group", "p", "value"});
  for (const auto& b : curves)
    for (std::size_t j = 0; j < b.curve.size(); ++j)
      csv::write_row(out, {b.feature_id, b.group, num(b.curve.grid->level(j)), num(b.curve.values[j])});
}

void write_lmoments_csv(const std::filesystem::path& path, std::span<const LMomentVector> rows) {
  auto out = open_output(path);
  int order = 0;
  for (const auto& r : rows) order = std::max(order, r.order());
  std::vector<std::string> header{"subject_id", "feature_id"};
  for (int k = 1; k <= order; ++k) header.push_back("L" + std::to_string(k));
  csv::write_row(out, header);
  for (const auto& r : rows) {
    std::vector<std::string> fields{r.subject_id, r.feature_id};
    for (double v : r.values) fields.push_back(num(v));
    fields.resize(header.size());
    csv::write_row(out, fields);
  }
}

void write_functional_csv(const std::filesystem::path& path, const FunctionalCoefficient& beta) {
  auto out = open_output(path);
  csv::write_row(out, {"p", "estimate", "lower", "upper"});
  for (std::size_t j = 0; j < beta.levels.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    csv::write_row(out, {num(beta.levels[j]), num(beta.estimate(i)), num(beta.lower(i)), num(beta.upper(i))});
  }
}

void write_surface_csv(const std::filesystem::path& path, const SurfaceCoefficient& surface) {
  auto out = open_output(path);
  csv::write_row(out, {"q", "p", "value"});
  for (std::size_t a = 0; a < surface.q_grid.size(); ++a)
    for (std::size_t b = 0; b < surface.p_grid.size(); ++b)
      csv::write_row(out, {num(surface.q_grid[a]), num(surface.p_grid[b]),
                           num(surface.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)))});
}

void write_slices_csv(const std::filesystem::path& path, const SurfaceCoefficient& surface,
                      std::span<const double> levels) {
  auto out = open_output(path);
  csv::write_row(out, {"p", "q", "value"});
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("slice levels must lie in (0, 1)");
    const Eigen::VectorXd v = surface.slice(p);
    for (std::size_t a = 0; a < surface.q_grid.size(); ++a)
      csv::write_row(out, {num(p), num(surface.q_grid[a]), num(v(static_cast<Eigen::Index>(a)))});
  }
}

void write_smooths_csv(const std::filesystem::path& path, std::span<const SmoothEffect> smooths) {
  auto out = open_output(path);
  csv::write_row(out, {"smooth", "x", "estimate", "lower", "upper", "edf"});
  for (const auto& s : smooths)
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      csv::write_row(out, {s.name, num(s.x[j]), num(s.estimate(i)), num(s.lower(i)), num(s.upper(i)), num(s.edf)});
    }
}

Json fit_summary(const FittedModel& model) {
  const auto& fit = model.fit();
  Json j;
  j["model"] = model.kind();
  j["family"] = to_string(fit.family);
  j["n"] = fit.n;
  Json coefs = Json::array();
  for (const auto& t : wald_tests(fit))
    coefs.push_back({{"name", t.name},
                     {"estimate", t.estimate},
                     {"std_error", t.std_error},
                     {"statistic", t.statistic},
                     {"p_value", t.p_value}});
  j["coefficients"] = coefs;
  Json blocks = Json::array();
  const auto effective = model.effective_lambdas();
  std::size_t m = 0;
  for (std::size_t b = 0; b < fit.blocks.size(); ++b) {
    Json block{{"name", fit.blocks[b].name}, {"columns", fit.blocks[b].size}, {"edf", fit.block_edf[b]}};
    Json lambdas = Json::array(), eff = Json::array();
    for (const auto& t : model.terms())
      if (t.penalized && t.name == fit.blocks[b].name)
        for (std::size_t s = 0; s < t.penalty_scales.size(); ++s, ++m) {
          lambdas.push_back(fit.lambdas.at(m));
          eff.push_back(effective.at(m));
        }
    block["lambda"] = lambdas;
    block["lambda_effective"] = eff;
    blocks.push_back(block);
  }
  j["penalized_blocks"] = blocks;
  j["edf"] = fit.edf;
  j["scale"] = fit.scale;
  j["deviance"] = fit.deviance;
  j["null_deviance"] = fit.null_deviance;
  j["deviance_explained"] = fit.null_deviance > 0.0 ? Json(fit.deviance_explained()) : Json(nullptr);
  j["gcv"] = fit.gcv;
  j["jitter"] = fit.jitter;
  j["convergence"] = {{"iterations", fit.convergence.iterations},
                      {"final_step_norm", fit.convergence.final_step_norm},
                      {"gradient_norm", fit.convergence.gradient_norm},
                      {"converged", fit.convergence.converged}};
  return j;
}

Json jive_summary(const JiveDecomposition& decomposition, const LMomentBlockMatrix& blocks) {
  Json j;
  j["subjects"] = blocks.subjects();
  j["normalized"] = blocks.normalized;
  j["ranks"] = {{"joint", decomposition.ranks.joint}, {"individual", Json::object()}};
  Json variance = Json::object();
  for (std::size_t d = 0; d < blocks.domains.size(); ++d) {
    j["ranks"]["individual"][blocks.domains[d]] = decomposition.ranks.individual.at(d);
    const auto& v = decomposition.variance.at(d);
    variance[blocks.domains[d]] = {{"joint", v.joint},
                                   {"individual", v.individual},
                                   {"residual", v.residual},
                                   {"residual_direct", v.residual_direct},
                                   {"rows", blocks.blocks[d].rows()},
                                   {"block_scale", d < blocks.block_scale.size() ? blocks.block_scale[d] : 1.0}};
  }
  j["variance_explained"] = variance;
  j["dropped_rows"] = blocks.dropped_rows;
  j["iterations"] = decomposition.iterations;
  j["converged"] = decomposition.converged;
  return j;
}

void write_scores_csv(const std::filesystem::path& path, const JiveDecomposition& decomposition,
                      const LMomentBlockMatrix& blocks) {
  auto out = open_output(path);
  csv::write_row(out, {"subject_id", "score_name", "value"});
  const auto scores = jive_scores(decomposition, blocks);
  for (std::size_t i = 0; i < blocks.subjects(); ++i)
    for (const auto& s : scores)
      csv::write_row(out, {blocks.subject_ids[i], s.name, num(s.values(static_cast<Eigen::Index>(i)))});
}

void write_loadings_csv(const std::filesystem::path& path, const JiveDecomposition& decomposition,
                        const LMomentBlockMatrix& blocks) {
  auto out = open_output(path);
  csv::write_row(out, {"component", "domain", "row_label", "value"});
  for (Eigen::Index k = 0; k < decomposition.joint_loadings.cols(); ++k) {
    Eigen::Index r = 0;
    for (std::size_t d = 0; d < blocks.blocks.size(); ++d)
      for (const auto& label : blocks.row_labels[d])
        csv::write_row(out, {"joint" + std::to_string(k + 1), blocks.domains[d], label,
                             num(decomposition.joint_loadings(r++, k))});
  }
  for (std::size_t d = 0; d < decomposition.individual_loadings.size(); ++d) {
    const auto& U = decomposition.individual_loadings[d];
    for (Eigen::Index k = 0; k < U.cols(); ++k)
      for (Eigen::Index r = 0; r < U.rows(); ++r)
        csv::write_row(out, {blocks.domains[d] + "_indiv" + std::to_string(k + 1), blocks.domains[d],
                             blocks.row_labels[d][static_cast<std::size_t>(r)], num(U(r, k))});
  }
}

void write_cross_correlation_csv(const std::filesystem::path& path, std::span<const ScoreCorrelation> rows) {
  auto out = open_output(path);
  csv::write_row(out, {"score", "domain", "row_label", "correlation", "zero_variance"});
  for (const auto& r : rows)
    csv::write_row(out, {r.score, r.domain, r.row_label, num(r.correlation), r.zero_variance ? "1" : "0"});
}

void write_cv_report_csv(const std::filesystem::path& path, std::span<const MetricReport> reports) {
  auto out = open_output(path);
  csv::write_row(out, {"model", "metric", "mean", "sd", "B", "k", "seed"});
  for (const auto& r : reports)
    csv::write_row(out, {r.model, to_string(r.kind), num(r.mean), num(r.sd), std::to_string(r.repeats),
                         std::to_string(r.folds), std::to_string(r.seed)});
}

Json ground_truth_json(const GroundTruth& truth) {
  Json j;
  j["mechanism"] = to_string(truth.mechanism);
  j["intercept"] = truth.intercept;
  j["noise_sd"] = truth.noise_sd;
  j["covariate_effects"] = truth.covariate_effects;
  if (!truth.beta.empty()) {
    j["levels"] = truth.levels;
    j["beta"] = truth.beta;
  }
  if (!truth.lmoment_coefficients.empty()) j["lmoment_coefficients"] = truth.lmoment_coefficients;
  Json subjects = Json::array();
  for (std::size_t i = 0; i < truth.signal.size(); ++i) {
    Json s{{"signal", truth.signal[i]}, {"linear_predictor", truth.linear_predictor[i]}};
    if (i < truth.laws.size()) {
      const auto& law = truth.laws[i];
      s["law"] = {{"family", to_string(law.family)},
                  {"location", law.location},
                  {"scale", law.scale},
                  {"shape_a", law.shape_a},
                  {"shape_b", law.shape_b}};
      if (!law.masses.empty()) s["law"]["masses"] = law.masses;
    }
    if (i < truth.lmoments.size()) s["lmoments"] = truth.lmoments[i];
    subjects.push_back(s);
  }
  j["subjects"] = subjects;
  if (truth.mechanism == Mechanism::jive) {
    j["joint_factors"] = matrix_json(truth.joint_factors);
    Json indiv = Json::object();
    for (std::size_t d = 0; d < truth.individual_factors.size(); ++d)
      indiv[truth.domain_names[d]] = matrix_json(truth.individual_factors[d]);
    j["individual_factors"] = indiv;
  }
  return j;
}

}  // namespace qdist
