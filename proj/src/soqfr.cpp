#include "qdist/soqfr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdist/diagnostics.hpp"
#include "qdist/errors.hpp"
#include "qdist/lmoments.hpp"

namespace qdist {

namespace {

// Subjects x grid matrix of quantile values.
Eigen::MatrixXd quantile_matrix(const RepeatedMeasuresDataset& data, const std::string& feature,
                                const GridPtr& grid) {
  const auto curves = subject_quantile_functions(data, feature, grid);
  Eigen::MatrixXd Q(static_cast<Eigen::Index>(curves.size()),
                    static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = 0; j < grid->size(); ++j)
      Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = curves[i].values[j];
  return Q;
}

Eigen::VectorXd grid_weights(const QuantileGrid& grid) {
  const auto w = grid.weights();
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

// Columns are integral Q_i(p) theta_k(p) dp on the grid.
Eigen::MatrixXd functional_columns(const Eigen::MatrixXd& Q, const QuantileGrid& grid,
                                   const Eigen::MatrixXd& theta_on_grid) {
  return Q * grid_weights(grid).asDiagonal() * theta_on_grid;
}

// Grid x count matrix of P_0..P_{count-1}.
Eigen::MatrixXd legendre_on_grid(const QuantileGrid& grid, int count) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(grid.size()), count);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto values = legendre_shifted_all(count, grid.level(j));
    for (int r = 0; r < count; ++r) out(static_cast<Eigen::Index>(j), r) = values[r];
  }
  return out;
}

// Integral of P_a'' P_b'' over [0, 1] from the exact power-form coefficients.
Eigen::MatrixXd legendre_second_derivative_penalty(int count) {
  const LegendreBasis basis(std::max(count - 1, 0));
  std::vector<std::vector<double>> second(count);
  for (int r = 0; r < count; ++r) {
    second[r].assign(static_cast<std::size_t>(std::max(r - 1, 0)), 0.0);
    for (int k = 2; k <= r; ++k)
      second[r][k - 2] = static_cast<double>(k) * (k - 1) * static_cast<double>(basis.coefficient(r, k));
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < second[a].size(); ++i)
        for (std::size_t j = 0; j < second[b].size(); ++j)
          sum += second[a][i] * second[b][j] / static_cast<double>(i + j + 1);
      P(a, b) = sum;
    }
  return 0.5 * (P + P.transpose());
}

// Orthonormal basis (m x (m-1)) of the complement of the ones vector.
Eigen::MatrixXd sum_to_zero_basis(Eigen::Index m) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  return Q.rightCols(m - 1);
}

Eigen::MatrixXd covariate_columns(const RepeatedMeasuresDataset& data,
                                  const std::vector<std::string>& names) {
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::size_t idx = data.covariate_index(names[c]);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double v = data.subjects[i].covariates.at(idx);
      if (!std::isfinite(v))
        throw ValidationError("covariate '" + names[c] + "' is not finite for subject " +
                              data.subjects[i].id);
      Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return Z;
}

std::vector<std::string> indexed_names(const std::string& stem, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index k = 0; k < count; ++k) out.push_back(stem + "[" + std::to_string(k + 1) + "]");
  return out;
}

Eigen::VectorXd column(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    out[static_cast<std::size_t>(i)] =
        points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return out;
}

// Evaluates a basis after clamping inputs to its domain.
Eigen::MatrixXd evaluate_clamped(const SplineBasis& basis, std::span<const double> x,
                                 const std::string& what) {
  std::vector<double> clamped(x.begin(), x.end());
  std::size_t outside = 0;
  for (double& v : clamped) {
    if (!basis.contains(v)) ++outside;
    v = basis.clamp(v);
  }
  if (outside > 0) {
    std::ostringstream msg;
    msg << outside << " value(s) of " << what << " outside the training range ["
        << basis.lower() << ", " << basis.upper() << "] were clamped";
    warn(msg.str());
  }
  return basis.evaluate(std::span<const double>(clamped), 0);
}

// (basis(x) - centre) * transform: a centred smooth in model coordinates.
Eigen::MatrixXd centred_smooth_rows(const Eigen::MatrixXd& basis_rows, const ModelTerm& term) {
  Eigen::MatrixXd rows = basis_rows;
  if (term.constrained) rows.rowwise() -= term.centre;
  return rows * term.transform;
}

SmoothEffect smooth_effect(const FittedModel& model, std::size_t term, const std::string& name,
                           std::vector<double> x, const Eigen::MatrixXd& basis_rows) {
  const auto& t = model.terms()[term];
  const Eigen::MatrixXd rows = centred_smooth_rows(basis_rows, t);
  const Band band = pointwise_ci(model.fit(), model.term_start(term), rows);
  SmoothEffect effect;
  effect.name = name;
  effect.x = std::move(x);
  effect.estimate = band.estimate;
  effect.lower = band.lower;
  effect.upper = band.upper;
  // Block edf: the term's columns are a single penalized block when penalized.
  const auto& fit = model.fit();
  for (std::size_t b = 0; b < fit.blocks.size(); ++b)
    if (fit.blocks[b].start == model.term_start(term)) effect.edf = fit.block_edf[b];
  return effect;
}

}  // namespace

std::vector<double> BinSpec::edges() const {
  validate();
  return linspace(lower, upper, bins + 1);
}

std::vector<double> BinSpec::midpoints() const {
  const auto e = edges();
  std::vector<double> out(static_cast<std::size_t>(bins));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = 0.5 * (e[j] + e[j + 1]);
  return out;
}

void BinSpec::validate() const {
  if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper))
    throw ValidationError("bin range must satisfy lower < upper");
  if (bins < 2) throw ValidationError("at least two bins are required");
}

HistogramPredictor subject_histograms(const RepeatedMeasuresDataset& data,
                                      const std::string& feature, const BinSpec& bins) {
  data.require_feature(feature, 1);
  HistogramPredictor out;
  out.edges = bins.edges();
  out.midpoints = bins.midpoints();
  out.frequencies = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.size()), bins.bins);
  const double width = (bins.upper - bins.lower) / bins.bins;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& sample = data.subjects[i].observations.at(feature);
    for (double x : sample) {
      if (!std::isfinite(x))
        throw ValidationError("non-finite observation for subject " + data.subjects[i].id);
      if (x < bins.lower || x > bins.upper) ++clamped;
      const double pos = std::floor((x - bins.lower) / width);
      const auto j = static_cast<Eigen::Index>(std::clamp(pos, 0.0, bins.bins - 1.0));
      out.frequencies(static_cast<Eigen::Index>(i), j) += 1.0;
    }
    out.frequencies.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(sample.size());
  }
  if (clamped > 0) {
    std::ostringstream msg;
    msg << clamped << " observation(s) of '" << feature << "' outside [" << bins.lower << ", "
        << bins.upper << "] were assigned to the end bins";
    warn(msg.str());
  }
  return out;
}

Family resolve_family(const RepeatedMeasuresDataset& data, const std::optional<Family>& family) {
  if (family) return *family;
  return data.outcome_kind() == OutcomeKind::binary ? Family::binomial : Family::gaussian;
}

std::vector<double> FittedModel::effective_lambdas() const {
  std::vector<double> out;
  std::size_t m = 0;
  for (const auto& t : terms_)
    if (t.penalized)
      for (double s : t.penalty_scales) out.push_back(fit_.lambdas.at(m++) * s);
  return out;
}

Eigen::Index FittedModel::term_start(std::size_t term) const {
  // Layout: intercept, covariates, unpenalized terms, penalized terms.
  Eigen::Index start = 1 + static_cast<Eigen::Index>(covariates_.size());
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      if (terms_[t].penalized != (pass == 1)) continue;
      if (t == term) return start;
      start += terms_[t].transform.cols();
    }
  throw ValidationError("term index out of range");
}

Eigen::VectorXd FittedModel::term_coefficients(std::size_t term) const {
  return fit_.coefficients.segment(term_start(term), terms_.at(term).transform.cols());
}

Eigen::MatrixXd FittedModel::design(const RepeatedMeasuresDataset& data) const {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd X(n, fit_.coefficients.size());
  X.col(0).setOnes();
  X.middleCols(1, static_cast<Eigen::Index>(covariates_.size())) =
      covariate_columns(data, covariates_);
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const auto& term = terms_[t];
    Eigen::MatrixXd raw = term.columns(data);
    if (term.constrained) raw.rowwise() -= term.centre;
    X.middleCols(term_start(t), term.transform.cols()) = raw * term.transform;
  }
  return X;
}

Eigen::VectorXd FittedModel::linear_predictor(const RepeatedMeasuresDataset& data) const {
  return design(data) * fit_.coefficients;
}

Eigen::VectorXd FittedModel::predict(const RepeatedMeasuresDataset& data) const {
  const Family family = fit_.family;
  return linear_predictor(data).unaryExpr([family](double e) { return inverse_link(family, e); });
}

void FittedModel::train(const RepeatedMeasuresDataset& data, const RegressionOptions& options,
                        std::vector<ModelTerm> terms,
                        std::optional<std::vector<double>> fixed_lambdas) {
  if (data.size() == 0) throw ValidationError("dataset has no subjects");
  covariates_ = options.covariates;
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());

  // Raw term columns with centring frozen from this (training) data.
  std::vector<Eigen::MatrixXd> blocks(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    auto& term = terms[t];
    Eigen::MatrixXd raw = term.columns(data);
    if (raw.rows() != n) throw ValidationError("term '" + term.name + "' has wrong row count");
    const Eigen::Index m = raw.cols();
    if (term.constrained) {
      if (m < 2) throw ValidationError("constrained term '" + term.name + "' needs >= 2 columns");
      term.centre = raw.colwise().mean();
      raw.rowwise() -= term.centre;
      term.transform = sum_to_zero_basis(m);
    } else {
      term.transform = Eigen::MatrixXd::Identity(m, m);
    }
    for (auto& S : term.penalties) S = term.transform.transpose() * S * term.transform;
    blocks[t] = raw * term.transform;
    term.penalty_scales.clear();
    // Scale from the centred columns, so a constant offset in the term
    // (absorbed by the intercept anyway) does not change the smoothing.
    const Eigen::MatrixXd spread = blocks[t].rowwise() - blocks[t].colwise().mean();
    const double xnorm = (spread.transpose() * spread).norm();
    for (const auto& S : term.penalties) {
      const double snorm = S.norm();
      term.penalty_scales.push_back(snorm > 0.0 && xnorm > 0.0 ? xnorm / snorm : 1.0);
    }
    if (!term.penalized) term.penalties.clear(), term.penalty_scales.clear();
  }

  ModelSpec spec;
  spec.family = resolve_family(data, options.family);
  Eigen::Index width = 1 + static_cast<Eigen::Index>(covariates_.size());
  for (const auto& b : blocks) width += b.cols();
  spec.design.resize(n, width);
  spec.design.col(0).setOnes();
  spec.column_names.push_back("(Intercept)");
  spec.design.middleCols(1, static_cast<Eigen::Index>(covariates_.size())) =
      covariate_columns(data, covariates_);
  for (const auto& c : covariates_) spec.column_names.push_back(c);
  Eigen::Index col = 1 + static_cast<Eigen::Index>(covariates_.size());
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t t = 0; t < terms.size(); ++t) {
      auto& term = terms[t];
      if (term.penalized != (pass == 1)) continue;
      const Eigen::Index m = blocks[t].cols();
      spec.design.middleCols(col, m) = blocks[t];
      const auto names = term.constrained ? indexed_names(term.name, m) : term.column_names;
      spec.column_names.insert(spec.column_names.end(), names.begin(), names.end());
      if (pass == 0) {
        spec.unpenalized = col + m;
      } else {
        PenalizedBlock block{term.name, col, m, {}};
        for (std::size_t s = 0; s < term.penalties.size(); ++s)
          block.penalties.push_back(term.penalty_scales[s] * term.penalties[s]);
        spec.blocks.push_back(std::move(block));
      }
      col += m;
    }
  if (spec.blocks.empty()) spec.unpenalized = width;
  else spec.unpenalized = spec.blocks.front().start;

  const Eigen::VectorXd y = column(data.outcomes());
  if (fixed_lambdas) {
    fit_ = fit_pirls(spec, y, *fixed_lambdas, options.pirls);
  } else {
    GcvOptions gcv;
    gcv.grid = options.lambda_grid;
    gcv.pirls = options.pirls;
    fit_ = select_lambda_gcv(spec, y, gcv);
  }
  terms_ = std::move(terms);
}

SoqfrModel fit_soqfr(const RepeatedMeasuresDataset& data, const SoqfrOptions& options) {
  if (options.basis_size < 1) throw ValidationError("SOQFR basis size must be at least 1");
  SoqfrModel model;
  model.grid = make_grid(options.grid_resolution);
  model.basis = options.basis;
  const GridPtr grid = model.grid;

  Eigen::MatrixXd theta;
  Eigen::MatrixXd penalty;
  if (options.basis == BasisKind::legendre) {
    if (options.basis_size > kMaxLegendreDegree + 1)
      throw ValidationError("Legendre basis size exceeds the supported degree");
    theta = legendre_on_grid(*grid, options.basis_size);
    if (options.basis_size >= 3) penalty = legendre_second_derivative_penalty(options.basis_size);
  } else {
    const SplineBasis basis = build_basis(0.0, 1.0, options.degree, options.basis_size);
    theta = basis.evaluate(grid->levels(), 0);
    if (options.degree >= 2 && options.basis_size >= 3) penalty = second_derivative_penalty(basis).matrix;
  }

  ModelTerm term;
  term.name = "beta";
  term.column_names = indexed_names("beta", theta.cols());
  term.columns = [feature = options.feature, grid, theta](const RepeatedMeasuresDataset& d) {
    return functional_columns(quantile_matrix(d, feature, grid), *grid, theta);
  };
  term.penalized = penalty.size() > 0;
  if (term.penalized) term.penalties.push_back(penalty);

  std::optional<std::vector<double>> fixed;
  if (options.lambda) {
    if (term.penalized) fixed = std::vector<double>{*options.lambda};
    else fixed = std::vector<double>{};
  } else if (!term.penalized) {
    fixed = std::vector<double>{};
  }
  model.train(data, options, {term}, fixed);

  const Band band = pointwise_ci(model.fit(), model.term_start(0), theta);
  model.beta.levels.assign(grid->levels().begin(), grid->levels().end());
  model.beta.estimate = band.estimate;
  model.beta.lower = band.lower;
  model.beta.upper = band.upper;
  return model;
}

FgamModel fit_fgam_qf(const RepeatedMeasuresDataset& data, const FgamOptions& options) {
  FgamModel model;
  model.grid = make_grid(options.grid_resolution);
  const GridPtr grid = model.grid;
  const Eigen::MatrixXd Q = quantile_matrix(data, options.feature, grid);
  const double lo = Q.minCoeff(), hi = Q.maxCoeff();
  if (!(hi > lo)) throw ValidationError("degenerate quantile range for feature '" + options.feature + "'");
  const double pad = options.q_margin * (hi - lo);
  model.q_lower = lo - pad;
  model.q_upper = hi + pad;

  const SplineBasis basis_q = build_basis(model.q_lower, model.q_upper, options.degree, options.q_size);
  const SplineBasis basis_p = build_basis(0.0, 1.0, options.degree, options.p_size);
  const Eigen::MatrixXd p_on_grid = basis_p.evaluate(grid->levels(), 0);

  ModelTerm term;
  term.name = "surface";
  term.columns = [feature = options.feature, grid, basis_q, p_on_grid](const RepeatedMeasuresDataset& d) {
    const Eigen::MatrixXd Qd = quantile_matrix(d, feature, grid);
    Eigen::MatrixXd W(Qd.rows(), static_cast<Eigen::Index>(basis_q.size()) * p_on_grid.cols());
    std::vector<double> row(static_cast<std::size_t>(Qd.cols()));
    for (Eigen::Index i = 0; i < Qd.rows(); ++i) {
      for (Eigen::Index j = 0; j < Qd.cols(); ++j) row[static_cast<std::size_t>(j)] = Qd(i, j);
      W.row(i) = tensor_design_row(row, basis_q, p_on_grid, *grid).transpose();
    }
    return W;
  };
  term.penalized = true;
  term.constrained = true;
  const PenaltyMatrix Dq = second_difference_penalty(options.q_size);
  const PenaltyMatrix Dp = second_difference_penalty(options.p_size);
  term.penalties.push_back(kronecker_penalty(Dq, Dp, 1.0, 0.0).matrix);
  term.penalties.push_back(kronecker_penalty(Dq, Dp, 0.0, 1.0).matrix);
  model.train(data, options, {term}, std::nullopt);

  const ModelTerm& fitted = model.terms()[0];
  const Eigen::VectorXd raw = fitted.transform * model.term_coefficients(0);
  const double offset = fitted.centre.dot(raw);
  const Eigen::MatrixXd Theta =
      Eigen::Map<const Eigen::MatrixXd>(raw.data(), options.p_size, options.q_size).transpose();

  auto& s = model.surface;
  s.q_grid = linspace(model.q_lower, model.q_upper, options.q_points);
  s.p_grid.assign(grid->levels().begin(), grid->levels().end());
  const Eigen::MatrixXd Bq = basis_q.evaluate(s.q_grid, 0);
  s.values = (Bq * Theta * p_on_grid.transpose()).array() - offset;
  s.slice = [Bq, Theta, basis_p, offset](double p) -> Eigen::VectorXd {
    return (Bq * Theta * basis_p.evaluate(p, 0)).array() - offset;
  };
  model.slice_levels = options.slice_levels;
  return model;
}

namespace {

Eigen::MatrixXd lmoment_matrix(const RepeatedMeasuresDataset& data, const std::string& feature,
                               const GridPtr& grid, int order) {
  const auto curves = subject_quantile_functions(data, feature, grid);
  Eigen::MatrixXd L(static_cast<Eigen::Index>(curves.size()), order);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto lm = lmoments_from_quantile(curves[i], order);
    for (int r = 0; r < order; ++r) L(static_cast<Eigen::Index>(i), r) = lm.values[r];
  }
  return L;
}

void check_order(int order) {
  if (order < 1 || order > kMaxLegendreDegree + 1)
    throw ValidationError("L-moment order must be between 1 and " +
                          std::to_string(kMaxLegendreDegree + 1));
}

}  // namespace

SoqfrLModel fit_soqfr_l(const RepeatedMeasuresDataset& data, const SoqfrLOptions& options) {
  check_order(options.order);
  SoqfrLModel model;
  model.order = options.order;
  const GridPtr grid = make_grid(options.grid_resolution);
  ModelTerm term;
  term.name = "lmoments";
  for (int r = 1; r <= options.order; ++r) term.column_names.push_back("L" + std::to_string(r));
  term.columns = [feature = options.feature, grid, order = options.order](const RepeatedMeasuresDataset& d) {
    return lmoment_matrix(d, feature, grid, order);
  };
  model.train(data, options, {term}, std::vector<double>{});
  model.tests = wald_tests(model.fit());

  const Eigen::MatrixXd P = legendre_on_grid(*grid, options.order);
  const Band band = pointwise_ci(model.fit(), model.term_start(0), P);
  model.induced_beta.levels.assign(grid->levels().begin(), grid->levels().end());
  model.induced_beta.estimate = band.estimate;
  model.induced_beta.lower = band.lower;
  model.induced_beta.upper = band.upper;
  return model;
}

GamLModel fit_gam_lmoments(const RepeatedMeasuresDataset& data, const GamLOptions& options) {
  check_order(options.order);
  GamLModel model;
  model.order = options.order;
  const GridPtr grid = make_grid(options.grid_resolution);
  const Eigen::MatrixXd L = lmoment_matrix(data, options.feature, grid, options.order);

  std::vector<ModelTerm> terms;
  std::vector<SplineBasis> bases;
  for (int r = 0; r < options.order; ++r) {
    const std::string name = "L" + std::to_string(r + 1);
    const double lo = L.col(r).minCoeff(), hi = L.col(r).maxCoeff();
    if (!(hi - lo > 1e-12 * std::max(1.0, std::abs(hi))))
      throw ValidationError("degenerate smooth covariate: " + name + " is constant across subjects");
    bases.push_back(build_basis(lo, hi, options.degree, options.basis_size));
    ModelTerm term;
    term.name = "s(" + name + ")";
    term.columns = [feature = options.feature, grid, order = options.order, r, basis = bases.back(),
                    name](const RepeatedMeasuresDataset& d) {
      const Eigen::MatrixXd Ld = lmoment_matrix(d, feature, grid, order);
      std::vector<double> x(Ld.col(r).data(), Ld.col(r).data() + Ld.rows());
      return evaluate_clamped(basis, x, name);
    };
    term.penalized = true;
    term.constrained = true;
    term.penalties.push_back(second_derivative_penalty(bases.back()).matrix);
    terms.push_back(std::move(term));
  }
  model.train(data, options, std::move(terms), std::nullopt);

  for (int r = 0; r < options.order; ++r) {
    const auto& basis = bases[static_cast<std::size_t>(r)];
    auto x = linspace(basis.lower(), basis.upper(), 50);
    const Eigen::MatrixXd rows = basis.evaluate(x, 0);
    model.smooths.push_back(smooth_effect(model, static_cast<std::size_t>(r),
                                          "L" + std::to_string(r + 1), std::move(x), rows));
  }
  return model;
}

HistogramModel fit_histogram_glm(const RepeatedMeasuresDataset& data,
                                 const HistogramOptions& options) {
  options.bins.validate();
  HistogramModel model;
  model.bins = options.bins;
  const auto mids = options.bins.midpoints();
  const SplineBasis basis = build_basis(options.bins.lower, options.bins.upper, options.degree,
                                        options.basis_size);
  const Eigen::MatrixXd theta = basis.evaluate(mids, 0);

  ModelTerm term;
  term.name = "f_x";
  term.columns = [feature = options.feature, bins = options.bins, theta](const RepeatedMeasuresDataset& d) {
    return Eigen::MatrixXd(subject_histograms(d, feature, bins).frequencies * theta);
  };
  term.penalized = options.degree >= 2;
  term.constrained = true;
  if (term.penalized) term.penalties.push_back(second_derivative_penalty(basis).matrix);
  model.train(data, options, {term}, term.penalized ? std::nullopt
                                                    : std::optional<std::vector<double>>(std::vector<double>{}));
  model.effect = smooth_effect(model, 0, "f_x", mids, theta);
  return model;
}

ModelRecipe soqfr_recipe(SoqfrOptions options) {
  return [options](const RepeatedMeasuresDataset& train) -> std::unique_ptr<FittedModel> {
    return std::make_unique<SoqfrModel>(fit_soqfr(train, options));
  };
}

ModelRecipe fgam_recipe(FgamOptions options) {
  return [options](const RepeatedMeasuresDataset& train) -> std::unique_ptr<FittedModel> {
    return std::make_unique<FgamModel>(fit_fgam_qf(train, options));
  };
}

ModelRecipe soqfr_l_recipe(SoqfrLOptions options) {
  return [options](const RepeatedMeasuresDataset& train) -> std::unique_ptr<FittedModel> {
    return std::make_unique<SoqfrLModel>(fit_soqfr_l(train, options));
  };
}

ModelRecipe gam_l_recipe(GamLOptions options) {
  return [options](const RepeatedMeasuresDataset& train) -> std::unique_ptr<FittedModel> {
    return std::make_unique<GamLModel>(fit_gam_lmoments(train, options));
  };
}

ModelRecipe histogram_recipe(HistogramOptions options) {
  return [options](const RepeatedMeasuresDataset& train) -> std::unique_ptr<FittedModel> {
    return std::make_unique<HistogramModel>(fit_histogram_glm(train, options));
  };
}

}  // namespace qdist
