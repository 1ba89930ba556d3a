#include "qdist/pglm.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "qdist/diagnostics.hpp"
#include "qdist/errors.hpp"

namespace qdist {

std::string to_string(Family family) {
  return family == Family::gaussian ? "gaussian" : "binomial";
}

Family parse_family(const std::string& name) {
  if (name == "gaussian" || name == "identity") return Family::gaussian;
  if (name == "binomial" || name == "logit") return Family::binomial;
  throw ValidationError("unknown family '" + name + "' (expected gaussian or binomial)");
}

std::size_t ModelSpec::penalty_count() const noexcept {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.penalties.size();
  return n;
}

void ModelSpec::validate() const {
  const Eigen::Index n = design.rows(), p = design.cols();
  if (n == 0 || p == 0) throw ValidationError("empty design matrix");
  if (!design.allFinite()) throw ValidationError("design matrix contains non-finite values");
  if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != p)
    throw ValidationError("column names do not match the design width");
  if (unpenalized < 1 || unpenalized > p)
    throw ValidationError("the design must start with an unpenalized intercept column");
  if ((design.col(0).array() != 1.0).any())
    throw ValidationError("the first design column must be the intercept (all ones)");
  Eigen::Index next = unpenalized;
  for (const auto& b : blocks) {
    if (b.start != next || b.size <= 0 || b.start + b.size > p)
      throw ValidationError("penalized block '" + b.name + "' is not contiguous with the layout");
    if (b.penalties.empty())
      throw ValidationError("penalized block '" + b.name + "' has no penalty");
    for (const auto& S : b.penalties) {
      if (S.rows() != b.size || S.cols() != b.size)
        throw ValidationError("penalty of block '" + b.name + "' does not conform to the block");
      if (!S.isApprox(S.transpose(), 1e-10) && (S - S.transpose()).norm() > 1e-12)
        throw ValidationError("penalty of block '" + b.name + "' is not symmetric");
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                 S, Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .minCoeff();
      if (min_eig < -1e-8 * std::max(1.0, S.norm()))
        throw ValidationError("penalty of block '" + b.name + "' is not positive semidefinite");
    }
    next = b.start + b.size;
  }
  if (next != p) throw ValidationError("design has columns outside the declared blocks");
}

Eigen::VectorXd PenalizedFit::block_coefficients(std::size_t block) const {
  const auto& b = blocks.at(block);
  return coefficients.segment(b.start, b.size);
}

double PenalizedFit::deviance_explained() const { return qdist::deviance_explained(*this); }

double inverse_link(Family family, double eta) {
  if (family == Family::gaussian) return eta;
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  // -2 log L for y in {0,1}: 2 sum [y softplus(-eta) + (1-y) softplus(eta)].
  double d = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    d += y(i) * softplus(-eta(i)) + (1.0 - y(i)) * softplus(eta(i));
  return 2.0 * d;
}

double null_deviance(Family family, const Eigen::VectorXd& y) {
  const double mean = y.mean();
  if (family == Family::gaussian) return (y.array() - mean).square().sum();
  if (mean <= 0.0 || mean >= 1.0) return 0.0;
  const double eta = std::log(mean / (1.0 - mean));
  return binomial_deviance(y, Eigen::VectorXd::Constant(y.size(), eta));
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

// Cholesky of a penalized normal matrix. Singular systems get a jitter of
// `jitter` times each diagonal entry, so columns on very different scales
// (large lambda next to unpenalized columns) are perturbed evenly.
Factorization factorize(const Eigen::MatrixXd& H, double jitter) {
  Factorization f;
  f.llt.compute(H);
  if (f.llt.info() == Eigen::Success && f.llt.rcond() > 1e-14) return f;
  const Eigen::VectorXd d = H.diagonal().cwiseAbs();
  const double floor = std::max(d.mean(), std::numeric_limits<double>::min()) * 1e-12;
  const Eigen::VectorXd added = jitter * d.cwiseMax(floor);
  f.jitter = added.maxCoeff();
  Eigen::MatrixXd Hj = H;
  Hj.diagonal() += added;
  f.llt.compute(Hj);
  if (f.llt.info() != Eigen::Success)
    throw NumericalError("penalized normal equations are not positive definite");
  return f;
}

// Solves H x = b with the (possibly jittered) factor, then refines against
// the unjittered H while the residual keeps shrinking.
Eigen::VectorXd refined_solve(const Factorization& f, const Eigen::MatrixXd& H, const Eigen::VectorXd& b) {
  Eigen::VectorXd x = f.llt.solve(b);
  Eigen::VectorXd r = b - H * x;
  double norm = r.norm();
  for (int k = 0; k < (f.jitter > 0.0 ? 10 : 1); ++k) {
    const Eigen::VectorXd next = x + f.llt.solve(r);
    const Eigen::VectorXd next_r = b - H * next;
    const double next_norm = next_r.norm();
    if (!(next_norm < norm)) break;
    x = next;
    r = next_r;
    norm = next_norm;
  }
  return x;
}

/// Fits one model at a time for a fixed (spec, y); caches what does not
/// depend on the smoothing parameters.
class PirlsEngine {
 public:
  PirlsEngine(const ModelSpec& spec, const Eigen::VectorXd& y, const PirlsOptions& options)
      : spec_(spec), y_(y), options_(options) {
    spec_.validate();
    if (y_.size() != spec_.rows())
      throw ValidationError("outcome length does not match the design rows");
    if (!y_.allFinite()) throw ValidationError("outcome contains non-finite values");
    if (spec_.family == Family::binomial && ((y_.array() != 0.0) && (y_.array() != 1.0)).any())
      throw ValidationError("binomial outcomes must be 0 or 1");
    if (spec_.family == Family::gaussian) {
      xtx_ = spec_.design.transpose() * spec_.design;
      xty_ = spec_.design.transpose() * y_;
    }
    null_deviance_ = null_deviance(spec_.family, y_);
  }

  std::size_t penalty_count() const { return spec_.penalty_count(); }

  Eigen::MatrixXd penalty(std::span<const double> lambdas) const {
    if (lambdas.size() != spec_.penalty_count()) {
      std::ostringstream msg;
      msg << "expected " << spec_.penalty_count() << " smoothing parameter(s), got "
          << lambdas.size();
      throw ValidationError(msg.str());
    }
    const Eigen::Index p = spec_.columns();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
    std::size_t m = 0;
    for (const auto& b : spec_.blocks) {
      for (const auto& Sb : b.penalties) {
        const double lambda = lambdas[m++];
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
          throw ValidationError("smoothing parameters must be finite and nonnegative");
        if (lambda != 0.0) S.block(b.start, b.start, b.size, b.size) += lambda * Sb;
      }
    }
    return S;
  }

  PenalizedFit fit(std::span<const double> lambdas, const Eigen::VectorXd* start = nullptr) const {
    const Eigen::MatrixXd S = penalty(lambdas);
    PenalizedFit out = spec_.family == Family::gaussian ? fit_gaussian(S) : fit_binomial(S, start);
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    return out;
  }

 private:
  PenalizedFit finish(const Eigen::VectorXd& beta, const Eigen::MatrixXd& xtwx,
                      const Eigen::MatrixXd& S, const Factorization& f, double deviance,
                      const Eigen::VectorXd& eta) const {
    PenalizedFit out;
    out.family = spec_.family;
    out.coefficients = beta;
    out.column_names = spec_.column_names;
    out.unpenalized = spec_.unpenalized;
    for (const auto& b : spec_.blocks) out.blocks.push_back({b.name, b.start, b.size});
    out.n = spec_.rows();
    out.jitter = f.jitter;

    const Eigen::Index p = spec_.columns();
    const Eigen::MatrixXd Hinv = f.llt.solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd F = Hinv * xtwx;  // influence in coefficient space
    out.edf = F.trace();
    for (const auto& b : spec_.blocks)
      out.block_edf.push_back(F.diagonal().segment(b.start, b.size).sum());

    out.deviance = deviance;
    out.null_deviance = null_deviance_;
    const double n = static_cast<double>(out.n);
    const double resid_df = n - out.edf;
    if (spec_.family == Family::gaussian)
      out.scale = resid_df > 0.0 ? deviance / resid_df : 0.0;
    else
      out.scale = 1.0;
    out.covariance = out.scale * Hinv;
    out.gcv = resid_df > 0.0 ? n * deviance / (resid_df * resid_df)
                             : std::numeric_limits<double>::infinity();
    out.linear_predictor = eta;
    out.fitted = eta.unaryExpr([this](double e) { return inverse_link(spec_.family, e); });

    const Eigen::VectorXd score = spec_.design.transpose() * (y_ - out.fitted) - S * beta;
    out.convergence.gradient_norm = score.cwiseAbs().maxCoeff();
    return out;
  }

  PenalizedFit fit_gaussian(const Eigen::MatrixXd& S) const {
    const Eigen::MatrixXd H = xtx_ + S;
    const Factorization f = factorize(H, options_.jitter);
    const Eigen::VectorXd beta = refined_solve(f, H, xty_);
    const Eigen::VectorXd eta = spec_.design * beta;
    const double deviance = (y_ - eta).squaredNorm();
    PenalizedFit out = finish(beta, xtx_, S, f, deviance, eta);
    out.convergence.iterations = 1;
    out.convergence.converged = true;
    return out;
  }

  PenalizedFit fit_binomial(const Eigen::MatrixXd& S, const Eigen::VectorXd* start) const {
    const Eigen::MatrixXd& X = spec_.design;
    const Eigen::Index n = X.rows();
    Eigen::VectorXd beta;
    Eigen::VectorXd eta(n), mu(n), w(n);

    auto update = [&](const Eigen::VectorXd& b) {
      eta = X * b;
      for (Eigen::Index i = 0; i < n; ++i) {
        mu(i) = inverse_link(Family::binomial, eta(i));
        w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-300);
      }
    };
    auto penalized_deviance = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& e) {
      return binomial_deviance(y_, e) + b.dot(S * b);
    };

    if (start && start->size() == X.cols()) {
      beta = *start;
    } else {
      // Working-response start from mu = (y + 0.5) / 2.
      for (Eigen::Index i = 0; i < n; ++i) {
        mu(i) = (y_(i) + 0.5) / 2.0;
        eta(i) = std::log(mu(i) / (1.0 - mu(i)));
        w(i) = mu(i) * (1.0 - mu(i));
      }
      const Eigen::VectorXd z = eta + (y_ - mu).cwiseQuotient(w);
      const Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X + S;
      beta = factorize(H, options_.jitter).llt.solve(X.transpose() * w.cwiseProduct(z));
    }
    update(beta);
    double current = penalized_deviance(beta, eta);

    ConvergenceReport report;
    Factorization f;
    Eigen::MatrixXd xtwx;
    double best_score = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int iter = 1;; ++iter) {
      xtwx = X.transpose() * w.asDiagonal() * X;
      f = factorize(xtwx + S, options_.jitter);
      const Eigen::VectorXd score = X.transpose() * (y_ - mu) - S * beta;
      report.gradient_norm = score.cwiseAbs().maxCoeff();
      report.iterations = iter - 1;
      if (report.gradient_norm < options_.gradient_tolerance) {
        report.converged = true;
        break;
      }
      // Newton steps that no longer halve the score have reached the rounding
      // floor of the score itself; accept once it is small.
      if (report.gradient_norm < 0.5 * best_score) {
        best_score = report.gradient_norm;
        stagnant = 0;
      } else if (++stagnant >= 5 && report.gradient_norm < 1e-6) {
        report.converged = true;
        break;
      }
      if (eta.cwiseAbs().maxCoeff() > 1.6 * options_.separation_eta)
        throw SeparationError("separation suspected: linear predictor diverging");
      if (iter > options_.max_iterations) {
        if (eta.cwiseAbs().maxCoeff() > options_.separation_eta)
          throw SeparationError("separation suspected: linear predictor diverging");
        std::ostringstream msg;
        msg << "P-IRLS did not converge in " << options_.max_iterations
            << " iterations (score norm " << report.gradient_norm << ")";
        throw ConvergenceError(msg.str(), std::vector<double>(beta.data(), beta.data() + beta.size()));
      }

      const Eigen::VectorXd delta = refined_solve(f, xtwx + S, score);
      // beta'S beta is a sum of large cancelling terms when S is big and beta
      // has a component in its null space; its rounding error bounds how
      // finely objective values can be compared.
      const double noise = 1e-12 * std::abs(current) +
                           1e-13 * beta.cwiseAbs().dot(S.cwiseAbs() * beta.cwiseAbs());
      double step = 1.0;
      Eigen::VectorXd candidate;
      Eigen::VectorXd candidate_eta;
      double value = 0.0;
      for (int half = 0; half < 40; ++half) {
        candidate = beta + step * delta;
        candidate_eta = X * candidate;
        value = penalized_deviance(candidate, candidate_eta);
        if (std::isfinite(value) && value <= current + noise) break;
        step *= 0.5;
      }
      report.final_step_norm = (step * delta).cwiseAbs().maxCoeff();
      if (report.final_step_norm <= 1e-14 * (1.0 + beta.cwiseAbs().maxCoeff()) &&
          report.gradient_norm < 1e-6) {
        // Stalled at machine precision; the score is already small.
        report.converged = true;
        report.iterations = iter;
        break;
      }
      beta = candidate;
      update(beta);
      current = value;
    }

    if (eta.cwiseAbs().maxCoeff() > options_.separation_eta)
      throw SeparationError("separation suspected: fitted probabilities at 0 or 1");
    // The score tolerance is met before |eta| reaches separation_eta when the
    // classes are completely separated; the deviance then collapses to zero.
    const double deviance = binomial_deviance(y_, eta);
    if (deviance < 1e-6 * null_deviance_)
      throw SeparationError("separation suspected: deviance is numerically zero");

    PenalizedFit out = finish(beta, xtwx, S, f, deviance, eta);
    out.convergence.iterations = report.iterations;
    out.convergence.final_step_norm = report.final_step_norm;
    out.convergence.converged = report.converged;
    return out;
  }

  const ModelSpec& spec_;
  const Eigen::VectorXd& y_;
  PirlsOptions options_;
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  double null_deviance_ = 0.0;
};

bool better(double gcv, double best, const std::vector<double>& lambdas,
            const std::vector<double>& best_lambdas) {
  const double tol = 1e-12 * std::max(std::abs(best), 1e-300);
  if (gcv < best - tol) return true;
  if (gcv > best + tol) return false;
  double a = 0.0, b = 0.0;
  for (double l : lambdas) a += std::log(std::max(l, 1e-300));
  for (double l : best_lambdas) b += std::log(std::max(l, 1e-300));
  return a > b;
}

}  // namespace

PenalizedFit fit_pirls(const ModelSpec& spec, const Eigen::VectorXd& y,
                       std::span<const double> lambdas, const PirlsOptions& options) {
  return PirlsEngine(spec, y, options).fit(lambdas);
}

std::vector<double> default_lambda_grid(std::size_t points, double lo, double hi) {
  if (points == 0 || !(lo > 0.0) || !(hi >= lo))
    throw ValidationError("lambda grid needs positive bounds and at least one point");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  return grid;
}

PenalizedFit select_lambda_gcv(const ModelSpec& spec, const Eigen::VectorXd& y,
                               const GcvOptions& options) {
  const PirlsEngine engine(spec, y, options.pirls);
  const std::size_t m = engine.penalty_count();
  if (m == 0) return engine.fit({});
  if (options.grid.empty()) throw ValidationError("lambda grid is empty");
  for (double l : options.grid)
    if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("lambda grid must be positive");
  std::vector<double> grid = options.grid;
  std::sort(grid.begin(), grid.end());

  std::optional<PenalizedFit> best;
  std::string last_error;
  std::size_t failures = 0;
  Eigen::VectorXd warm;

  auto try_fit = [&](const std::vector<double>& lambdas) -> std::optional<PenalizedFit> {
    try {
      PenalizedFit f = engine.fit(lambdas, warm.size() ? &warm : nullptr);
      warm = f.coefficients;
      return f;
    } catch (const NumericalError& e) {
      ++failures;
      last_error = e.what();
      warm.resize(0);
      return std::nullopt;
    }
  };
  auto consider = [&](PenalizedFit&& f) {
    if (!best || better(f.gcv, best->gcv, f.lambdas, best->lambdas)) best = std::move(f);
  };

  if (m <= options.max_product_penalties) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= grid.size();
    for (std::size_t cell = 0; cell < total; ++cell) {
      std::vector<double> lambdas(m);
      std::size_t rest = cell;
      for (std::size_t i = m; i-- > 0;) {
        lambdas[i] = grid[rest % grid.size()];
        rest /= grid.size();
      }
      if (auto f = try_fit(lambdas)) consider(std::move(*f));
    }
  } else {
    std::vector<double> lambdas(m, grid[grid.size() / 2]);
    for (int sweep = 0; sweep < options.coordinate_sweeps; ++sweep) {
      bool changed = false;
      for (std::size_t i = 0; i < m; ++i) {
        const double before = lambdas[i];
        for (double candidate : grid) {
          lambdas[i] = candidate;
          if (auto f = try_fit(lambdas)) consider(std::move(*f));
        }
        if (best) lambdas = best->lambdas;
        else lambdas[i] = before;
        changed = changed || lambdas[i] != before;
      }
      if (!changed) break;
    }
  }

  if (!best) throw NumericalError("GCV search failed at every grid point: " + last_error);
  if (failures > 0) {
    std::ostringstream msg;
    msg << "GCV search skipped " << failures << " failing grid point(s): " << last_error;
    warn(msg.str());
  }
  for (double l : best->lambdas)
    if (grid.size() > 1 && (l == grid.front() || l == grid.back())) {
      std::ostringstream msg;
      msg << "GCV selected a smoothing parameter at the grid boundary (" << l << ")";
      warn(msg.str());
      break;
    }
  return *best;
}

PenalizedFit select_lambda_gcv(const ModelSpec& spec, const Eigen::VectorXd& y,
                               std::span<const double> grid) {
  GcvOptions options;
  options.grid.assign(grid.begin(), grid.end());
  return select_lambda_gcv(spec, y, options);
}

Band pointwise_ci(const PenalizedFit& fit, Eigen::Index first_column,
                  const Eigen::MatrixXd& basis_eval, double z) {
  const Eigen::Index k = basis_eval.cols();
  if (first_column < 0 || first_column + k > fit.coefficients.size()) {
    std::ostringstream msg;
    msg << "basis with " << k << " columns does not fit the coefficient vector at column "
        << first_column;
    throw ValidationError(msg.str());
  }
  const Eigen::VectorXd beta = fit.coefficients.segment(first_column, k);
  const Eigen::MatrixXd V = fit.covariance.block(first_column, first_column, k, k);
  Band band;
  band.estimate = basis_eval * beta;
  const Eigen::VectorXd var = (basis_eval * V).cwiseProduct(basis_eval).rowwise().sum();
  const Eigen::VectorXd se = var.cwiseMax(0.0).cwiseSqrt();
  band.lower = band.estimate - z * se;
  band.upper = band.estimate + z * se;
  return band;
}

Band pointwise_ci(const PenalizedFit& fit, std::size_t block, const Eigen::MatrixXd& basis_eval,
                  double z) {
  const auto& b = fit.blocks.at(block);
  if (basis_eval.cols() != b.size)
    throw ValidationError("basis evaluation does not match the penalized block size");
  return pointwise_ci(fit, b.start, basis_eval, z);
}

double deviance_explained(const PenalizedFit& fit) {
  if (!(fit.null_deviance > 0.0))
    throw ValidationError("null deviance is zero (constant outcome); deviance explained undefined");
  return 1.0 - fit.deviance / fit.null_deviance;
}

std::vector<CoefficientTest> wald_tests(const PenalizedFit& fit) {
  std::vector<CoefficientTest> out;
  const double df = static_cast<double>(fit.n) - fit.edf;
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    CoefficientTest t;
    t.name = j < static_cast<Eigen::Index>(fit.column_names.size())
                 ? fit.column_names[static_cast<std::size_t>(j)]
                 : "x" + std::to_string(j);
    t.estimate = fit.coefficients(j);
    t.std_error = std::sqrt(std::max(fit.covariance(j, j), 0.0));
    t.statistic = t.std_error > 0.0 ? t.estimate / t.std_error : 0.0;
    const double a = std::abs(t.statistic);
    if (t.std_error == 0.0) {
      t.p_value = 1.0;
    } else if (fit.family == Family::gaussian && df > 0.0) {
      t.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), a));
    } else {
      t.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), a));
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace qdist
