#include "qdist/simulate.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qdist/errors.hpp"
#include "qdist/lmoments.hpp"
#include "qdist/quantiles.hpp"
#include "qdist/rng.hpp"

namespace qdist {

std::string to_string(SubjectFamily family) {
  switch (family) {
    case SubjectFamily::gaussian: return "gaussian";
    case SubjectFamily::exponential: return "exponential";
    case SubjectFamily::uniform: return "uniform";
    case SubjectFamily::beta: return "beta";
    case SubjectFamily::piecewise_uniform: return "piecewise_uniform";
  }
  return "unknown";
}

std::string to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::constant_beta: return "constant_beta";
    case Mechanism::beta_curve: return "beta_curve";
    case Mechanism::lmoment_linear: return "lmoment_linear";
    case Mechanism::surface: return "surface";
    case Mechanism::jive: return "jive";
  }
  return "unknown";
}

SubjectFamily parse_subject_family(const std::string& name) {
  for (auto f : {SubjectFamily::gaussian, SubjectFamily::exponential, SubjectFamily::uniform, SubjectFamily::beta,
                 SubjectFamily::piecewise_uniform})
    if (to_string(f) == name) return f;
  throw ValidationError("unknown subject family '" + name + "'");
}

Mechanism parse_mechanism(const std::string& name) {
  for (auto m : {Mechanism::constant_beta, Mechanism::beta_curve, Mechanism::lmoment_linear,
                 Mechanism::surface, Mechanism::jive})
    if (to_string(m) == name) return m;
  throw ValidationError("unknown outcome mechanism '" + name + "'");
}

double SubjectLaw::quantile(double p) const {
  switch (family) {
    case SubjectFamily::gaussian:
      return location + scale * boost::math::quantile(boost::math::normal(), p);
    case SubjectFamily::exponential:
      return location - scale * std::log1p(-p);
    case SubjectFamily::uniform:
      return location + scale * (2.0 * p - 1.0);
    case SubjectFamily::beta: {
      // Double precision throughout; the default long double promotion is
      // several times slower and buys nothing at simulation accuracy.
      using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
      return location + scale * boost::math::ibeta_inv(shape_a, shape_b, p, Policy());
    }
    case SubjectFamily::piecewise_uniform: {
      if (masses.empty()) throw ValidationError("piecewise_uniform law needs segment masses");
      const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
      const double h = p * static_cast<double>(masses.size());
      const auto k = std::min(masses.size() - 1, static_cast<std::size_t>(h));
      const double below = std::accumulate(masses.begin(), masses.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
      const double g = (below + (h - static_cast<double>(k)) * masses[k]) / total;
      return location + scale * (2.0 * g - 1.0);
    }
  }
  return 0.0;
}

std::vector<double> SubjectLaw::quantiles(std::span<const double> levels) const {
  std::vector<double> out;
  out.reserve(levels.size());
  for (double p : levels) out.push_back(quantile(p));
  return out;
}

double beta_curve(const std::string& curve, double p) {
  if (curve == "sin2pi") return std::sin(2.0 * std::numbers::pi * p);
  if (curve == "linear") return p;
  if (curve == "constant") return 1.0;
  if (curve == "upper_tail") {
    // Narrow bump at p = 0.9 with unit mass: picks out the upper quantile.
    const double s = 0.03;
    const double z = (p - 0.9) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
  }
  throw ValidationError("unknown beta curve '" + curve + "'");
}

double surface_value(const std::string& surface, double q, double p) {
  if (surface == "quadratic") return q * q;
  if (surface == "linear") return q * std::sin(2.0 * std::numbers::pi * p);
  throw ValidationError("unknown surface '" + surface + "'");
}

void ScenarioSpec::validate() const {
  if (subjects < 1) throw ValidationError("simulation needs at least one subject");
  if (min_observations < 1 || max_observations < min_observations)
    throw ValidationError("observation count range must satisfy 1 <= min <= max");
  if (!(scale_median > 0.0) || !(scale_log_sd >= 0.0) || !(location_sd >= 0.0))
    throw ValidationError("subject scale must be positive and spreads nonnegative");
  if ((family == SubjectFamily::beta || family == SubjectFamily::piecewise_uniform) &&
      !(shape_min > 0.0 && shape_max >= shape_min))
    throw ValidationError("shape bounds must satisfy 0 < shape_min <= shape_max");
  if (family == SubjectFamily::piecewise_uniform && segments < 1)
    throw ValidationError("piecewise_uniform needs at least one segment");
  if (noise_sd && !(*noise_sd >= 0.0)) throw ValidationError("noise_sd must be nonnegative");
  if (snr && !(*snr > 0.0)) throw ValidationError("snr must be positive");
  if (mechanism == Mechanism::lmoment_linear &&
      (lmoment_coefficients.empty() || lmoment_coefficients.size() > kMaxLegendreDegree + 1))
    throw ValidationError("lmoment_linear needs between 1 and 13 coefficients");
  if (mechanism == Mechanism::jive) {
    if (domains < 1 || features_per_domain < 1) throw ValidationError("jive scenario needs domains and features");
    if (joint_rank < 0 || individual_rank < 0) throw ValidationError("planted ranks must be nonnegative");
  }
  if (mechanism == Mechanism::beta_curve) beta_curve(curve, 0.5);
  if (mechanism == Mechanism::surface) surface_value(surface, 0.0, 0.5);
}

namespace {

constexpr std::uint64_t kParameters = 1, kObservations = 2, kNoise = 3, kCovariates = 4, kLoadings = 5;

SubjectLaw draw_law(const ScenarioSpec& spec, CounterRng& rng) {
  SubjectLaw law;
  law.family = spec.family;
  law.location = rng.normal(spec.location_mean, spec.location_sd);
  law.scale = spec.scale_median * std::exp(spec.scale_log_sd * rng.normal());
  law.shape_a = rng.uniform(spec.shape_min, spec.shape_max);
  law.shape_b = rng.uniform(spec.shape_min, spec.shape_max);
  if (spec.family == SubjectFamily::piecewise_uniform)
    for (std::size_t k = 0; k < spec.segments; ++k)
      law.masses.push_back(std::exp(rng.uniform(std::log(spec.shape_min), std::log(spec.shape_max))));
  return law;
}

std::vector<double> sample(const SubjectLaw& law, std::size_t count, CounterRng& rng) {
  std::vector<double> out(count);
  for (auto& x : out) x = law.quantile(rng.uniform());
  return out;
}

std::size_t observation_count(const ScenarioSpec& spec, CounterRng& rng) {
  return spec.min_observations +
         static_cast<std::size_t>(rng.below(spec.max_observations - spec.min_observations + 1));
}

double sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Simulation generate(const ScenarioSpec& spec) {
  spec.validate();
  Simulation sim;
  auto& data = sim.data;
  auto& truth = sim.truth;
  truth.mechanism = spec.mechanism;
  truth.intercept = spec.intercept;
  const std::size_t n = spec.subjects;

  const QuantileGrid grid = QuantileGrid::midpoint(100);
  truth.levels.assign(grid.levels().begin(), grid.levels().end());
  // Outcome functionals are integrated against the true quantile functions
  // on a finer grid than any analysis uses. Beta quantiles are bounded and
  // smooth inside (0, 1) but costly to invert, so a coarser grid suffices.
  const GridPtr fine = make_grid(spec.family == SubjectFamily::beta ? 500 : 2000);

  for (std::size_t c = 0; c < spec.covariates; ++c) {
    data.covariate_names.push_back("z" + std::to_string(c + 1));
    truth.covariate_effects.push_back(spec.covariate_effect);
  }
  data.subjects.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.subjects[i].id = "s" + std::to_string(i + 1);
    CounterRng rng(spec.seed, derive_key(kCovariates, i));
    for (std::size_t c = 0; c < spec.covariates; ++c) data.subjects[i].covariates.push_back(rng.normal());
  }

  truth.signal.assign(n, 0.0);
  if (spec.mechanism == Mechanism::jive) {
    const auto features = spec.domains * spec.features_per_domain;
    // Per-feature loadings on the joint and individual factors.
    std::vector<std::vector<double>> joint_loading(features), indiv_loading(features);
    for (std::size_t f = 0; f < features; ++f) {
      CounterRng rng(spec.seed, derive_key(kLoadings, f));
      for (int k = 0; k < spec.joint_rank; ++k) joint_loading[f].push_back(rng.normal());
      for (int k = 0; k < spec.individual_rank; ++k) indiv_loading[f].push_back(rng.normal());
    }
    truth.joint_factors.resize(static_cast<Eigen::Index>(n), spec.joint_rank);
    truth.individual_factors.assign(spec.domains, Eigen::MatrixXd(static_cast<Eigen::Index>(n), spec.individual_rank));
    for (std::size_t d = 0; d < spec.domains; ++d) truth.domain_names.push_back("domain" + std::to_string(d + 1));
    for (std::size_t i = 0; i < n; ++i) {
      CounterRng rng(spec.seed, derive_key(kParameters, i));
      const auto row = static_cast<Eigen::Index>(i);
      for (int k = 0; k < spec.joint_rank; ++k) truth.joint_factors(row, k) = rng.normal();
      for (std::size_t d = 0; d < spec.domains; ++d)
        for (int k = 0; k < spec.individual_rank; ++k) truth.individual_factors[d](row, k) = rng.normal();
      for (std::size_t d = 0; d < spec.domains; ++d)
        for (std::size_t j = 0; j < spec.features_per_domain; ++j) {
          const std::size_t f = d * spec.features_per_domain + j;
          double joint = 0.0, indiv = 0.0;
          for (int k = 0; k < spec.joint_rank; ++k) joint += joint_loading[f][static_cast<std::size_t>(k)] * truth.joint_factors(row, k);
          for (int k = 0; k < spec.individual_rank; ++k)
            indiv += indiv_loading[f][static_cast<std::size_t>(k)] * truth.individual_factors[d](row, k);
          const double factor = spec.joint_strength * joint + spec.individual_strength * indiv;
          SubjectLaw law;
          law.family = spec.family;
          law.location = spec.location_mean + factor;
          law.scale = spec.scale_median * std::exp(0.25 * factor);
          law.shape_a = law.shape_b = 0.5 * (spec.shape_min + spec.shape_max);
          if (spec.family == SubjectFamily::piecewise_uniform) law.masses.assign(spec.segments, 1.0);
          const std::string feature = "d" + std::to_string(d + 1) + "_f" + std::to_string(j + 1);
          data.domains[feature] = truth.domain_names[d];
          CounterRng obs(spec.seed, derive_key(derive_key(kObservations, i), f));
          data.subjects[i].observations[feature] = sample(law, observation_count(spec, obs), obs);
        }
      if (spec.joint_rank > 0) truth.signal[i] = spec.outcome_joint_effect * truth.joint_factors(row, 0);
    }
  } else {
    std::vector<double> beta_fine;
    if (spec.mechanism == Mechanism::constant_beta || spec.mechanism == Mechanism::beta_curve) {
      for (double p : fine->levels())
        beta_fine.push_back(spec.mechanism == Mechanism::constant_beta ? spec.beta0 : beta_curve(spec.curve, p));
      for (double p : truth.levels)
        truth.beta.push_back(spec.mechanism == Mechanism::constant_beta ? spec.beta0 : beta_curve(spec.curve, p));
    }
    if (spec.mechanism == Mechanism::lmoment_linear) truth.lmoment_coefficients = spec.lmoment_coefficients;
    const int order = std::max<int>(4, static_cast<int>(spec.lmoment_coefficients.size()));

    for (std::size_t i = 0; i < n; ++i) {
      CounterRng params(spec.seed, derive_key(kParameters, i));
      const SubjectLaw law = draw_law(spec, params);
      truth.laws.push_back(law);
      QuantileFunction qf{fine, law.quantiles(fine->levels()), data.subjects[i].id, spec.feature};
      const auto lm = lmoments_from_quantile(qf, order);
      truth.lmoments.emplace_back(lm.values.begin(), lm.values.begin() + 4);

      double signal = 0.0;
      switch (spec.mechanism) {
        case Mechanism::constant_beta:
        case Mechanism::beta_curve: {
          std::vector<double> prod(fine->size());
          for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = qf.values[j] * beta_fine[j];
          signal = integrate_on_grid(prod, *fine);
          break;
        }
        case Mechanism::lmoment_linear:
          for (std::size_t k = 0; k < spec.lmoment_coefficients.size(); ++k)
            signal += spec.lmoment_coefficients[k] * lm.values[k];
          break;
        case Mechanism::surface: {
          std::vector<double> f(fine->size());
          for (std::size_t j = 0; j < f.size(); ++j) f[j] = surface_value(spec.surface, qf.values[j], fine->level(j));
          signal = integrate_on_grid(f, *fine);
          break;
        }
        case Mechanism::jive: break;
      }
      truth.signal[i] = signal;
      CounterRng obs(spec.seed, derive_key(kObservations, i));
      data.subjects[i].observations[spec.feature] = sample(law, observation_count(spec, obs), obs);
    }
  }

  // Outcomes.
  truth.linear_predictor.assign(n, spec.intercept);
  if (spec.outcome_family == Family::binomial) {
    const double m = std::accumulate(truth.signal.begin(), truth.signal.end(), 0.0) / static_cast<double>(n);
    const double s = sd(truth.signal);
    for (std::size_t i = 0; i < n; ++i)
      truth.linear_predictor[i] += spec.signal_scale * (s > 0.0 ? (truth.signal[i] - m) / s : 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i) truth.linear_predictor[i] += truth.signal[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < spec.covariates; ++c)
      truth.linear_predictor[i] += spec.covariate_effect * data.subjects[i].covariates[c];

  if (spec.noise_sd) truth.noise_sd = *spec.noise_sd;
  else if (spec.snr) truth.noise_sd = sd(truth.signal) / std::sqrt(*spec.snr);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(spec.seed, derive_key(kNoise, i));
    auto& y = data.subjects[i].outcome;
    if (spec.outcome_family == Family::binomial)
      y = rng.uniform() < inverse_link(Family::binomial, truth.linear_predictor[i]) ? 1.0 : 0.0;
    else
      y = truth.linear_predictor[i] + truth.noise_sd * rng.normal();
  }
  return sim;
}

}  // namespace qdist
