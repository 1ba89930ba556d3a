#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdist/dataset.hpp"
#include "qdist/pglm.hpp"

namespace qdist {

enum class SubjectFamily { gaussian, exponential, uniform, beta, piecewise_uniform };
enum class Mechanism { constant_beta, beta_curve, lmoment_linear, surface, jive };

std::string to_string(SubjectFamily family);
std::string to_string(Mechanism mechanism);
SubjectFamily parse_subject_family(const std::string& name);
Mechanism parse_mechanism(const std::string& name);

/// Parameters of one subject's population distribution:
///   gaussian     Q(p) = location + scale * Phi^{-1}(p)
///   exponential  Q(p) = location - scale * log(1 - p)
///   uniform      Q(p) = location + scale * (2p - 1)      (U(location -+ scale))
///   beta         Q(p) = location + scale * I^{-1}_{a,b}(p)
///   piecewise_uniform
///                Q(p) = location + scale * (2 G(p) - 1), G piecewise linear
///                through the cumulative shares of `masses` at p = k/K, so the
///                density is constant on K consecutive intervals
struct SubjectLaw {
  SubjectFamily family = SubjectFamily::gaussian;
  double location = 0.0;
  double scale = 1.0;
  double shape_a = 1.0;
  double shape_b = 1.0;
  std::vector<double> masses;  // piecewise_uniform: positive, one per segment

  double quantile(double p) const;
  std::vector<double> quantiles(std::span<const double> levels) const;
};

struct ScenarioSpec {
  std::size_t subjects = 100;
  std::size_t min_observations = 50;
  std::size_t max_observations = 50;
  std::string feature = "x";

  // Subject-level parameter laws.
  SubjectFamily family = SubjectFamily::gaussian;
  double location_mean = 0.0;
  double location_sd = 1.0;
  double scale_median = 1.0;
  double scale_log_sd = 0.3;  // log(scale) ~ N(log(scale_median), scale_log_sd)
  double shape_min = 0.5;     // beta shapes ~ U(shape_min, shape_max); piecewise masses log-uniform on it
  double shape_max = 5.0;
  std::size_t segments = 8;   // piecewise_uniform

  // Outcome.
  Mechanism mechanism = Mechanism::beta_curve;
  std::string curve = "sin2pi";  // beta_curve: sin2pi | linear | constant | upper_tail
  double beta0 = 1.0;            // constant_beta
  std::vector<double> lmoment_coefficients{0.0, 1.0};  // lmoment_linear: c_1..c_K
  std::string surface = "quadratic";                   // surface: quadratic | linear
  Family outcome_family = Family::gaussian;
  double intercept = 0.0;
  std::optional<double> noise_sd;  // Gaussian noise; overrides snr
  std::optional<double> snr;       // var(signal) / var(noise)
  double signal_scale = 1.0;       // binomial: eta = intercept + scale * standardized signal
  std::size_t covariates = 0;
  double covariate_effect = 0.5;

  // Planted JIVE structure.
  std::size_t domains = 2;
  std::size_t features_per_domain = 3;
  int joint_rank = 1;
  int individual_rank = 1;
  double joint_strength = 1.0;
  double individual_strength = 0.5;
  double outcome_joint_effect = 1.0;

  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  Mechanism mechanism = Mechanism::beta_curve;
  std::vector<double> levels;        // 100-point midpoint grid
  std::vector<double> beta;          // beta(p) on levels (beta_curve / constant_beta)
  std::vector<double> lmoment_coefficients;
  std::vector<SubjectLaw> laws;      // per subject (single-feature mechanisms)
  std::vector<std::vector<double>> lmoments;  // true L_1..L_4 per subject
  std::vector<double> signal;        // functional part of the linear predictor
  std::vector<double> linear_predictor;
  double intercept = 0.0;
  std::vector<double> covariate_effects;
  double noise_sd = 0.0;
  // JIVE
  Eigen::MatrixXd joint_factors;                    // subjects x joint_rank
  std::vector<Eigen::MatrixXd> individual_factors;  // per domain: subjects x individual_rank
  std::vector<std::string> domain_names;
};

struct Simulation {
  RepeatedMeasuresDataset data;
  GroundTruth truth;
};

/// F(q, p) for the named surface.
double surface_value(const std::string& surface, double q, double p);
/// Named beta(p) curve.
double beta_curve(const std::string& curve, double p);

Simulation generate(const ScenarioSpec& spec);

}  // namespace qdist
