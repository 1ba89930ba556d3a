#include "run_config.hpp"

#include <sstream>

#include "qdist/errors.hpp"

namespace qdist::cli {

RunConfig::RunConfig() {
  values_ = Json{
      {"input.observations", nullptr},
      {"input.subjects", nullptr},
      {"input.domains", nullptr},
      {"output.dir", "."},
      {"seed", 1},
      {"feature", nullptr},
      {"covariates", Json::array()},
      {"family", "auto"},
      {"grid.resolution", 100},
      {"lambda.points", 41},
      {"lambda.min", 1e-6},
      {"lambda.max", 1e6},
      {"lmoments.order", 4},
      {"lmoments.method", "projection"},
      {"soqfr.basis", "bspline"},
      {"soqfr.basis_size", 10},
      {"soqfr.degree", 3},
      {"soqfr.lambda", nullptr},
      {"fgam.q_size", 7},
      {"fgam.p_size", 7},
      {"fgam.grid_points", 11},
      {"fgam.q_margin", 0.02},
      {"fgam.q_points", 50},
      {"fgam.slices", Json::array({0.1, 0.25, 0.5, 0.75, 0.9})},
      {"gaml.basis_size", 6},
      {"hist.lower", 35.0},
      {"hist.upper", 255.0},
      {"hist.bins", 22},
      {"hist.basis_size", 10},
      {"jive.normalize", true},
      {"jive.ranks.joint", nullptr},
      {"jive.ranks.individual", nullptr},
      {"jive.permutations", 100},
      {"jive.alpha", 0.05},
      {"cv.models", Json::array({"soqfr"})},
      {"cv.folds", 10},
      {"cv.repeats", 100},
      {"cv.stratify", true},
      {"simulate.subjects", 100},
      {"simulate.min_observations", 50},
      {"simulate.max_observations", 50},
      {"simulate.feature", "x"},
      {"simulate.family", "gaussian"},
      {"simulate.location_mean", 0.0},
      {"simulate.location_sd", 1.0},
      {"simulate.scale_median", 1.0},
      {"simulate.scale_log_sd", 0.3},
      {"simulate.shape_min", 0.5},
      {"simulate.shape_max", 5.0},
      {"simulate.segments", 8},
      {"simulate.mechanism", "beta_curve"},
      {"simulate.curve", "sin2pi"},
      {"simulate.beta0", 1.0},
      {"simulate.lmoment_coefficients", Json::array({0.0, 1.0})},
      {"simulate.surface", "quadratic"},
      {"simulate.outcome_family", "gaussian"},
      {"simulate.intercept", 0.0},
      {"simulate.noise_sd", nullptr},
      {"simulate.snr", 4.0},
      {"simulate.signal_scale", 1.0},
      {"simulate.covariates", 0},
      {"simulate.covariate_effect", 0.5},
      {"simulate.domains", 2},
      {"simulate.features_per_domain", 3},
      {"simulate.joint_rank", 1},
      {"simulate.individual_rank", 1},
      {"simulate.joint_strength", 1.0},
      {"simulate.individual_strength", 0.5},
      {"simulate.outcome_joint_effect", 1.0},
  };
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError("config file not found: " + path.string());
  Json j = read_json(path);
  if (j.is_object() && j.contains("config") && j["config"].is_object()) j = j["config"];
  merge(j, path.string());
}

void RunConfig::merge(const Json& object, const std::string& source) {
  if (!object.is_object()) throw ValidationError(source + ": configuration must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (!values_.contains(key)) throw ValidationError(source + ": unknown configuration key '" + key + "'");
    values_[key] = value;
  }
}

void RunConfig::set(const std::string& key, const std::string& text) {
  if (!values_.contains(key)) throw ValidationError("unknown configuration key '" + key + "'");
  Json value = Json::parse(text, nullptr, false);
  values_[key] = value.is_discarded() ? Json(text) : value;
}

const Json& RunConfig::raw(const std::string& key) const {
  if (!values_.contains(key)) throw ValidationError("unknown configuration key '" + key + "'");
  return values_.at(key);
}

bool RunConfig::is_null(const std::string& key) const { return raw(key).is_null(); }

namespace {
[[noreturn]] void type_error(const std::string& key, const std::string& expected, const Json& v) {
  throw ValidationError("configuration key '" + key + "' must be " + expected + " (got " + v.dump() + ")");
}
}  // namespace

std::string RunConfig::get_string(const std::string& key) const {
  const Json& v = raw(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  type_error(key, "a string", v);
}

double RunConfig::get_double(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_number()) type_error(key, "a number", v);
  return v.get<double>();
}

std::optional<double> RunConfig::get_optional_double(const std::string& key) const {
  if (is_null(key)) return std::nullopt;
  return get_double(key);
}

long long RunConfig::get_int(const std::string& key) const {
  const Json& v = raw(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())))
    return static_cast<long long>(v.get<double>());
  type_error(key, "an integer", v);
}

bool RunConfig::get_bool(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_boolean()) type_error(key, "true or false", v);
  return v.get<bool>();
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  const Json& v = raw(key);
  std::vector<std::string> out;
  if (v.is_null()) return out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_string()) type_error(key, "a list of strings", v);
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  if (!v.is_string()) type_error(key, "a list of strings", v);
  std::stringstream ss(v.get<std::string>());
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  const Json& v = raw(key);
  std::vector<double> out;
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      const Json e = Json::parse(item, nullptr, false);
      if (!e.is_number()) type_error(key, "a list of numbers", v);
      out.push_back(e.get<double>());
    }
    return out;
  }
  if (!v.is_array()) type_error(key, "a list of numbers", v);
  for (const auto& e : v) {
    if (!e.is_number()) type_error(key, "a list of numbers", v);
    out.push_back(e.get<double>());
  }
  return out;
}

Json RunConfig::resolved() const {
  Json out = values_;
  out.erase("output.dir");
  return out;
}

}  // namespace qdist::cli
