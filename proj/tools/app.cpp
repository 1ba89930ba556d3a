#include "app.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "qdist/csv.hpp"
#include "qdist/dataset.hpp"
#include "qdist/diagnostics.hpp"
#include "qdist/errors.hpp"
#include "qdist/evaluate.hpp"
#include "qdist/jive.hpp"
#include "qdist/lmoments.hpp"
#include "qdist/serialize.hpp"
#include "qdist/simulate.hpp"
#include "qdist/soqfr.hpp"
#include "run_config.hpp"

namespace qdist::cli {

namespace {

namespace fs = std::filesystem;

struct Flag {
  std::string name;  // e.g. "--basis-size"
  std::string key;   // e.g. "soqfr.basis_size"
  std::string help;
};

const std::vector<Flag> kInputFlags{
    {"--observations", "input.observations", "observations CSV: subject_id,feature_id,value"},
    {"--subjects", "input.subjects", "subjects CSV: subject_id,outcome,<covariates...>"},
    {"--domains", "input.domains", "domains CSV: feature_id,domain"},
    {"--grid", "grid.resolution", "quantile grid resolution M"},
};

const std::vector<Flag> kModelFlags{
    {"--feature", "feature", "feature analysed"},
    {"--covariates", "covariates", "comma-separated covariate names"},
    {"--family", "family", "auto | gaussian | binomial"},
};

const std::map<std::string, std::vector<Flag>> kCommandFlags{
    {"quantiles", {{"--feature", "feature", "restrict to one feature"}}},
    {"lmoments",
     {{"--feature", "feature", "restrict to one feature"},
      {"--order", "lmoments.order", "number of L-moments K"},
      {"--method", "lmoments.method", "projection | sample"}}},
    {"fit-soqfr",
     {{"--basis", "soqfr.basis", "bspline | legendre"},
      {"--basis-size", "soqfr.basis_size", "number of basis functions"},
      {"--lambda", "soqfr.lambda", "fixed smoothing parameter (GCV when absent)"}}},
    {"fit-fgam", {{"--q-size", "fgam.q_size", "q-direction basis size"}, {"--p-size", "fgam.p_size", "p-direction basis size"}}},
    {"fit-soqfr-l", {{"--order", "lmoments.order", "number of L-moments K"}}},
    {"fit-gam-l",
     {{"--order", "lmoments.order", "number of L-moments K"}, {"--basis-size", "gaml.basis_size", "basis size per smooth"}}},
    {"fit-hist",
     {{"--bins", "hist.bins", "number of equal-width bins"},
      {"--lower", "hist.lower", "lower bin edge"},
      {"--upper", "hist.upper", "upper bin edge"},
      {"--basis-size", "hist.basis_size", "basis size of f_x"}}},
    {"jive",
     {{"--order", "lmoments.order", "number of L-moments K"},
      {"--joint-rank", "jive.ranks.joint", "fixed joint rank (permutation selection when absent)"},
      {"--individual-ranks", "jive.ranks.individual", "fixed individual ranks, one per domain or a single value"},
      {"--permutations", "jive.permutations", "permutations for rank selection"},
      {"--alpha", "jive.alpha", "rank selection level"}}},
    {"cv",
     {{"--models", "cv.models", "comma-separated: soqfr,fgam,soqfr-l,gam-l,hist"},
      {"--folds", "cv.folds", "folds k"},
      {"--repeats", "cv.repeats", "repeats B"}}},
    {"simulate",
     {{"--n", "simulate.subjects", "number of subjects"},
      {"--mechanism", "simulate.mechanism", "constant_beta | beta_curve | lmoment_linear | surface | jive"},
      {"--curve", "simulate.curve", "sin2pi | linear | constant | upper_tail"},
      {"--subject-family", "simulate.family", "gaussian | exponential | uniform | beta | piecewise_uniform"},
      {"--outcome-family", "simulate.outcome_family", "gaussian | binomial"},
      {"--snr", "simulate.snr", "signal-to-noise variance ratio"},
      {"--noise-sd", "simulate.noise_sd", "noise standard deviation (overrides snr)"}}},
};

const std::map<std::string, std::string> kDescriptions{
    {"quantiles", "estimate subject quantile functions and group barycenters"},
    {"lmoments", "per-subject L-moment tables"},
    {"fit-soqfr", "scalar-on-quantile-function regression"},
    {"fit-fgam", "functional additive model on the quantile function"},
    {"fit-soqfr-l", "GLM on subject L-moments"},
    {"fit-gam-l", "additive model with smooth L-moment effects"},
    {"fit-hist", "histogram-predictor GLM"},
    {"jive", "joint and individual variation of L-moment blocks"},
    {"cv", "repeated k-fold cross-validation"},
    {"simulate", "synthetic data with planted effects"},
};

bool uses_models(const std::string& command) {
  return command.rfind("fit-", 0) == 0 || command == "cv";
}

class Run {
 public:
  Run(std::string command, RunConfig config, fs::path out_dir)
      : command_(std::move(command)), config_(std::move(config)), out_(std::move(out_dir)) {}

  void execute() {
    const auto start = std::chrono::steady_clock::now();
    if (command_ == "simulate") {
      simulate();
    } else {
      const auto load_start = std::chrono::steady_clock::now();
      data_ = load();
      timing("load", load_start);
      const auto compute_start = std::chrono::steady_clock::now();
      if (command_ == "quantiles") quantiles();
      else if (command_ == "lmoments") lmoments();
      else if (command_ == "fit-soqfr") fit_soqfr_command();
      else if (command_ == "fit-fgam") fit_fgam_command();
      else if (command_ == "fit-soqfr-l") fit_soqfr_l_command();
      else if (command_ == "fit-gam-l") fit_gam_l_command();
      else if (command_ == "fit-hist") fit_hist_command();
      else if (command_ == "jive") jive_command();
      else if (command_ == "cv") cv_command();
      timing("compute", compute_start);
    }
    timing("total", start);
    write_manifest();
  }

 private:
  void timing(const std::string& name, std::chrono::steady_clock::time_point since) {
    timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
  }

  fs::path output(const std::string& name) {
    outputs_.push_back(name);
    return out_ / name;
  }

  RepeatedMeasuresDataset load() {
    if (config_.is_null("input.observations")) throw ValidationError("missing --observations");
    if (config_.is_null("input.subjects")) throw ValidationError("missing --subjects");
    DatasetPaths paths;
    paths.observations = config_.get_string("input.observations");
    paths.subjects = config_.get_string("input.subjects");
    if (!config_.is_null("input.domains")) paths.domains = fs::path(config_.get_string("input.domains"));
    for (const fs::path& p : {paths.observations, paths.subjects})
      if (!fs::exists(p)) throw ValidationError("input file not found: " + p.string());
    if (paths.domains && !fs::exists(*paths.domains))
      throw ValidationError("input file not found: " + paths.domains->string());
    return load_dataset(paths);
  }

  std::vector<std::string> features() const {
    if (!config_.is_null("feature")) {
      const std::string f = config_.get_string("feature");
      data_.require_feature(f, 1);
      return {f};
    }
    return data_.feature_ids();
  }

  std::string model_feature() const {
    if (!config_.is_null("feature")) return config_.get_string("feature");
    const auto all = data_.feature_ids();
    if (all.size() != 1) throw ValidationError("the dataset has several features; choose one with --feature");
    return all.front();
  }

  std::size_t grid_resolution() const {
    const long long m = config_.get_int("grid.resolution");
    if (m < 1) throw ValidationError("grid.resolution must be positive");
    return static_cast<std::size_t>(m);
  }

  int positive_int(const std::string& key) const {
    const long long v = config_.get_int(key);
    if (v < 1) throw ValidationError("configuration key '" + key + "' must be a positive integer");
    return static_cast<int>(v);
  }

  void fill(RegressionOptions& o) const {
    o.feature = model_feature();
    o.covariates = config_.get_list("covariates");
    const std::string family = config_.get_string("family");
    if (family != "auto") o.family = parse_family(family);
    o.grid_resolution = grid_resolution();
    o.lambda_grid = default_lambda_grid(static_cast<std::size_t>(positive_int("lambda.points")),
                                        config_.get_double("lambda.min"), config_.get_double("lambda.max"));
  }

  SoqfrOptions soqfr_options() const {
    SoqfrOptions o;
    fill(o);
    const std::string basis = config_.get_string("soqfr.basis");
    if (basis == "bspline") o.basis = BasisKind::bspline;
    else if (basis == "legendre") o.basis = BasisKind::legendre;
    else throw ValidationError("soqfr.basis must be bspline or legendre");
    o.basis_size = positive_int("soqfr.basis_size");
    o.degree = static_cast<int>(config_.get_int("soqfr.degree"));
    o.lambda = config_.get_optional_double("soqfr.lambda");
    return o;
  }

  FgamOptions fgam_options() const {
    FgamOptions o;
    fill(o);
    o.lambda_grid = default_lambda_grid(static_cast<std::size_t>(positive_int("fgam.grid_points")),
                                        config_.get_double("lambda.min"), config_.get_double("lambda.max"));
    o.q_size = positive_int("fgam.q_size");
    o.p_size = positive_int("fgam.p_size");
    o.q_margin = config_.get_double("fgam.q_margin");
    o.q_points = positive_int("fgam.q_points");
    o.slice_levels = config_.get_doubles("fgam.slices");
    return o;
  }

  SoqfrLOptions soqfr_l_options() const {
    SoqfrLOptions o;
    fill(o);
    o.order = positive_int("lmoments.order");
    return o;
  }

  GamLOptions gam_l_options() const {
    GamLOptions o;
    fill(o);
    o.order = positive_int("lmoments.order");
    o.basis_size = positive_int("gaml.basis_size");
    return o;
  }

  HistogramOptions hist_options() const {
    HistogramOptions o;
    fill(o);
    o.bins = {config_.get_double("hist.lower"), config_.get_double("hist.upper"), positive_int("hist.bins")};
    o.basis_size = positive_int("hist.basis_size");
    return o;
  }

  void quantiles() {
    const GridPtr grid = make_grid(grid_resolution());
    std::vector<QuantileFunction> all;
    std::vector<Barycenter> centers;
    const bool binary = data_.outcome_kind() == OutcomeKind::binary;
    for (const auto& f : features()) {
      const auto curves = subject_quantile_functions(data_, f, grid);
      all.insert(all.end(), curves.begin(), curves.end());
      centers.push_back({f, "all", group_mean_quantile(curves)});
      if (binary)
        for (double cls : {0.0, 1.0}) {
          std::vector<QuantileFunction> group;
          for (std::size_t i = 0; i < curves.size(); ++i)
            if (data_.subjects[i].outcome == cls) group.push_back(curves[i]);
          if (!group.empty())
            centers.push_back({f, cls == 0.0 ? "outcome=0" : "outcome=1", group_mean_quantile(group)});
        }
    }
    write_quantiles_csv(output("quantiles.csv"), all);
    write_barycenters_csv(output("barycenters.csv"), centers);
  }

  void lmoments() {
    const int order = positive_int("lmoments.order");
    const std::string method = config_.get_string("lmoments.method");
    if (method != "projection" && method != "sample")
      throw ValidationError("lmoments.method must be projection or sample");
    const GridPtr grid = make_grid(grid_resolution());
    std::vector<LMomentVector> rows;
    const auto feats = features();
    for (const auto& s : data_.subjects)
      for (const auto& f : feats) {
        const auto& sample = s.observations.at(f);
        LMomentVector lm = method == "sample"
                               ? lmoments_sample(sample, order)
                               : lmoments_from_quantile(estimate_quantile_function(sample, grid, s.id, f), order);
        lm.subject_id = s.id;
        lm.feature_id = f;
        rows.push_back(std::move(lm));
      }
    write_lmoments_csv(output("lmoments.csv"), rows);
  }

  void fit_soqfr_command() {
    const auto model = fit_soqfr(data_, soqfr_options());
    write_json(output("fit.json"), fit_summary(model));
    write_functional_csv(output("beta.csv"), model.beta);
  }

  void fit_fgam_command() {
    const auto options = fgam_options();
    const auto model = fit_fgam_qf(data_, options);
    Json summary = fit_summary(model);
    summary["q_domain"] = {model.q_lower, model.q_upper};
    write_json(output("fit.json"), summary);
    write_surface_csv(output("surface.csv"), model.surface);
    write_slices_csv(output("slices.csv"), model.surface, options.slice_levels);
  }

  void fit_soqfr_l_command() {
    const auto model = fit_soqfr_l(data_, soqfr_l_options());
    write_json(output("fit.json"), fit_summary(model));
    write_functional_csv(output("beta.csv"), model.induced_beta);
  }

  void fit_gam_l_command() {
    const auto model = fit_gam_lmoments(data_, gam_l_options());
    write_json(output("fit.json"), fit_summary(model));
    write_smooths_csv(output("smooths.csv"), model.smooths);
  }

  void fit_hist_command() {
    const auto model = fit_histogram_glm(data_, hist_options());
    Json summary = fit_summary(model);
    summary["bins"] = {{"lower", model.bins.lower}, {"upper", model.bins.upper}, {"count", model.bins.bins}};
    write_json(output("fit.json"), summary);
    const SmoothEffect effect[] = {model.effect};
    write_smooths_csv(output("effect.csv"), effect);
  }

  JiveRanks fixed_ranks(const LMomentBlockMatrix& blocks) const {
    JiveRanks ranks;
    const long long joint = config_.get_int("jive.ranks.joint");
    if (joint < 0) throw ValidationError("jive.ranks.joint must be nonnegative");
    ranks.joint = static_cast<int>(joint);
    const Json& ind = config_.raw("jive.ranks.individual");
    const std::size_t D = blocks.domains.size();
    if (ind.is_null()) {
      ranks.individual.assign(D, 0);
    } else if (ind.is_object()) {
      for (const auto& d : blocks.domains) {
        if (!ind.contains(d)) throw ValidationError("jive.ranks.individual has no rank for domain '" + d + "'");
        ranks.individual.push_back(ind[d].get<int>());
      }
      for (const auto& [name, v] : ind.items())
        if (std::find(blocks.domains.begin(), blocks.domains.end(), name) == blocks.domains.end())
          throw ValidationError("jive.ranks.individual names unknown domain '" + name + "'");
    } else {
      const auto values = config_.get_doubles("jive.ranks.individual");
      if (values.size() == 1) ranks.individual.assign(D, static_cast<int>(values[0]));
      else if (values.size() == D)
        for (double v : values) ranks.individual.push_back(static_cast<int>(v));
      else
        throw ValidationError("jive.ranks.individual needs one rank per domain (" + std::to_string(D) + ")");
    }
    return ranks;
  }

  void jive_command() {
    LMomentBlockMatrix blocks = lmoment_blocks(data_, positive_int("lmoments.order"), grid_resolution());
    if (config_.get_bool("jive.normalize")) blocks = normalize_blocks(blocks);
    JiveRanks ranks;
    bool selected = false;
    if (config_.is_null("jive.ranks.joint")) {
      PermutationOptions p;
      p.permutations = positive_int("jive.permutations");
      p.alpha = config_.get_double("jive.alpha");
      p.seed = static_cast<std::uint64_t>(config_.get_int("seed"));
      ranks = select_ranks_permutation(blocks, p);
      selected = true;
    } else {
      ranks = fixed_ranks(blocks);
    }
    const auto decomposition = jive_decompose(blocks, ranks);
    Json summary = jive_summary(decomposition, blocks);
    summary["rank_selection"] = selected ? "permutation" : "fixed";
    write_json(output("jive_summary.json"), summary);
    write_scores_csv(output("scores.csv"), decomposition, blocks);
    write_loadings_csv(output("loadings.csv"), decomposition, blocks);
    const auto correlations = score_cross_correlation(decomposition, blocks);
    write_cross_correlation_csv(output("cross_correlation.csv"), correlations);
  }

  ModelRecipe recipe(const std::string& model) const {
    if (model == "soqfr") return soqfr_recipe(soqfr_options());
    if (model == "fgam") return fgam_recipe(fgam_options());
    if (model == "soqfr-l") return soqfr_l_recipe(soqfr_l_options());
    if (model == "gam-l") return gam_l_recipe(gam_l_options());
    if (model == "hist") return histogram_recipe(hist_options());
    throw ValidationError("unknown model '" + model + "' (soqfr, fgam, soqfr-l, gam-l, hist)");
  }

  void cv_command() {
    const auto models = config_.get_list("cv.models");
    if (models.empty()) throw ValidationError("cv.models is empty");
    std::vector<ModelRecipe> recipes;
    for (const auto& m : models) recipes.push_back(recipe(m));  // validates all first
    CvPlan plan;
    plan.folds = static_cast<std::size_t>(positive_int("cv.folds"));
    plan.repeats = static_cast<std::size_t>(positive_int("cv.repeats"));
    plan.seed = static_cast<std::uint64_t>(config_.get_int("seed"));
    plan.stratify = config_.get_bool("cv.stratify");
    std::vector<MetricReport> reports;
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto full = recipes[m](data_);
      MetricReport in_sample;
      in_sample.model = models[m];
      in_sample.kind = MetricKind::deviance_explained;
      in_sample.mean = deviance_explained(full->fit());
      in_sample.repeats = 1;
      in_sample.folds = 1;
      in_sample.seed = plan.seed;
      reports.push_back(in_sample);
      CvOptions options;
      options.model_name = models[m];
      reports.push_back(cross_validate(recipes[m], data_, plan, options));
    }
    write_cv_report_csv(output("cv_report.csv"), reports);
  }

  void simulate() {
    ScenarioSpec s;
    s.subjects = static_cast<std::size_t>(positive_int("simulate.subjects"));
    s.min_observations = static_cast<std::size_t>(positive_int("simulate.min_observations"));
    s.max_observations = static_cast<std::size_t>(positive_int("simulate.max_observations"));
    s.feature = config_.get_string("simulate.feature");
    s.family = parse_subject_family(config_.get_string("simulate.family"));
    s.location_mean = config_.get_double("simulate.location_mean");
    s.location_sd = config_.get_double("simulate.location_sd");
    s.scale_median = config_.get_double("simulate.scale_median");
    s.scale_log_sd = config_.get_double("simulate.scale_log_sd");
    s.shape_min = config_.get_double("simulate.shape_min");
    s.shape_max = config_.get_double("simulate.shape_max");
    s.segments = static_cast<std::size_t>(positive_int("simulate.segments"));
    s.mechanism = parse_mechanism(config_.get_string("simulate.mechanism"));
    s.curve = config_.get_string("simulate.curve");
    s.beta0 = config_.get_double("simulate.beta0");
    s.lmoment_coefficients = config_.get_doubles("simulate.lmoment_coefficients");
    s.surface = config_.get_string("simulate.surface");
    s.outcome_family = parse_family(config_.get_string("simulate.outcome_family"));
    s.intercept = config_.get_double("simulate.intercept");
    s.noise_sd = config_.get_optional_double("simulate.noise_sd");
    s.snr = config_.get_optional_double("simulate.snr");
    s.signal_scale = config_.get_double("simulate.signal_scale");
    s.covariates = static_cast<std::size_t>(config_.get_int("simulate.covariates"));
    s.covariate_effect = config_.get_double("simulate.covariate_effect");
    s.domains = static_cast<std::size_t>(positive_int("simulate.domains"));
    s.features_per_domain = static_cast<std::size_t>(positive_int("simulate.features_per_domain"));
    s.joint_rank = static_cast<int>(config_.get_int("simulate.joint_rank"));
    s.individual_rank = static_cast<int>(config_.get_int("simulate.individual_rank"));
    s.joint_strength = config_.get_double("simulate.joint_strength");
    s.individual_strength = config_.get_double("simulate.individual_strength");
    s.outcome_joint_effect = config_.get_double("simulate.outcome_joint_effect");
    s.seed = static_cast<std::uint64_t>(config_.get_int("seed"));
    const auto start = std::chrono::steady_clock::now();
    const Simulation sim = generate(s);
    timing("compute", start);
    write_observations_csv(sim.data, output("observations.csv"));
    write_subjects_csv(sim.data, output("subjects.csv"));
    if (!sim.data.domains.empty()) write_domains_csv(sim.data, output("domains.csv"));
    write_json(output("ground_truth.json"), ground_truth_json(sim.truth));
  }

  void write_manifest() {
    Json manifest;
    manifest["command"] = command_;
    manifest["version"] = {{"qdist", kVersion},
                           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                         "." + std::to_string(EIGEN_MINOR_VERSION)},
                           {"boost", BOOST_LIB_VERSION},
                           {"compiler", __VERSION__}};
    manifest["seed"] = config_.get_int("seed");
    manifest["config"] = config_.resolved();
    manifest["outputs"] = outputs_;
    manifest["timings"] = timings_;
    write_json(out_ / "run_manifest.json", manifest);
  }

  std::string command_;
  RunConfig config_;
  fs::path out_;
  RepeatedMeasuresDataset data_;
  std::vector<std::string> outputs_;
  Json timings_ = Json::object();
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributional data analysis with quantile functions and L-moments", "qdist"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Pending {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;  // key -> text
    std::string seed;
  };
  std::map<std::string, Pending> pending;
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> flag_options;

  for (const auto& [name, description] : kDescriptions) {
    auto* sub = app.add_subcommand(name, description);
    auto& p = pending[name];
    sub->add_option("--config", p.config_path, "JSON config of dotted keys, or a run_manifest.json");
    sub->add_option("--out", p.out_dir, "output directory (default: current directory)");
    sub->add_option("--seed", p.seed, "master seed");
    sub->add_option("--set", p.sets, "override any config key: key=value")->take_all();
    std::vector<Flag> flags;
    if (name != "simulate") flags.insert(flags.end(), kInputFlags.begin(), kInputFlags.end());
    if (uses_models(name) || name == "jive") flags.insert(flags.end(), kModelFlags.begin(), kModelFlags.end());
    for (const auto& f : kCommandFlags.at(name))
      if (std::none_of(flags.begin(), flags.end(), [&](const Flag& g) { return g.name == f.name; }))
        flags.push_back(f);
    for (const auto& f : flags)
      flag_options[name].emplace_back(f.key, sub->add_option(f.name, flag_values[name][f.key], f.help + " [" + f.key + "]"));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  auto& p = pending[command];

  try {
    RunConfig config;
    if (!p.config_path.empty()) config.merge_file(p.config_path);
    // Only flags actually given on the command line override the file.
    for (const auto& [key, opt] : flag_options[command])
      if (opt->count() > 0) config.set(key, flag_values[command][key]);
    for (const auto& s : p.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
      config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!p.seed.empty()) config.set("seed", p.seed);
    const fs::path out_dir = p.out_dir.empty() ? fs::path(config.get_string("output.dir")) : fs::path(p.out_dir);
    fs::create_directories(out_dir);
    Run(command, std::move(config), out_dir).execute();
    return 0;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid configuration value: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qdist::cli
