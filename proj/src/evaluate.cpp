#include "qdist/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdist/diagnostics.hpp"
#include "qdist/errors.hpp"
#include "qdist/parallel.hpp"
#include "qdist/rng.hpp"

namespace qdist {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::cv_auc: return "cvAUC";
    case MetricKind::cv_r2: return "cvR2";
    case MetricKind::deviance_explained: return "deviance_explained";
  }
  return "unknown";
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw ValidationError("AUC labels must be 0 or 1");
    if (y == 1.0) ++positives;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw ValidationError("AUC needs both classes present");
  for (double s : scores)
    if (std::isnan(s)) throw ValidationError("AUC scores contain NaN");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1.0) rank_sum += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double cv_r2(std::span<const double> predictions, std::span<const double> truths,
             std::span<const double> baselines) {
  if (predictions.size() != truths.size() || baselines.size() != truths.size())
    throw ValidationError("cv-R2 inputs differ in length");
  if (truths.empty()) throw ValidationError("cv-R2 needs at least one prediction");
  const double lo = *std::min_element(truths.begin(), truths.end());
  const double hi = *std::max_element(truths.begin(), truths.end());
  if (lo == hi) throw ValidationError("cv-R2 undefined: outcomes have zero variance");
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    sse += (truths[i] - predictions[i]) * (truths[i] - predictions[i]);
    sst += (truths[i] - baselines[i]) * (truths[i] - baselines[i]);
  }
  return 1.0 - sse / sst;
}

double cv_r2(std::span<const double> predictions, std::span<const double> truths) {
  const double mean =
      truths.empty() ? 0.0 : std::accumulate(truths.begin(), truths.end(), 0.0) / static_cast<double>(truths.size());
  const std::vector<double> baselines(truths.size(), mean);
  return cv_r2(predictions, truths, baselines);
}

std::vector<std::size_t> assign_folds(std::span<const double> outcomes, const CvPlan& plan,
                                      std::size_t repeat) {
  const std::size_t n = outcomes.size();
  if (plan.folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (plan.folds > n) throw ValidationError("more folds than subjects");
  const bool binary = std::all_of(outcomes.begin(), outcomes.end(), [](double y) { return y == 0.0 || y == 1.0; });
  CounterRng rng(plan.seed, repeat);
  std::vector<std::size_t> fold(n, 0);
  std::vector<std::vector<std::size_t>> strata;
  if (plan.stratify && binary) {
    strata.resize(2);
    for (std::size_t i = 0; i < n; ++i) strata[outcomes[i] == 1.0 ? 1 : 0].push_back(i);
    for (const auto& s : strata)
      if (s.size() < 2)
        throw ValidationError("stratified folds need at least 2 subjects in each outcome class");
  } else {
    strata.emplace_back(n);
    std::iota(strata[0].begin(), strata[0].end(), 0);
  }
  std::size_t position = 0;
  for (auto& s : strata) {
    rng.shuffle(std::span<std::size_t>(s));
    for (std::size_t i : s) fold[i] = position++ % plan.folds;
  }
  return fold;
}

MetricReport cross_validate(const ModelRecipe& recipe, const RepeatedMeasuresDataset& data,
                            const CvPlan& plan, const CvOptions& options) {
  if (plan.repeats < 1) throw ValidationError("cross-validation needs at least one repeat");
  const std::vector<double> y = data.outcomes();
  const std::size_t n = y.size();
  const bool binary = data.outcome_kind() == OutcomeKind::binary;
  const MetricKind kind = options.metric.value_or(binary ? MetricKind::cv_auc : MetricKind::cv_r2);
  if (kind == MetricKind::cv_auc && !binary) throw ValidationError("cvAUC needs a binary outcome");
  if (kind == MetricKind::deviance_explained)
    throw ValidationError("deviance explained is an in-sample metric, not a CV metric");

  std::vector<std::vector<std::size_t>> folds(plan.repeats);
  for (std::size_t b = 0; b < plan.repeats; ++b) {
    folds[b] = assign_folds(y, plan, b);
    if (binary) {
      // Every training fold must keep both classes.
      for (std::size_t f = 0; f < plan.folds; ++f) {
        bool has[2] = {false, false};
        for (std::size_t i = 0; i < n; ++i)
          if (folds[b][i] != f) has[y[i] == 1.0 ? 1 : 0] = true;
        if (!has[0] || !has[1]) throw ValidationError("a training fold lacks one outcome class");
      }
    }
  }

  const std::size_t tasks = plan.repeats * plan.folds;
  std::vector<std::vector<double>> prediction(plan.repeats, std::vector<double>(n, std::nan("")));
  std::vector<std::vector<double>> baseline(plan.repeats, std::vector<double>(n, std::nan("")));
  std::vector<char> failed(tasks, 0);
  std::vector<std::string> failure(tasks);

  // Per-fold warnings are summarized once the folds are done.
  std::vector<std::string> captured;
  {
    ScopedWarningCapture capture;
    parallel_for(tasks, [&](std::size_t task) {
      const std::size_t b = task / plan.folds, f = task % plan.folds;
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < n; ++i) (folds[b][i] == f ? test : train).push_back(i);
      if (test.empty()) return;
      try {
        const auto training = data.subset(train);
        const auto model = recipe(training);
        if (options.observer) options.observer(b, f, *model, train);
        const auto preds = model->predict(data.subset(test));
        double mean = 0.0;
        for (std::size_t i : train) mean += y[i];
        mean /= static_cast<double>(train.size());
        for (std::size_t t = 0; t < test.size(); ++t) {
          prediction[b][test[t]] = preds(static_cast<Eigen::Index>(t));
          baseline[b][test[t]] = mean;
        }
      } catch (const NumericalError& e) {
        failed[task] = 1;
        failure[task] = e.what();
      }
    });
    captured = capture.messages();
  }

  MetricReport report;
  report.model = options.model_name;
  report.kind = kind;
  report.folds = plan.folds;
  report.repeats = plan.repeats;
  report.seed = plan.seed;
  std::string first_failure;
  for (std::size_t b = 0; b < plan.repeats; ++b) {
    std::size_t fails = 0;
    for (std::size_t f = 0; f < plan.folds; ++f)
      if (failed[b * plan.folds + f]) {
        ++fails;
        if (first_failure.empty()) first_failure = failure[b * plan.folds + f];
      }
    report.failed_folds += fails;
    if (static_cast<double>(fails) > 0.1 * static_cast<double>(plan.folds)) {
      ++report.invalid_repeats;
      continue;
    }
    std::vector<double> p, t, base;
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isnan(prediction[b][i])) {
        p.push_back(prediction[b][i]);
        t.push_back(y[i]);
        base.push_back(baseline[b][i]);
      }
    try {
      report.per_repeat.push_back(kind == MetricKind::cv_auc ? auc(p, t) : cv_r2(p, t, base));
    } catch (const ValidationError&) {
      ++report.invalid_repeats;
    }
  }

  if (!captured.empty()) {
    std::ostringstream msg;
    msg << captured.size() << " warning(s) during cross-validation of " << options.model_name
        << "; first: " << captured.front();
    warn(msg.str());
  }
  if (report.failed_folds > 0) {
    std::ostringstream msg;
    msg << report.failed_folds << " fold fit(s) failed in cross-validation of " << options.model_name
        << " (" << report.invalid_repeats << " repeat(s) dropped): " << first_failure;
    warn(msg.str());
  }
  if (report.per_repeat.empty())
    throw NumericalError("cross-validation produced no valid repeat: " + first_failure);

  const double B = static_cast<double>(report.per_repeat.size());
  report.mean = std::accumulate(report.per_repeat.begin(), report.per_repeat.end(), 0.0) / B;
  double ss = 0.0;
  for (double v : report.per_repeat) ss += (v - report.mean) * (v - report.mean);
  report.sd = report.per_repeat.size() > 1 ? std::sqrt(ss / (B - 1.0)) : 0.0;
  return report;
}

}  // namespace qdist
