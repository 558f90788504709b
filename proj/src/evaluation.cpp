#include "gsal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_set>

#include "gsal/error.hpp"
#include "gsal/stats.hpp"

namespace gsal {

namespace {

void check_labels(std::span<const double> values, std::span<const int> labels,
                  std::size_t& positives, std::size_t& negatives) {
  if (values.size() != labels.size()) {
    throw DimensionError("values and labels differ in length (" + std::to_string(values.size()) +
                         " vs " + std::to_string(labels.size()) + ")");
  }
  positives = 0;
  negatives = 0;
  for (int y : labels) {
    if (y == 1) {
      ++positives;
    } else if (y == -1) {
      ++negatives;
    } else {
      throw Error("labels must be +1 or -1");
    }
  }
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("metric needs both classes present");
  }
}

std::vector<int> labels_of(std::span<const Trial> trials) {
  std::vector<int> labels;
  labels.reserve(trials.size());
  for (const auto& t : trials) labels.push_back(t.outcome == Outcome::right_first ? 1 : -1);
  return labels;
}

}  // namespace

std::vector<int> distinct_subjects(std::span<const Trial> trials) {
  std::set<int> ids;
  for (const auto& t : trials) ids.insert(t.subject_id);
  return {ids.begin(), ids.end()};
}

FoldPlan make_subject_folds(std::span<const int> subject_ids, int fold_count,
                            std::uint64_t seed) {
  if (fold_count < 1) throw ProtocolError("fold count must be at least 1");
  std::vector<int> subjects(subject_ids.begin(), subject_ids.end());
  std::sort(subjects.begin(), subjects.end());
  if (std::adjacent_find(subjects.begin(), subjects.end()) != subjects.end()) {
    throw ProtocolError("duplicate subject id in fold plan input");
  }
  if (subjects.size() < static_cast<std::size_t>(fold_count)) {
    throw ProtocolError("cannot split " + std::to_string(subjects.size()) + " subjects into " +
                        std::to_string(fold_count) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);

  const std::size_t n = subjects.size();
  const auto k = static_cast<std::size_t>(fold_count);
  FoldPlan plan;
  plan.folds.resize(k);
  std::size_t begin = 0;
  for (std::size_t f = 0; f < k; ++f) {
    // The first n % k groups get one extra member.
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    auto& fold = plan.folds[f];
    fold.test_subjects.assign(subjects.begin() + static_cast<std::ptrdiff_t>(begin),
                              subjects.begin() + static_cast<std::ptrdiff_t>(begin + size));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < begin || i >= begin + size) fold.train_subjects.push_back(subjects[i]);
    }
    std::sort(fold.test_subjects.begin(), fold.test_subjects.end());
    std::sort(fold.train_subjects.begin(), fold.train_subjects.end());
    begin += size;
  }
  return plan;
}

FoldPlan make_leave2out_plan(std::span<const int> subject_ids, int fold_count,
                             std::uint64_t seed) {
  return make_subject_folds(subject_ids, fold_count, seed);
}

TrialSplit split_trials(std::span<const Trial> trials, const FoldPlan::Fold& fold) {
  const std::unordered_set<int> test(fold.test_subjects.begin(), fold.test_subjects.end());
  const std::unordered_set<int> train(fold.train_subjects.begin(), fold.train_subjects.end());
  TrialSplit split;
  for (const auto& t : trials) {
    if (test.count(t.subject_id)) {
      split.test.push_back(t);
    } else if (train.count(t.subject_id)) {
      split.train.push_back(t);
    }
  }
  return split;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  check_labels(scores, labels, positives, negatives);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the number of (positive, negative) pairs won by the positive, ties
  // counting one half, accumulated in integers so the result is exact.
  std::uint64_t doubled_wins = 0;
  std::uint64_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos_in_group = 0;
    std::uint64_t neg_in_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos_in_group : neg_in_group) += 1;
      ++j;
    }
    doubled_wins += pos_in_group * (2 * negatives_below + neg_in_group);
    negatives_below += neg_in_group;
    i = j;
  }
  return static_cast<double>(doubled_wins) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double tjur_r2(std::span<const double> probs, std::span<const int> labels) {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  check_labels(probs, labels, positives, negatives);
  double sum_pos = 0.0;
  double sum_neg = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    (labels[i] == 1 ? sum_pos : sum_neg) += probs[i];
  }
  return sum_pos / static_cast<double>(positives) - sum_neg / static_cast<double>(negatives);
}

double accuracy(const GlobalSalienceModel& model, std::span<const Trial> trials) {
  if (trials.empty()) return 0.0;
  const auto dims = model.dimensions();
  const auto theta = model.parameters();
  std::size_t correct = 0;
  for (const auto& t : trials) {
    const auto row = encode_trial(t, dims);
    const bool predicts_right = sigmoid(linear_predictor(theta, row)) >= 0.5;
    if (predicts_right == (t.outcome == Outcome::right_first)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(trials.size());
}

std::vector<double> default_C_grid() {
  std::vector<double> grid;
  for (int n = 1; n <= 10; ++n) {
    const double p = -3.0 + 2.0 * (n - 1) / 3.0;
    grid.push_back(std::pow(10.0, p));
  }
  return grid;
}

CvSelection cv_select_C(std::span<const Trial> trials, Dimensions dims,
                        std::span<const double> grid, const CvConfig& config) {
  if (grid.empty()) throw ProtocolError("C grid is empty");
  const auto subjects = distinct_subjects(trials);
  if (subjects.size() < static_cast<std::size_t>(config.folds)) {
    throw ProtocolError("C selection needs at least " + std::to_string(config.folds) +
                        " subjects, found " + std::to_string(subjects.size()));
  }
  const auto plan = make_subject_folds(subjects, config.folds, config.seed);

  CvSelection sel;
  sel.grid.assign(grid.begin(), grid.end());
  sel.fold_accuracy.assign(grid.size(), {});
  sel.mean_accuracy.assign(grid.size(), 0.0);

  for (const auto& fold : plan.folds) {
    const auto split = split_trials(trials, fold);
    if (split.train.empty() || split.test.empty()) {
      throw ProtocolError("a validation fold has no training or no validation trials");
    }
    const auto rows = encode_trials(split.train, dims);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      FitConfig fc;
      fc.C = grid[c];
      fc.tol = config.tol;
      fc.max_iter = config.max_iter;
      const auto fitted = fit(rows, dims, fc);
      if (!fitted.converged) ++sel.nonconverged_fits;
      sel.fold_accuracy[c].push_back(accuracy(fitted.model, split.test));
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    sel.mean_accuracy[c] = mean(sel.fold_accuracy[c]);
    const bool better = sel.mean_accuracy[c] > sel.mean_accuracy[best];
    const bool tie_smaller = sel.mean_accuracy[c] == sel.mean_accuracy[best] && grid[c] < grid[best];
    if (better || tie_smaller) best = c;
  }
  sel.best_C = grid[best];
  return sel;
}

FoldMetrics score_trials(const GlobalSalienceModel& model, std::span<const Trial> trials) {
  const auto dims = model.dimensions();
  const auto theta = model.parameters();
  std::vector<double> probs;
  probs.reserve(trials.size());
  for (const auto& t : trials) probs.push_back(sigmoid(linear_predictor(theta, encode_trial(t, dims))));
  const auto labels = labels_of(trials);
  return {auc(probs, labels), tjur_r2(probs, labels), accuracy(model, trials)};
}

MetricReport summarize(std::vector<FoldMetrics> folds) {
  MetricReport report;
  report.folds = std::move(folds);
  if (report.folds.empty()) return report;
  const auto column = [&](double FoldMetrics::*field) {
    std::vector<double> v;
    for (const auto& f : report.folds) v.push_back(f.*field);
    return v;
  };
  for (auto field : {&FoldMetrics::auc, &FoldMetrics::tjur_r2, &FoldMetrics::accuracy}) {
    const auto v = column(field);
    report.mean.*field = mean(v);
    report.sd.*field = population_sd(v);
  }
  return report;
}

EvaluationReport evaluate_nested(std::span<const Trial> trials, Dimensions dims,
                                 const FoldPlan& plan, std::span<const double> grid,
                                 const CvConfig& inner) {
  EvaluationReport report;
  std::vector<FoldMetrics> test_folds;
  std::vector<FoldMetrics> train_folds;
  for (const auto& fold : plan.folds) {
    const auto split = split_trials(trials, fold);
    if (split.train.empty() || split.test.empty()) {
      throw ProtocolError("an evaluation fold has no training or no test trials");
    }
    const auto selection = cv_select_C(split.train, dims, grid, inner);
    report.nonconverged_fits += selection.nonconverged_fits;

    FitConfig fc;
    fc.C = selection.best_C;
    fc.tol = inner.tol;
    fc.max_iter = inner.max_iter;
    const auto fitted = fit(encode_trials(split.train, dims), dims, fc);
    if (!fitted.converged) ++report.nonconverged_fits;
    report.selected_C.push_back(selection.best_C);

    test_folds.push_back(score_trials(fitted.model, split.test));
    train_folds.push_back(score_trials(fitted.model, split.train));

    std::size_t train_right = 0;
    for (const auto& t : split.train) train_right += t.outcome == Outcome::right_first;
    const bool majority_right = 2 * train_right >= split.train.size();
    std::size_t hits = 0;
    for (const auto& t : split.test) hits += (t.outcome == Outcome::right_first) == majority_right;
    report.baseline_accuracy.push_back(static_cast<double>(hits) /
                                       static_cast<double>(split.test.size()));
  }
  report.test = summarize(std::move(test_folds));
  report.train = summarize(std::move(train_folds));
  if (!report.baseline_accuracy.empty()) {
    report.baseline_mean = mean(report.baseline_accuracy);
    report.baseline_sd = population_sd(report.baseline_accuracy);
  }
  return report;
}

BootstrapResult percentile_bootstrap(std::span<const double> values, int n_resamples,
                                     std::uint64_t seed) {
  if (values.empty()) throw EmptyInputError("bootstrap of an empty sample");
  if (n_resamples < 1) throw Error("bootstrap needs at least one resample");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  BootstrapResult result;
  result.resampled_means.reserve(static_cast<std::size_t>(n_resamples));
  for (int b = 0; b < n_resamples; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += values[pick(rng)];
    result.resampled_means.push_back(acc / static_cast<double>(values.size()));
  }

  result.mean = mean(values);
  result.standard_error = population_sd(result.resampled_means);
  std::vector<double> sorted = result.resampled_means;
  std::sort(sorted.begin(), sorted.end());
  result.median = sorted_percentile(sorted, 0.5);
  result.ci_low = sorted_percentile(sorted, 0.025);
  result.ci_high = sorted_percentile(sorted, 0.975);

  std::size_t at_or_below = 0;
  std::size_t at_or_above = 0;
  for (double m : sorted) {
    at_or_below += m <= 0.0;
    at_or_above += m >= 0.0;
  }
  const double n = static_cast<double>(sorted.size());
  result.p_value = std::min(1.0, 2.0 * std::min(at_or_below / n, at_or_above / n));
  return result;
}

}  // namespace gsal
