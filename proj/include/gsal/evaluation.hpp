#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsal/pairwise_model.hpp"

namespace gsal {

/// Train/test subject split for each fold. Test sets are disjoint and
/// together cover every subject.
struct FoldPlan {
  struct Fold {
    std::vector<int> train_subjects;
    std::vector<int> test_subjects;
  };
  std::vector<Fold> folds;
};

/// Sorted distinct subject ids appearing in `trials`.
std::vector<int> distinct_subjects(std::span<const Trial> trials);

/// Shuffles the subjects with `seed` and cuts them into `fold_count` groups
/// whose sizes differ by at most one. Each group is the test set of one fold.
FoldPlan make_subject_folds(std::span<const int> subject_ids, int fold_count, std::uint64_t seed);

/// Leave-2-participants-out plan: 49 subjects in 25 folds gives 24 test pairs
/// and one singleton.
FoldPlan make_leave2out_plan(std::span<const int> subject_ids, int fold_count,
                             std::uint64_t seed = 0);

struct TrialSplit {
  std::vector<Trial> train;
  std::vector<Trial> test;
};
TrialSplit split_trials(std::span<const Trial> trials, const FoldPlan::Fold& fold);

/// P(score_pos > score_neg) + ½P(tie), counted exactly over all pairs.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Tjur's coefficient of discrimination: mean(p | y=+1) − mean(p | y=−1).
double tjur_r2(std::span<const double> probs, std::span<const int> labels);

/// Fraction of trials whose outcome matches the prediction. A probability of
/// exactly 0.5 predicts right_first.
double accuracy(const GlobalSalienceModel& model, std::span<const Trial> trials);

/// C = 10^p with p = −3 + (2/3)(n−1), n = 1..10.
std::vector<double> default_C_grid();

struct CvConfig {
  int folds = 5;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iter = 10000;
};

struct CvSelection {
  double best_C = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_accuracy;              ///< per grid value
  std::vector<std::vector<double>> fold_accuracy;  ///< [grid][fold]
  int nonconverged_fits = 0;
};

/// Picks C by subject-wise k-fold validation accuracy. Ties go to the smaller C.
CvSelection cv_select_C(std::span<const Trial> trials, Dimensions dims,
                        std::span<const double> grid, const CvConfig& config = {});

struct FoldMetrics {
  double auc = 0.0;
  double tjur_r2 = 0.0;
  double accuracy = 0.0;
};

struct MetricReport {
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  FoldMetrics sd;  ///< population SD across folds
};

FoldMetrics score_trials(const GlobalSalienceModel& model, std::span<const Trial> trials);
MetricReport summarize(std::vector<FoldMetrics> folds);

struct EvaluationReport {
  MetricReport test;
  MetricReport train;
  std::vector<double> baseline_accuracy;  ///< training-majority predictor on each test fold
  double baseline_mean = 0.0;
  double baseline_sd = 0.0;
  std::vector<double> selected_C;
  int nonconverged_fits = 0;
};

/// Outer subject folds from `plan`; inside each, C is chosen by
/// `cv_select_C` on the training subjects and the model is refitted on them.
EvaluationReport evaluate_nested(std::span<const Trial> trials, Dimensions dims,
                                 const FoldPlan& plan, std::span<const double> grid,
                                 const CvConfig& inner);

struct BootstrapResult {
  std::vector<double> resampled_means;
  double mean = 0.0;    ///< mean of the input values
  double median = 0.0;  ///< median of the resampled means
  double standard_error = 0.0;
  double ci_low = 0.0;   ///< 2.5th percentile
  double ci_high = 0.0;  ///< 97.5th percentile
  double p_value = 0.0;  ///< two-sided, H0: mean = 0
};

BootstrapResult percentile_bootstrap(std::span<const double> values, int n_resamples,
                                     std::uint64_t seed);

}  // namespace gsal
