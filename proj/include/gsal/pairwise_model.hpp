#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gsal {

enum class Side { none, left, right };
enum class Outcome { left_first, right_first };

/// One pairwise presentation and the side that received the first saccade.
struct Trial {
  int subject_id = 0;
  int left_image = 0;
  int right_image = 0;
  Side task_target_side = Side::none;
  /// Side holding the previously seen image when exactly one side is familiar.
  Side familiar_side = Side::none;
  Outcome outcome = Outcome::left_first;

  bool operator==(const Trial&) const = default;
};

/// Column layout of the design matrix:
///   [0, M)            image columns
///   M                 task column
///   M + 1             familiarity column
///   [M + 2, M + 2 + K) subject columns
struct Dimensions {
  std::size_t images = 0;
  std::size_t subjects = 0;

  std::size_t task_column() const { return images; }
  std::size_t familiarity_column() const { return images + 1; }
  std::size_t subject_column(std::size_t k) const { return images + 2 + k; }
  std::size_t columns() const { return images + 2 + subjects; }

  bool operator==(const Dimensions&) const = default;
};

/// Smallest dimensions that hold every image and subject id in `trials`.
Dimensions infer_dimensions(std::span<const Trial> trials);

struct DesignEntry {
  std::size_t column = 0;
  double value = 0.0;

  bool operator==(const DesignEntry&) const = default;
};

/// Sparse row of the design matrix plus its label (+1 = right fixated first).
struct DesignRow {
  std::vector<DesignEntry> entries;
  int label = 0;

  bool operator==(const DesignRow&) const = default;
};

struct GlobalSalienceModel {
  std::vector<double> w;  ///< global salience score per image
  double tau = 0.0;       ///< task coefficient
  double phi = 0.0;       ///< familiarity coefficient
  std::vector<double> s;  ///< lateral bias per subject
  double C = 1.0;         ///< regularization constant the model was fitted with

  Dimensions dimensions() const { return {w.size(), s.size()}; }

  /// Flat coefficient vector in design-column order.
  std::vector<double> parameters() const;
  static GlobalSalienceModel from_parameters(Dimensions dims, std::span<const double> theta,
                                             double C);
  static GlobalSalienceModel zeros(Dimensions dims, double C = 1.0);

  bool operator==(const GlobalSalienceModel&) const = default;
};

/// Per-iteration solver trace passed to `FitConfig::observer`.
struct IterationLog {
  int iteration = 0;
  double objective = 0.0;
  double objective_change = 0.0;  ///< accepted change, always < 0
  double step = 0.0;
  double grad_inf_norm = 0.0;
  int backtracks = 0;
};

struct FitConfig {
  double C = 1.0;
  double tol = 1e-8;
  int max_iter = 10000;
  /// Optional trace callback. Never alters the optimization path.
  std::function<void(const IterationLog&)> observer;

  void validate() const;
};

struct FitResult {
  GlobalSalienceModel model;
  bool converged = false;
  int iterations = 0;
  double grad_inf_norm = 0.0;
  double objective = 0.0;
};

struct RankedImage {
  std::size_t image_id = 0;
  double score = 0.0;

  bool operator==(const RankedImage&) const = default;
};

DesignRow encode_trial(const Trial& trial, Dimensions dims);
std::vector<DesignRow> encode_trials(std::span<const Trial> trials, Dimensions dims);

/// θᵀx over the row's sparse entries.
double linear_predictor(std::span<const double> theta, const DesignRow& row);

/// Logistic sigmoid, evaluated without overflow for either sign.
double sigmoid(double z);

/// log(1 + e^z) without overflow.
double softplus(double z);

/// Probability that the right image receives the first fixation.
double predict_prob(const GlobalSalienceModel& model, const DesignRow& row);

/// ½‖θ‖² + C·Σ log(1 + exp(−yᵢ θᵀxᵢ)); every coefficient is penalized.
double objective(std::span<const double> theta, std::span<const DesignRow> rows, double C);
double objective(const GlobalSalienceModel& model, std::span<const DesignRow> rows,
                 const FitConfig& config);

/// θ − C·Σ yᵢ xᵢ σ(−yᵢ θᵀxᵢ)
std::vector<double> gradient(std::span<const double> theta, std::span<const DesignRow> rows,
                             double C);
std::vector<double> gradient(const GlobalSalienceModel& model, std::span<const DesignRow> rows,
                             const FitConfig& config);

/// Minimizes the objective from θ = 0 by gradient descent with Armijo
/// backtracking. Deterministic: identical inputs give bit-identical output.
FitResult fit(std::span<const DesignRow> rows, Dimensions dims, const FitConfig& config);

/// Images sorted by descending score, ties by ascending id.
std::vector<RankedImage> rank_images(const GlobalSalienceModel& model);

}  // namespace gsal
