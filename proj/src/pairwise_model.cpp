#include "gsal/pairwise_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gsal/error.hpp"

namespace gsal {

namespace {

// Rows per leaf of the fixed pairwise reduction tree.
constexpr std::size_t kLeafRows = 32;

constexpr double kArmijoSlope = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 200;

double side_value(Side side) {
  switch (side) {
    case Side::left:
      return -1.0;
    case Side::right:
      return 1.0;
    case Side::none:
      break;
  }
  return 0.0;
}

void check_theta(std::span<const double> theta, std::span<const DesignRow> rows) {
  for (const auto& row : rows) {
    for (const auto& e : row.entries) {
      if (e.column >= theta.size()) {
        throw DimensionError("design column " + std::to_string(e.column) +
                             " outside coefficient vector of length " +
                             std::to_string(theta.size()));
      }
    }
  }
}

// Sum of softplus(−yᵢ θᵀxᵢ) over rows[begin, end) by pairwise halving.
double loss_sum(std::span<const double> theta, std::span<const DesignRow> rows) {
  if (rows.size() <= kLeafRows) {
    double acc = 0.0;
    for (const auto& row : rows) acc += softplus(-row.label * linear_predictor(theta, row));
    return acc;
  }
  const std::size_t half = rows.size() / 2;
  return loss_sum(theta, rows.first(half)) + loss_sum(theta, rows.subspan(half));
}

// Accumulates Σ yᵢ xᵢ σ(−yᵢ θᵀxᵢ) into `out` by pairwise halving.
void data_gradient(std::span<const double> theta, std::span<const DesignRow> rows,
                   std::vector<double>& out) {
  if (rows.size() <= kLeafRows) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& row : rows) {
      const double y = row.label;
      const double weight = y * sigmoid(-y * linear_predictor(theta, row));
      for (const auto& e : row.entries) out[e.column] += weight * e.value;
    }
    return;
  }
  const std::size_t half = rows.size() / 2;
  std::vector<double> right(out.size());
  data_gradient(theta, rows.first(half), out);
  data_gradient(theta, rows.subspan(half), right);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += right[j];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// softplus(b + delta) − softplus(b), accurate when delta is tiny.
double softplus_change(double b, double delta) {
  return std::log1p(sigmoid(b) * std::expm1(delta));
}

// Objective change along θ + α·d. `margins` holds −yᵢθᵀxᵢ and `slopes`
// holds −yᵢdᵀxᵢ; the penalty part is αθᵀd + ½α²‖d‖².
double objective_change(double alpha, double theta_dot_d, double d_sq,
                        std::span<const double> margins, std::span<const double> slopes,
                        double C) {
  const auto leaf = [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      acc += softplus_change(margins[i], alpha * slopes[i]);
    }
    return acc;
  };
  const std::function<double(std::size_t, std::size_t)> tree = [&](std::size_t begin,
                                                                   std::size_t end) {
    if (end - begin <= kLeafRows) return leaf(begin, end);
    const std::size_t mid = begin + (end - begin) / 2;
    return tree(begin, mid) + tree(mid, end);
  };
  return alpha * theta_dot_d + 0.5 * alpha * alpha * d_sq + C * tree(0, margins.size());
}

}  // namespace

Dimensions infer_dimensions(std::span<const Trial> trials) {
  Dimensions dims;
  for (const auto& t : trials) {
    if (t.subject_id < 0 || t.left_image < 0 || t.right_image < 0) {
      throw DimensionError("negative image or subject id");
    }
    dims.images = std::max<std::size_t>(
        dims.images, static_cast<std::size_t>(std::max(t.left_image, t.right_image)) + 1);
    dims.subjects = std::max<std::size_t>(dims.subjects, static_cast<std::size_t>(t.subject_id) + 1);
  }
  return dims;
}

std::vector<double> GlobalSalienceModel::parameters() const {
  std::vector<double> theta;
  theta.reserve(w.size() + 2 + s.size());
  theta.insert(theta.end(), w.begin(), w.end());
  theta.push_back(tau);
  theta.push_back(phi);
  theta.insert(theta.end(), s.begin(), s.end());
  return theta;
}

GlobalSalienceModel GlobalSalienceModel::from_parameters(Dimensions dims,
                                                         std::span<const double> theta,
                                                         double C) {
  if (theta.size() != dims.columns()) {
    throw DimensionError("coefficient vector has length " + std::to_string(theta.size()) +
                         ", expected " + std::to_string(dims.columns()));
  }
  GlobalSalienceModel m;
  m.w.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(dims.images));
  m.tau = theta[dims.task_column()];
  m.phi = theta[dims.familiarity_column()];
  m.s.assign(theta.begin() + static_cast<std::ptrdiff_t>(dims.subject_column(0)), theta.end());
  m.C = C;
  return m;
}

GlobalSalienceModel GlobalSalienceModel::zeros(Dimensions dims, double C) {
  const std::vector<double> theta(dims.columns(), 0.0);
  return from_parameters(dims, theta, C);
}

void FitConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error("C must be a positive finite number");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_iter < 1) throw Error("max_iter must be at least 1");
}

DesignRow encode_trial(const Trial& trial, Dimensions dims) {
  const auto check = [](int id, std::size_t bound, const char* what) {
    if (id < 0 || static_cast<std::size_t>(id) >= bound) {
      throw DimensionError(std::string(what) + " id " + std::to_string(id) + " outside [0, " +
                           std::to_string(bound) + ")");
    }
  };
  check(trial.left_image, dims.images, "left image");
  check(trial.right_image, dims.images, "right image");
  check(trial.subject_id, dims.subjects, "subject");
  if (trial.left_image == trial.right_image) {
    throw DimensionError("left and right image are both " + std::to_string(trial.left_image));
  }

  DesignRow row;
  row.entries.reserve(5);
  row.entries.push_back({static_cast<std::size_t>(trial.right_image), 1.0});
  row.entries.push_back({static_cast<std::size_t>(trial.left_image), -1.0});
  if (trial.task_target_side != Side::none) {
    row.entries.push_back({dims.task_column(), side_value(trial.task_target_side)});
  }
  if (trial.familiar_side != Side::none) {
    row.entries.push_back({dims.familiarity_column(), side_value(trial.familiar_side)});
  }
  row.entries.push_back({dims.subject_column(static_cast<std::size_t>(trial.subject_id)), 1.0});
  row.label = trial.outcome == Outcome::right_first ? 1 : -1;
  return row;
}

std::vector<DesignRow> encode_trials(std::span<const Trial> trials, Dimensions dims) {
  std::vector<DesignRow> rows;
  rows.reserve(trials.size());
  for (const auto& t : trials) rows.push_back(encode_trial(t, dims));
  return rows;
}

double linear_predictor(std::span<const double> theta, const DesignRow& row) {
  double z = 0.0;
  for (const auto& e : row.entries) z += theta[e.column] * e.value;
  return z;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double predict_prob(const GlobalSalienceModel& model, const DesignRow& row) {
  const auto theta = model.parameters();
  check_theta(theta, std::span(&row, 1));
  return sigmoid(linear_predictor(theta, row));
}

double objective(std::span<const double> theta, std::span<const DesignRow> rows, double C) {
  if (rows.empty()) throw EmptyInputError("objective needs at least one row");
  check_theta(theta, rows);
  const double value = 0.5 * dot(theta, theta) + C * loss_sum(theta, rows);
  if (!std::isfinite(value)) throw NumericError("objective is not finite");
  return value;
}

double objective(const GlobalSalienceModel& model, std::span<const DesignRow> rows,
                 const FitConfig& config) {
  return objective(model.parameters(), rows, config.C);
}

std::vector<double> gradient(std::span<const double> theta, std::span<const DesignRow> rows,
                             double C) {
  if (rows.empty()) throw EmptyInputError("gradient needs at least one row");
  check_theta(theta, rows);
  std::vector<double> g(theta.size());
  data_gradient(theta, rows, g);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = theta[j] - C * g[j];
  return g;
}

std::vector<double> gradient(const GlobalSalienceModel& model, std::span<const DesignRow> rows,
                             const FitConfig& config) {
  return gradient(model.parameters(), rows, config.C);
}

FitResult fit(std::span<const DesignRow> rows, Dimensions dims, const FitConfig& config) {
  config.validate();
  if (rows.empty()) throw EmptyInputError("fit needs at least one row");

  const std::size_t n = dims.columns();
  std::vector<double> theta(n, 0.0);
  double f = objective(theta, rows, config.C);
  std::vector<double> g = gradient(theta, rows, config.C);

  std::vector<double> margins(rows.size());
  std::vector<double> slopes(rows.size());
  std::vector<double> d(n);
  std::vector<double> prev_theta;
  std::vector<double> prev_g;

  FitResult result;
  double alpha0 = 1.0;
  int iter = 0;
  bool stalled = false;
  for (; iter < config.max_iter; ++iter) {
    if (inf_norm(g) <= config.tol) break;

    for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double y = rows[i].label;
      margins[i] = -y * linear_predictor(theta, rows[i]);
      slopes[i] = -y * linear_predictor(d, rows[i]);
    }
    const double theta_dot_d = dot(theta, d);
    const double d_sq = dot(d, d);
    const double slope0 = -d_sq;  // gᵀd

    // Barzilai-Borwein trial step, then Armijo backtracking.
    if (!prev_theta.empty()) {
      double ss = 0.0;
      double sy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double sj = theta[j] - prev_theta[j];
        ss += sj * sj;
        sy += sj * (g[j] - prev_g[j]);
      }
      if (sy > 0.0 && std::isfinite(ss / sy)) alpha0 = ss / sy;
    }

    double alpha = alpha0;
    double change = 0.0;
    int backtracks = 0;
    for (;; ++backtracks) {
      if (backtracks > kMaxBacktracks) {
        stalled = true;
        break;
      }
      change = objective_change(alpha, theta_dot_d, d_sq, margins, slopes, config.C);
      if (std::isfinite(change) && change <= kArmijoSlope * alpha * slope0) break;
      alpha *= kShrink;
    }
    if (stalled) break;

    prev_theta = theta;
    prev_g = g;
    for (std::size_t j = 0; j < n; ++j) theta[j] += alpha * d[j];
    g = gradient(theta, rows, config.C);

    if (config.observer) {
      f = objective(theta, rows, config.C);
      config.observer(IterationLog{iter + 1, f, change, alpha, inf_norm(g), backtracks});
    }
  }

  for (double v : theta) {
    if (!std::isfinite(v)) throw NumericError("fit produced non-finite coefficients");
  }
  result.model = GlobalSalienceModel::from_parameters(dims, theta, config.C);
  result.grad_inf_norm = inf_norm(g);
  result.converged = result.grad_inf_norm <= config.tol;
  result.iterations = iter;
  result.objective = objective(theta, rows, config.C);
  return result;
}

std::vector<RankedImage> rank_images(const GlobalSalienceModel& model) {
  std::vector<RankedImage> ranked(model.w.size());
  for (std::size_t j = 0; j < model.w.size(); ++j) ranked[j] = {j, model.w[j]};
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedImage& a, const RankedImage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
  });
  return ranked;
}

}  // namespace gsal
