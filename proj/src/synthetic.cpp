#include "gsal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gsal/error.hpp"
#include "gsal/stats.hpp"

namespace gsal::synthetic {

namespace {

// std::uniform_real_distribution is not bit-reproducible across standard
// libraries; derive uniforms directly from the 64-bit engine instead.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

double normal(std::mt19937_64& rng) {
  // Box-Muller on (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

}  // namespace

GlobalSalienceModel standard_normal_truth(Dimensions dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> theta(dims.columns());
  for (double& v : theta) v = normal(rng);
  return GlobalSalienceModel::from_parameters(dims, theta, 1.0);
}

SampledTrials sample_trials(const GlobalSalienceModel& truth, const TrialOptions& options,
                            std::uint64_t seed) {
  const auto dims = truth.dimensions();
  if (dims.images < 2) throw DimensionError("need at least two images to form pairs");
  if (options.trials_per_subject < 1) throw Error("trials_per_subject must be positive");
  std::mt19937_64 rng(seed);
  SampledTrials out;
  const auto theta = truth.parameters();
  for (std::size_t k = 0; k < dims.subjects; ++k) {
    for (int i = 0; i < options.trials_per_subject; ++i) {
      Trial t;
      t.subject_id = static_cast<int>(k);
      t.left_image = static_cast<int>(below(rng, dims.images));
      do {
        t.right_image = static_cast<int>(below(rng, dims.images));
      } while (t.right_image == t.left_image);
      if (uniform01(rng) < options.task_probability) {
        t.task_target_side = uniform01(rng) < 0.5 ? Side::left : Side::right;
      }
      if (uniform01(rng) < options.familiar_probability) {
        t.familiar_side = uniform01(rng) < 0.5 ? Side::left : Side::right;
      }
      const double p = sigmoid(linear_predictor(theta, encode_trial(t, dims)));
      t.outcome = uniform01(rng) < p ? Outcome::right_first : Outcome::left_first;
      out.trials.push_back(t);
      out.p_right.push_back(p);
    }
  }
  return out;
}

double bayes_rate(const std::vector<double>& p_right) {
  if (p_right.empty()) throw EmptyInputError("bayes_rate of no trials");
  double acc = 0.0;
  for (double p : p_right) acc += std::max(p, 1.0 - p);
  return acc / static_cast<double>(p_right.size());
}

std::vector<PrfVoxel> random_voxels(std::size_t count, std::uint64_t seed,
                                    const std::string& area, double min_sigma,
                                    double max_sigma) {
  std::mt19937_64 rng(seed);
  std::vector<PrfVoxel> voxels;
  voxels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PrfVoxel v;
    v.area = area;
    const double ecc = uniform(rng, 0.6, 4.4);
    const double angle = uniform(rng, 0.0, 2.0 * M_PI);
    v.x_c = ecc * std::cos(angle);
    v.y_c = ecc * std::sin(angle);
    v.sigma = uniform(rng, min_sigma, max_sigma);
    v.t_value = uniform(rng, 0.5, 8.0);
    v.variance_explained = uniform(rng, 0.6, 0.95);
    voxels.push_back(std::move(v));
  }
  return voxels;
}

Grid random_feature_map(std::size_t pixels, std::uint64_t seed, int blobs) {
  std::mt19937_64 rng(seed);
  Grid map(pixels, pixels, 11.0 / static_cast<double>(pixels));
  const StimulusGeometry geometry = StimulusGeometry::of(map);
  for (int b = 0; b < blobs; ++b) {
    const double cx = uniform(rng, -5.0, 5.0);
    const double cy = uniform(rng, -5.0, 5.0);
    const double s = uniform(rng, 0.3, 2.0);
    const double amp = uniform(rng, 0.2, 1.0);
    for (std::size_t r = 0; r < pixels; ++r) {
      const double dy = geometry.y_deg(r) - cy;
      for (std::size_t c = 0; c < pixels; ++c) {
        const double dx = geometry.x_deg(c) - cx;
        map.at(c, r) += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      }
    }
  }
  // Maps carry no content outside the stimulus disc.
  for (std::size_t r = 0; r < pixels; ++r) {
    for (std::size_t c = 0; c < pixels; ++c) {
      if (!geometry.in_field(c, r)) map.at(c, r) = 0.0;
    }
  }
  return map.normalized();
}

std::vector<ResponseProfile> add_noise(const std::vector<ResponseProfile>& profiles, double eta,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ResponseProfile> out = profiles;
  for (auto& p : out) {
    const double sd = population_sd(p.values);
    for (double& v : p.values) v += eta * sd * normal(rng);
  }
  return out;
}

}  // namespace gsal::synthetic
