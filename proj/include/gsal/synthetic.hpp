#pragma once

#include <cstdint>
#include <vector>

#include "gsal/grid.hpp"
#include "gsal/pairwise_model.hpp"
#include "gsal/prf_ident.hpp"

// Seeded generators for simulation studies and tests.
namespace gsal::synthetic {

/// Every coefficient drawn from N(0, 1).
GlobalSalienceModel standard_normal_truth(Dimensions dims, std::uint64_t seed);

struct TrialOptions {
  int trials_per_subject = 200;
  double task_probability = 0.5;      ///< trials with a task target
  double familiar_probability = 0.5;  ///< trials with exactly one familiar image
};

struct SampledTrials {
  std::vector<Trial> trials;
  std::vector<double> p_right;  ///< generator probability of right_first per trial
};

/// Random distinct image pairs per subject, outcomes drawn from the model.
SampledTrials sample_trials(const GlobalSalienceModel& truth, const TrialOptions& options,
                            std::uint64_t seed);

/// Mean of max(p, 1 − p): the best accuracy any predictor can expect.
double bayes_rate(const std::vector<double>& p_right);

/// Voxels that pass the default filter: eccentricity in [0.6, 4.4],
/// σ in [min_sigma, max_sigma], t > 0, variance explained in (0.6, 0.95).
std::vector<PrfVoxel> random_voxels(std::size_t count, std::uint64_t seed,
                                    const std::string& area = "V1", double min_sigma = 0.2,
                                    double max_sigma = 1.0);

/// Normalized square map of `pixels` px over an 11° field: a sum of random
/// Gaussian blobs.
Grid random_feature_map(std::size_t pixels, std::uint64_t seed, int blobs = 6);

/// Adds N(0, (η·SD(profile))²) noise to every entry of each profile.
std::vector<ResponseProfile> add_noise(const std::vector<ResponseProfile>& profiles, double eta,
                                       std::uint64_t seed);

}  // namespace gsal::synthetic
