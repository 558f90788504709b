#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsal/grid.hpp"

namespace gsal {

/// Population receptive field of one cortical location. Coordinates in
/// degrees of visual angle, origin at the stimulus center, y pointing up.
struct PrfVoxel {
  std::string area;
  double x_c = 0.0;
  double y_c = 0.0;
  double sigma = 1.0;
  double t_value = 0.0;
  double variance_explained = 0.0;

  double eccentricity() const { return std::hypot(x_c, y_c); }

  bool operator==(const PrfVoxel&) const = default;
};

struct VoxelFilter {
  double min_eccentricity = 0.5;  ///< inclusive
  double max_eccentricity = 4.5;  ///< inclusive
  double min_variance_explained = 0.55;  ///< exclusive
};

/// Surviving voxels together with their positions in the input list, which
/// index the columns of a measured-response table.
struct VoxelSelection {
  std::vector<std::size_t> indices;
  std::vector<PrfVoxel> voxels;

  bool empty() const { return voxels.empty(); }
};

/// Keeps voxels with t > 0, eccentricity within the closed interval and
/// variance explained above the threshold. An empty selection means
/// identification is impossible.
VoxelSelection filter_voxels(std::span<const PrfVoxel> voxels, const VoxelFilter& filter = {});

/// Voxels of one visual area, keeping input positions.
VoxelSelection select_area(std::span<const PrfVoxel> voxels, const std::string& area);

double prf_weight(const PrfVoxel& voxel, double x_deg, double y_deg);

/// Pixel geometry of a square stimulus map: the field disc is inscribed in
/// the map, and pixel centers are measured from the map center.
struct StimulusGeometry {
  std::size_t pixels = 538;
  double deg_per_pixel = 11.0 / 538.0;

  static StimulusGeometry of(const Grid& map);

  double radius_deg() const { return 0.5 * static_cast<double>(pixels) * deg_per_pixel; }
  double x_deg(std::size_t col) const {
    return (static_cast<double>(col) + 0.5 - 0.5 * static_cast<double>(pixels)) * deg_per_pixel;
  }
  double y_deg(std::size_t row) const {
    return (0.5 * static_cast<double>(pixels) - (static_cast<double>(row) + 0.5)) * deg_per_pixel;
  }
  bool in_field(std::size_t col, std::size_t row) const {
    return std::hypot(x_deg(col), y_deg(row)) <= radius_deg();
  }
};

struct ProfileConfig {
  /// Numerator window radius in units of the pRF σ. Infinity uses the whole
  /// stimulus disc.
  double window_sigmas = 2.0;
};

struct ResponseProfile {
  std::vector<double> values;  ///< one value per voxel

  bool operator==(const ResponseProfile&) const = default;
};

/// Predicted response of each voxel to one feature map:
/// Σ_{window} w·S / Σ_{disc} w.
ResponseProfile predict_profile(const Grid& feature_map, std::span<const PrfVoxel> voxels,
                                const ProfileConfig& config = {});

/// Same as `predict_profile` for many maps of equal geometry; pRF weights
/// are computed once per voxel.
std::vector<ResponseProfile> predict_profiles(std::span<const Grid> feature_maps,
                                              std::span<const PrfVoxel> voxels,
                                              const ProfileConfig& config = {});

/// Rows: measured profiles, columns: predicted profiles. An entry is empty
/// when either profile has zero variance.
class CorrMatrix {
 public:
  explicit CorrMatrix(std::size_t n = 0) : n_(n), values_(n * n) {}

  std::size_t size() const { return n_; }
  std::optional<double>& at(std::size_t row, std::size_t col) { return values_[row * n_ + col]; }
  const std::optional<double>& at(std::size_t row, std::size_t col) const {
    return values_[row * n_ + col];
  }

 private:
  std::size_t n_;
  std::vector<std::optional<double>> values_;
};

CorrMatrix correlation_matrix(std::span<const ResponseProfile> measured,
                              std::span<const ResponseProfile> predicted);

struct Identification {
  double accuracy = 0.0;
  std::vector<bool> correct;
};

/// Image k is identified when r_kk is strictly larger than every other
/// defined entry of row k.
Identification identify(const CorrMatrix& corr);

/// c_k = r_kk − mean_l r_kl, the mean including the diagonal.
std::vector<std::optional<double>> confidence(const CorrMatrix& corr);

/// Representational dissimilarity matrix, 1 − Pearson, row-major K×K.
class Rdm {
 public:
  explicit Rdm(std::size_t n = 0) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t k, std::size_t l) { return values_[k * n_ + l]; }
  double at(std::size_t k, std::size_t l) const { return values_[k * n_ + l]; }

  /// Strict upper triangle, row by row.
  std::vector<double> upper_triangle() const;

 private:
  std::size_t n_;
  std::vector<double> values_;
};

Rdm rdm(std::span<const ResponseProfile> profiles);

/// τ_a = (concordant − discordant) / (n(n−1)/2); tied pairs count zero.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Kendall τ_a between the upper triangles of two RDMs.
double rsa_kendall(const Rdm& a, const Rdm& b);

/// Local RMS contrast: population SD of luminance over the square window of
/// the given radius around each pixel. With `restrict_to_field`, statistics
/// use only pixels in the stimulus disc and pixels outside it are zero.
Grid rms_contrast_map(const Grid& luminance, std::size_t window_radius,
                      bool restrict_to_field = true);

}  // namespace gsal
