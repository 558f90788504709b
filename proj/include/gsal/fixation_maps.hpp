#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gsal/grid.hpp"
#include "gsal/pairwise_model.hpp"

namespace gsal {

struct Fixation {
  int subject_id = 0;
  int image_id = 0;
  double x_deg = 0.0;  ///< image coordinates, origin top-left
  double y_deg = 0.0;
  double duration_ms = 0.0;
  double latency_ms = 0.0;  ///< from stimulus onset
  int ordinal = 1;          ///< 1-based index within the trial

  bool operator==(const Fixation&) const = default;
};

struct ImageExtent {
  double width_deg = 0.0;
  double height_deg = 0.0;
};

struct DurationStats {
  double mean_ms = 0.0;
  double sd_ms = 0.0;
};

struct FilterConfig {
  double min_duration_ms = 50.0;
  double anticipatory_latency_ms = 80.0;
  double sd_multiplier = 2.0;
  /// Overrides the duration statistics otherwise computed from the input.
  std::optional<DurationStats> duration_stats;
};

/// Each discarded fixation is counted once, under the first rule it fails in
/// the order: anticipatory, too short, too long, outside image.
struct DiscardReport {
  std::size_t anticipatory = 0;
  std::size_t too_short = 0;
  std::size_t too_long = 0;
  std::size_t outside_image = 0;
  DurationStats duration;

  std::size_t total() const { return anticipatory + too_short + too_long + outside_image; }
};

struct FilterResult {
  std::vector<Fixation> kept;
  DiscardReport report;
};

/// Drops anticipatory, too short (< min), too long (> μ + 2σ) and
/// off-image fixations.
FilterResult filter_fixations(std::span<const Fixation> fixations, ImageExtent extent,
                              const FilterConfig& config = {});

/// For every subject, the lowest-ordinal fixation on `image_id`.
std::vector<Fixation> first_fixations(std::span<const Fixation> fixations, int image_id);

struct GridSpec {
  std::size_t width_bins = 0;
  std::size_t height_bins = 0;
  double deg_per_bin = 1.0;
};

/// Fixation counts per bin. Fixations outside the grid are ignored.
Grid fixation_histogram(std::span<const Fixation> fixations, const GridSpec& spec);

/// Separable Gaussian blur, kernel truncated at `truncate`·σ and renormalized,
/// zero padding at the borders.
Grid gaussian_smooth(const Grid& grid, double sigma_deg, double truncate = 3.0);

/// Histogram → Gaussian smoothing (σ = 1° by default) → normalization.
Grid fixation_density(std::span<const Fixation> fixations, const GridSpec& spec,
                      double sigma_deg = 1.0);

/// Σ F(b)·log(F(b)/(S(b)+ε) + ε), natural log.
double kld(const Grid& fixation_density, const Grid& salience, double eps = 1e-12);

/// Half-open rectangle of bins [x0, x1) × [y0, y1).
struct BinRect {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t x1 = 0;
  std::size_t y1 = 0;

  bool overlaps(const BinRect& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
};

struct MassSplit {
  double m_left = 0.0;
  double m_right = 0.0;

  double delta() const { return m_left - m_right; }
};

/// Salience mass of a normalized stimulus map inside two disjoint regions.
MassSplit salience_mass(const Grid& stimulus, const BinRect& left, const BinRect& right);

double region_mass(const Grid& grid, const BinRect& region);

struct PairedMass {
  int left_image = 0;
  int right_image = 0;
  MassSplit mass;
};

struct DeltaSeries {
  std::vector<double> delta_gs;  ///< w_left − w_right
  std::vector<double> delta_m;   ///< M_left − M_right
  std::optional<double> pearson_r;  ///< empty when either series is constant
};

DeltaSeries delta_series(const GlobalSalienceModel& model, std::span<const PairedMass> trials);
DeltaSeries delta_series(std::span<const double> delta_gs, std::span<const double> delta_m);

}  // namespace gsal
