#include "gsal/prf_ident.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "gsal/error.hpp"
#include "gsal/stats.hpp"

namespace gsal {

namespace {

// exp(−r²/2σ²) underflows to exactly zero beyond this many σ.
constexpr double kUnderflowSigmas = 38.7;

struct PixelRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

PixelRange pixel_range(double center_deg, double radius_deg, const StimulusGeometry& g,
                       bool vertical) {
  const double half = 0.5 * static_cast<double>(g.pixels);
  // Pixel index whose center is at `deg`: col = deg/dpp + half − 0.5, row is mirrored.
  const double lo_deg = center_deg - radius_deg;
  const double hi_deg = center_deg + radius_deg;
  double lo = 0.0;
  double hi = 0.0;
  if (!vertical) {
    lo = std::floor(lo_deg / g.deg_per_pixel + half - 0.5);
    hi = std::ceil(hi_deg / g.deg_per_pixel + half - 0.5);
  } else {
    lo = std::floor(half - 0.5 - hi_deg / g.deg_per_pixel);
    hi = std::ceil(half - 0.5 - lo_deg / g.deg_per_pixel);
  }
  const double n = static_cast<double>(g.pixels);
  lo = std::clamp(lo, 0.0, n);
  hi = std::clamp(hi + 1.0, 0.0, n);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

void check_map(const Grid& map, const StimulusGeometry& geometry) {
  if (map.width() != geometry.pixels || map.height() != geometry.pixels) {
    throw DimensionError("feature maps must share one square geometry");
  }
}

// Inversions of v (pairs i < j with v[i] > v[j]) by merge sort; sorts v.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                               std::size_t begin, std::size_t end) {
  if (end - begin < 2) return 0;
  const std::size_t mid = begin + (end - begin) / 2;
  std::uint64_t count = count_inversions(v, scratch, begin, mid) +
                        count_inversions(v, scratch, mid, end);
  std::size_t i = begin;
  std::size_t j = mid;
  std::size_t k = begin;
  while (i < mid && j < end) {
    if (v[j] < v[i]) {
      count += mid - i;
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < end) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(begin),
            scratch.begin() + static_cast<std::ptrdiff_t>(end),
            v.begin() + static_cast<std::ptrdiff_t>(begin));
  return count;
}

// Σ t(t−1)/2 over runs of equal values in an already sorted sequence.
template <typename Equal>
std::uint64_t tied_pairs(std::size_t n, Equal equal) {
  std::uint64_t pairs = 0;
  std::uint64_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

}  // namespace

VoxelSelection filter_voxels(std::span<const PrfVoxel> voxels, const VoxelFilter& filter) {
  VoxelSelection sel;
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    const auto& v = voxels[i];
    const double ecc = v.eccentricity();
    if (v.t_value > 0.0 && ecc >= filter.min_eccentricity && ecc <= filter.max_eccentricity &&
        v.variance_explained > filter.min_variance_explained && v.sigma > 0.0) {
      sel.indices.push_back(i);
      sel.voxels.push_back(v);
    }
  }
  return sel;
}

VoxelSelection select_area(std::span<const PrfVoxel> voxels, const std::string& area) {
  VoxelSelection sel;
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    if (voxels[i].area == area) {
      sel.indices.push_back(i);
      sel.voxels.push_back(voxels[i]);
    }
  }
  return sel;
}

double prf_weight(const PrfVoxel& voxel, double x_deg, double y_deg) {
  const double dx = x_deg - voxel.x_c;
  const double dy = y_deg - voxel.y_c;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * voxel.sigma * voxel.sigma));
}

StimulusGeometry StimulusGeometry::of(const Grid& map) {
  if (map.width() != map.height()) {
    throw DimensionError("feature map must be square, got " + std::to_string(map.width()) + "x" +
                         std::to_string(map.height()));
  }
  return {map.width(), map.deg_per_bin()};
}

ResponseProfile predict_profile(const Grid& feature_map, std::span<const PrfVoxel> voxels,
                                const ProfileConfig& config) {
  auto profiles = predict_profiles(std::span(&feature_map, 1), voxels, config);
  return std::move(profiles.front());
}

std::vector<ResponseProfile> predict_profiles(std::span<const Grid> feature_maps,
                                              std::span<const PrfVoxel> voxels,
                                              const ProfileConfig& config) {
  if (feature_maps.empty()) return {};
  if (!(config.window_sigmas > 0.0)) throw Error("pRF window must be positive");
  const auto geometry = StimulusGeometry::of(feature_maps.front());
  for (const auto& m : feature_maps) check_map(m, geometry);

  const std::size_t n = geometry.pixels;
  std::vector<ResponseProfile> profiles(feature_maps.size());
  for (auto& p : profiles) p.values.assign(voxels.size(), 0.0);

  std::vector<char> field(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) field[r * n + c] = geometry.in_field(c, r);
  }

  std::vector<double> wx(n);
  std::vector<double> wy(n);
  std::vector<std::size_t> window_pixels;
  std::vector<double> window_weights;
  for (std::size_t v = 0; v < voxels.size(); ++v) {
    const auto& voxel = voxels[v];
    if (!(voxel.sigma > 0.0)) throw Error("pRF sigma must be positive");
    const double inv = 1.0 / (2.0 * voxel.sigma * voxel.sigma);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = geometry.x_deg(i) - voxel.x_c;
      const double dy = geometry.y_deg(i) - voxel.y_c;
      wx[i] = std::exp(-dx * dx * inv);
      wy[i] = std::exp(-dy * dy * inv);
    }

    const auto cols = pixel_range(voxel.x_c, kUnderflowSigmas * voxel.sigma, geometry, false);
    const auto rows = pixel_range(voxel.y_c, kUnderflowSigmas * voxel.sigma, geometry, true);
    double volume = 0.0;
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      for (std::size_t c = cols.begin; c < cols.end; ++c) {
        if (field[r * n + c]) volume += wx[c] * wy[r];
      }
    }
    if (!(volume > 0.0)) {
      throw NumericError("pRF of voxel " + std::to_string(v) + " has no weight in the stimulus");
    }

    const double window = config.window_sigmas * voxel.sigma;
    const bool whole = !std::isfinite(window);
    const auto wcols = whole ? PixelRange{0, n} : pixel_range(voxel.x_c, window, geometry, false);
    const auto wrows = whole ? PixelRange{0, n} : pixel_range(voxel.y_c, window, geometry, true);
    window_pixels.clear();
    window_weights.clear();
    for (std::size_t r = wrows.begin; r < wrows.end; ++r) {
      const double dy = geometry.y_deg(r) - voxel.y_c;
      for (std::size_t c = wcols.begin; c < wcols.end; ++c) {
        if (!field[r * n + c]) continue;
        if (!whole) {
          const double dx = geometry.x_deg(c) - voxel.x_c;
          if (dx * dx + dy * dy > window * window) continue;
        }
        window_pixels.push_back(r * n + c);
        window_weights.push_back(wx[c] * wy[r]);
      }
    }

    for (std::size_t m = 0; m < feature_maps.size(); ++m) {
      const auto& values = feature_maps[m].values();
      double acc = 0.0;
      for (std::size_t i = 0; i < window_pixels.size(); ++i) {
        acc += window_weights[i] * values[window_pixels[i]];
      }
      profiles[m].values[v] = acc / volume;
    }
  }
  return profiles;
}

CorrMatrix correlation_matrix(std::span<const ResponseProfile> measured,
                              std::span<const ResponseProfile> predicted) {
  if (measured.size() != predicted.size()) {
    throw DimensionError("measured and predicted profile counts differ");
  }
  CorrMatrix corr(measured.size());
  for (std::size_t k = 0; k < measured.size(); ++k) {
    for (std::size_t l = 0; l < predicted.size(); ++l) {
      if (measured[k].values.size() != predicted[l].values.size()) {
        throw DimensionError("profiles differ in voxel count");
      }
      corr.at(k, l) = pearson(measured[k].values, predicted[l].values);
    }
  }
  return corr;
}

Identification identify(const CorrMatrix& corr) {
  Identification out;
  const std::size_t n = corr.size();
  out.correct.assign(n, false);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& diag = corr.at(k, k);
    if (!diag) continue;
    bool wins = true;
    for (std::size_t l = 0; l < n && wins; ++l) {
      if (l == k) continue;
      const auto& other = corr.at(k, l);
      if (other && !(*diag > *other)) wins = false;
    }
    out.correct[k] = wins;
    hits += wins;
  }
  out.accuracy = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
  return out;
}

std::vector<std::optional<double>> confidence(const CorrMatrix& corr) {
  const std::size_t n = corr.size();
  std::vector<std::optional<double>> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    double row_sum = 0.0;
    bool defined = true;
    for (std::size_t l = 0; l < n; ++l) {
      if (!corr.at(k, l)) {
        defined = false;
        break;
      }
      row_sum += *corr.at(k, l);
    }
    if (defined) c[k] = *corr.at(k, k) - row_sum / static_cast<double>(n);
  }
  return c;
}

std::vector<double> Rdm::upper_triangle() const {
  std::vector<double> out;
  out.reserve(n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2);
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t l = k + 1; l < n_; ++l) out.push_back(at(k, l));
  }
  return out;
}

Rdm rdm(std::span<const ResponseProfile> profiles) {
  Rdm out(profiles.size());
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    for (std::size_t l = k + 1; l < profiles.size(); ++l) {
      const auto r = pearson(profiles[k].values, profiles[l].values);
      if (!r) {
        throw NumericError("RDM: profile " + std::to_string(k) + " or " + std::to_string(l) +
                           " has zero variance");
      }
      out.at(k, l) = 1.0 - *r;
      out.at(l, k) = out.at(k, l);
    }
  }
  return out;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("kendall_tau: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  const std::size_t n = a.size();
  if (n < 2) throw DimensionError("kendall_tau needs at least two points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw NumericError("kendall_tau: non-finite value");
    }
  }

  // Knight's algorithm: sort by (a, b), then count inversions of b.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });
  const std::uint64_t ties_a =
      tied_pairs(n, [&](std::size_t i, std::size_t j) { return a[order[i]] == a[order[j]]; });
  const std::uint64_t ties_joint = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return a[order[i]] == a[order[j]] && b[order[i]] == b[order[j]];
  });

  std::vector<double> bs(n);
  for (std::size_t i = 0; i < n; ++i) bs[i] = b[order[i]];
  std::vector<double> scratch(n);
  const std::uint64_t discordant = count_inversions(bs, scratch, 0, n);
  const std::uint64_t ties_b =
      tied_pairs(n, [&](std::size_t i, std::size_t j) { return bs[i] == bs[j]; });

  const auto total = static_cast<std::int64_t>(n * (n - 1) / 2);
  const std::int64_t concordant_minus_discordant =
      total - static_cast<std::int64_t>(ties_a) - static_cast<std::int64_t>(ties_b) +
      static_cast<std::int64_t>(ties_joint) - 2 * static_cast<std::int64_t>(discordant);
  return static_cast<double>(concordant_minus_discordant) / static_cast<double>(total);
}

double rsa_kendall(const Rdm& a, const Rdm& b) {
  if (a.size() != b.size()) throw DimensionError("RDMs differ in size");
  return kendall_tau(a.upper_triangle(), b.upper_triangle());
}

Grid rms_contrast_map(const Grid& luminance, std::size_t window_radius,
                      bool restrict_to_field) {
  const std::size_t w = luminance.width();
  const std::size_t h = luminance.height();
  if (2 * window_radius + 1 > std::min(w, h)) {
    throw DimensionError("contrast window of radius " + std::to_string(window_radius) +
                         " does not fit a " + std::to_string(w) + "x" + std::to_string(h) +
                         " image");
  }
  std::optional<StimulusGeometry> geometry;
  if (restrict_to_field) geometry = StimulusGeometry::of(luminance);
  const auto inside = [&](std::size_t x, std::size_t y) {
    return !geometry || geometry->in_field(x, y);
  };

  Grid out(w, h, luminance.deg_per_bin());
  const auto r = static_cast<std::ptrdiff_t>(window_radius);
  std::vector<double> window;
  window.reserve((2 * window_radius + 1) * (2 * window_radius + 1));
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!inside(x, y)) continue;
      window.clear();
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        const auto yy = static_cast<std::ptrdiff_t>(y) + dy;
        if (yy < 0 || yy >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          const auto xx = static_cast<std::ptrdiff_t>(x) + dx;
          if (xx < 0 || xx >= static_cast<std::ptrdiff_t>(w)) continue;
          const auto ux = static_cast<std::size_t>(xx);
          const auto uy = static_cast<std::size_t>(yy);
          if (inside(ux, uy)) window.push_back(luminance.at(ux, uy));
        }
      }
      // Deviations from the center pixel first, so a flat window is exactly zero.
      const double ref = luminance.at(x, y);
      double m = 0.0;
      for (double v : window) m += v - ref;
      m /= static_cast<double>(window.size());
      double var = 0.0;
      for (double v : window) var += (v - ref - m) * (v - ref - m);
      out.at(x, y) = std::sqrt(var / static_cast<double>(window.size()));
    }
  }
  return out;
}

}  // namespace gsal
