#include "gsal/fixation_maps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gsal/error.hpp"
#include "gsal/stats.hpp"

namespace gsal {

namespace {

std::vector<double> gaussian_kernel(double sigma_bins, double truncate) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(truncate * sigma_bins));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma_bins * sigma_bins));
    k[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& v : k) v /= total;
  return k;
}

void check_region(const Grid& grid, const BinRect& r, const char* name) {
  if (r.x0 >= r.x1 || r.y0 >= r.y1 || r.x1 > grid.width() || r.y1 > grid.height()) {
    throw DimensionError(std::string(name) + " region is empty or outside the " +
                         std::to_string(grid.width()) + "x" + std::to_string(grid.height()) +
                         " grid");
  }
}

}  // namespace

FilterResult filter_fixations(std::span<const Fixation> fixations, ImageExtent extent,
                              const FilterConfig& config) {
  FilterResult result;
  if (config.duration_stats) {
    result.report.duration = *config.duration_stats;
  } else if (!fixations.empty()) {
    std::vector<double> durations;
    durations.reserve(fixations.size());
    for (const auto& f : fixations) durations.push_back(f.duration_ms);
    result.report.duration = {mean(durations), population_sd(durations)};
  }
  const double max_duration =
      result.report.duration.mean_ms + config.sd_multiplier * result.report.duration.sd_ms;

  auto& rep = result.report;
  for (const auto& f : fixations) {
    if (f.latency_ms < config.anticipatory_latency_ms) {
      ++rep.anticipatory;
    } else if (f.duration_ms < config.min_duration_ms) {
      ++rep.too_short;
    } else if (f.duration_ms > max_duration) {
      ++rep.too_long;
    } else if (!(f.x_deg >= 0.0 && f.x_deg < extent.width_deg && f.y_deg >= 0.0 &&
                 f.y_deg < extent.height_deg)) {
      ++rep.outside_image;
    } else {
      result.kept.push_back(f);
    }
  }
  return result;
}

std::vector<Fixation> first_fixations(std::span<const Fixation> fixations, int image_id) {
  std::map<int, Fixation> first;
  for (const auto& f : fixations) {
    if (f.image_id != image_id) continue;
    auto it = first.find(f.subject_id);
    if (it == first.end()) {
      first.emplace(f.subject_id, f);
    } else if (f.ordinal < it->second.ordinal) {
      it->second = f;
    }
  }
  std::vector<Fixation> out;
  out.reserve(first.size());
  for (const auto& [subject, f] : first) out.push_back(f);
  return out;
}

Grid fixation_histogram(std::span<const Fixation> fixations, const GridSpec& spec) {
  Grid hist(spec.width_bins, spec.height_bins, spec.deg_per_bin);
  for (const auto& f : fixations) {
    const double bx = std::floor(f.x_deg / spec.deg_per_bin);
    const double by = std::floor(f.y_deg / spec.deg_per_bin);
    if (bx < 0.0 || by < 0.0 || bx >= static_cast<double>(spec.width_bins) ||
        by >= static_cast<double>(spec.height_bins)) {
      continue;
    }
    hist.at(static_cast<std::size_t>(bx), static_cast<std::size_t>(by)) += 1.0;
  }
  return hist;
}

Grid gaussian_smooth(const Grid& grid, double sigma_deg, double truncate) {
  if (!(sigma_deg > 0.0)) throw Error("smoothing sigma must be positive");
  const auto kernel = gaussian_kernel(sigma_deg / grid.deg_per_bin(), truncate);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto w = static_cast<std::ptrdiff_t>(grid.width());
  const auto h = static_cast<std::ptrdiff_t>(grid.height());

  Grid rows_done(grid.width(), grid.height(), grid.deg_per_bin());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::ptrdiff_t xx = x + k;
        if (xx < 0 || xx >= w) continue;
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               grid.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(y));
      }
      rows_done.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = acc;
    }
  }
  Grid out(grid.width(), grid.height(), grid.deg_per_bin());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::ptrdiff_t yy = y + k;
        if (yy < 0 || yy >= h) continue;
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               rows_done.at(static_cast<std::size_t>(x), static_cast<std::size_t>(yy));
      }
      out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = acc;
    }
  }
  return out;
}

Grid fixation_density(std::span<const Fixation> fixations, const GridSpec& spec,
                      double sigma_deg) {
  const Grid hist = fixation_histogram(fixations, spec);
  if (hist.sum() == 0.0) throw EmptyInputError("no fixations fall on the image grid");
  return gaussian_smooth(hist, sigma_deg).normalized();
}

double kld(const Grid& fixation_density, const Grid& salience, double eps) {
  if (!fixation_density.same_shape(salience)) {
    throw DimensionError("kld: grids are " + std::to_string(fixation_density.width()) + "x" +
                         std::to_string(fixation_density.height()) + " and " +
                         std::to_string(salience.width()) + "x" +
                         std::to_string(salience.height()));
  }
  const auto& f = fixation_density.values();
  const auto& s = salience.values();
  double acc = 0.0;
  for (std::size_t b = 0; b < f.size(); ++b) {
    if (f[b] == 0.0) continue;
    acc += f[b] * std::log(f[b] / (s[b] + eps) + eps);
  }
  return acc;
}

double region_mass(const Grid& grid, const BinRect& region) {
  check_region(grid, region, "mass");
  double acc = 0.0;
  for (std::size_t y = region.y0; y < region.y1; ++y) {
    for (std::size_t x = region.x0; x < region.x1; ++x) acc += grid.at(x, y);
  }
  return acc;
}

MassSplit salience_mass(const Grid& stimulus, const BinRect& left, const BinRect& right) {
  check_region(stimulus, left, "left");
  check_region(stimulus, right, "right");
  if (left.overlaps(right)) throw DimensionError("left and right regions overlap");
  if (!stimulus.all_nonnegative()) throw Error("salience map has negative values");
  if (std::abs(stimulus.sum() - 1.0) > 1e-9) {
    throw Error("salience map is not normalized (sum " + std::to_string(stimulus.sum()) + ")");
  }
  return {region_mass(stimulus, left), region_mass(stimulus, right)};
}

DeltaSeries delta_series(std::span<const double> delta_gs, std::span<const double> delta_m) {
  if (delta_gs.size() != delta_m.size()) throw DimensionError("delta series differ in length");
  if (delta_gs.size() < 2) throw EmptyInputError("delta correlation needs at least two trials");
  DeltaSeries out;
  out.delta_gs.assign(delta_gs.begin(), delta_gs.end());
  out.delta_m.assign(delta_m.begin(), delta_m.end());
  out.pearson_r = pearson(out.delta_gs, out.delta_m);
  return out;
}

DeltaSeries delta_series(const GlobalSalienceModel& model, std::span<const PairedMass> trials) {
  std::vector<double> gs;
  std::vector<double> m;
  for (const auto& t : trials) {
    const auto n = model.w.size();
    if (t.left_image < 0 || t.right_image < 0 || static_cast<std::size_t>(t.left_image) >= n ||
        static_cast<std::size_t>(t.right_image) >= n) {
      throw DimensionError("image id outside the model's " + std::to_string(n) + " images");
    }
    gs.push_back(model.w[static_cast<std::size_t>(t.left_image)] -
                 model.w[static_cast<std::size_t>(t.right_image)]);
    m.push_back(t.mass.delta());
  }
  return delta_series(gs, m);
}

}  // namespace gsal
