#pragma once

#include <cstddef>
#include <vector>

namespace gsal {

/// Row-major 2-D map with a physical cell size in degrees of visual angle.
/// Row 0 is the top of the image. Used for salience maps, fixation
/// densities, luminance images and feature maps.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, double deg_per_bin, double fill = 0.0);
  Grid(std::size_t width, std::size_t height, double deg_per_bin, std::vector<double> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  double deg_per_bin() const { return deg_per_bin_; }

  double& at(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double sum() const;
  bool all_nonnegative() const;

  /// Copy scaled to sum to one. Throws when the total mass is not positive.
  Grid normalized() const;

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  double deg_per_bin_ = 1.0;
  std::vector<double> values_;
};

using SalienceGrid = Grid;

}  // namespace gsal
