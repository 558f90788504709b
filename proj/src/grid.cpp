#include "gsal/grid.hpp"

#include <cmath>
#include <string>

#include "gsal/error.hpp"

namespace gsal {

Grid::Grid(std::size_t width, std::size_t height, double deg_per_bin, double fill)
    : Grid(width, height, deg_per_bin, std::vector<double>(width * height, fill)) {}

Grid::Grid(std::size_t width, std::size_t height, double deg_per_bin, std::vector<double> values)
    : width_(width), height_(height), deg_per_bin_(deg_per_bin), values_(std::move(values)) {
  if (width == 0 || height == 0) throw DimensionError("grid dimensions must be positive");
  if (!(deg_per_bin > 0.0) || !std::isfinite(deg_per_bin)) {
    throw DimensionError("grid cell size must be positive");
  }
  if (values_.size() != width * height) {
    throw DimensionError("grid holds " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(width * height));
  }
}

double Grid::sum() const {
  double acc = 0.0;
  for (double v : values_) acc += v;
  return acc;
}

bool Grid::all_nonnegative() const {
  for (double v : values_) {
    if (!(v >= 0.0)) return false;
  }
  return true;
}

Grid Grid::normalized() const {
  const double total = sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericError("cannot normalize a grid with total mass " + std::to_string(total));
  }
  Grid out = *this;
  for (double& v : out.values_) v /= total;
  return out;
}

}  // namespace gsal
