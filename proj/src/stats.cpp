#include "gsal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsal/error.hpp"

namespace gsal {

double mean(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("mean of an empty series");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double population_sd(std::span<const double> values) {
  const double mu = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("pearson: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  if (a.size() < 2) throw DimensionError("pearson needs at least two points");
  // The mean of a constant series need not reproduce the constant, so test
  // for it directly rather than relying on a zero sum of squares.
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(a) || constant(b)) return std::nullopt;
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  const double r = sab / std::sqrt(saa * sbb);
  // Rounding can push |r| a hair past 1.
  return std::clamp(r, -1.0, 1.0);
}

double sorted_percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyInputError("percentile of an empty series");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace gsal
