#pragma once

#include <optional>
#include <span>

namespace gsal {

double mean(std::span<const double> values);

/// Population standard deviation (divides by n).
double population_sd(std::span<const double> values);

/// Pearson correlation by the two-pass centered formula. Empty optional when
/// either series has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

/// Percentile of already sorted values with linear interpolation between
/// closest ranks, q in [0, 1].
double sorted_percentile(std::span<const double> sorted, double q);

}  // namespace gsal
