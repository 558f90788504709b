#pragma once

// Brute-force reference computations, deliberately independent of the
// library's code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Twice the number of positive-beats-negative pairs (ties count 1) over
/// 2·n_pos·n_neg, by enumerating every pair.
inline double auc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::uint64_t doubled = 0;
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (int y : labels) (y == 1 ? pos : neg) += 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != -1) continue;
      if (scores[i] > scores[j]) doubled += 2;
      if (scores[i] == scores[j]) doubled += 1;
    }
  }
  return static_cast<double>(doubled) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

inline double kendall_pairs(const std::vector<double>& a, const std::vector<double>& b) {
  std::int64_t score = 0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) ++score;
      if (s < 0) --score;
    }
  }
  return static_cast<double>(score) / static_cast<double>(n * (n - 1) / 2);
}

/// Pearson in extended precision.
inline double pearson_long(const std::vector<double>& a, const std::vector<double>& b) {
  long double ma = 0;
  long double mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  long double sab = 0;
  long double saa = 0;
  long double sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

/// Central finite-difference gradient.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double orig = x[j];
    x[j] = orig + h;
    const double up = f(x);
    x[j] = orig - h;
    const double down = f(x);
    x[j] = orig;
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Dense re-evaluation of ½‖θ‖² + C·Σ log(1 + exp(−y θᵀx)) from a dense
/// design matrix.
inline double dense_objective(const std::vector<double>& theta,
                              const std::vector<std::vector<double>>& x,
                              const std::vector<int>& y, double C) {
  long double acc = 0;
  for (double t : theta) acc += 0.5L * t * t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double z = 0;
    for (std::size_t j = 0; j < theta.size(); ++j) z += theta[j] * x[i][j];
    acc += C * std::log1p(std::exp(-static_cast<long double>(y[i]) * z));
  }
  return static_cast<double>(acc);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace oracle
