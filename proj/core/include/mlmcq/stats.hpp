#pragma once

#include <cmath>
#include <cstdint>

namespace mlmcq {

/// Mergeable (count, mean, M2) accumulator. Merging is Chan's pairwise update,
/// so the result depends on merge order only through floating-point rounding.
struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& other) noexcept {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double n_a = static_cast<double>(count);
    const double n_b = static_cast<double>(other.count);
    const double n = n_a + n_b;
    const double delta = other.mean - mean;
    mean += delta * n_b / n;
    m2 += other.m2 + delta * delta * n_a * n_b / n;
    count += other.count;
  }

  /// Unbiased sample variance; zero below two samples.
  double variance() const noexcept {
    return count >= 2 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  double standard_error() const noexcept {
    return count >= 2 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace mlmcq
