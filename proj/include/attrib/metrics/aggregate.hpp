#pragma once

#include "attrib/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace attrib::metrics {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator; 0 when fewer than 2 values
  std::size_t count = 0;
  std::size_t degenerate = 0;  // carried-along count of flagged inputs
  bool sd_undefined = false;
};

inline Summary aggregate(std::span<const double> values, std::size_t degenerate_count = 0) {
  Summary s;
  s.count = values.size();
  s.degenerate = degenerate_count;
  if (values.empty()) {
    s.sd_undefined = true;
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    s.sd_undefined = true;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

inline Summary aggregate(const std::vector<double>& values, std::size_t degenerate_count = 0) {
  return aggregate(std::span<const double>(values), degenerate_count);
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw DataError("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace attrib::metrics
