#pragma once

#include "attrib/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace attrib::metrics {

// A metric value plus a flag raised when the input was degenerate (for
// Pearson: a zero-variance argument, in which case the value is 0).
struct Flagged {
  double value = 0.0;
  bool degenerate = false;
};

inline Flagged pearson(std::span<const double> a, std::span<const double> b) {
  require_dims(a.size() == b.size(), "pearson: length mismatch");
  if (a.size() < 2) throw DataError("pearson needs at least 2 observations");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return {0.0, true};
  const double r = sab / std::sqrt(saa * sbb);
  return {std::clamp(r, -1.0, 1.0), false};
}

inline Flagged pearson(const Vector& a, const Vector& b) {
  return pearson(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                 std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

// Kendall's tau-b (tie-corrected) by pair enumeration. With `absolute`, the
// magnitudes are ranked. Returns 0 + degenerate when either side is
// entirely tied.
inline Flagged kendall_tau(std::span<const double> a, std::span<const double> b, bool absolute = true) {
  require_dims(a.size() == b.size(), "kendall_tau: length mismatch");
  if (a.size() < 2) throw DataError("kendall_tau needs at least 2 observations");
  auto val = [absolute](double v) { return absolute ? std::abs(v) : v; };
  long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = val(a[i]) - val(a[j]);
      const double db = val(b[i]) - val(b[j]);
      if (da == 0.0 && db == 0.0) continue;
      if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  const double n1 = static_cast<double>(concordant + discordant + ties_a);
  const double n2 = static_cast<double>(concordant + discordant + ties_b);
  if (n1 == 0.0 || n2 == 0.0) return {0.0, true};
  return {static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2), false};
}

inline Flagged kendall_tau(const Vector& a, const Vector& b, bool absolute = true) {
  return kendall_tau(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                     std::span<const double>(b.data(), static_cast<std::size_t>(b.size())), absolute);
}

}  // namespace attrib::metrics
