#pragma once

#include "attrib/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <span>
#include <vector>

namespace attrib::metrics {

// Feature indices ordered by descending |relevance|, ties by ascending index.
inline std::vector<std::size_t> rank_by_magnitude(std::span<const double> r) {
  std::vector<std::size_t> idx(r.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(r[a]) > std::abs(r[b]); });
  return idx;
}

inline std::vector<std::size_t> rank_by_magnitude(const Vector& r) {
  return rank_by_magnitude(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
}

// Fraction of the top-k positions where both rankings hold the same feature.
inline double rank_agreement(std::span<const double> a, std::span<const double> b, std::size_t k) {
  require_dims(a.size() == b.size(), "rank_agreement: length mismatch");
  if (k == 0 || k > a.size()) throw ConfigError("rank_agreement: k must lie in [1, p]");
  const auto ra = rank_by_magnitude(a), rb = rank_by_magnitude(b);
  std::size_t same = 0;
  for (std::size_t i = 0; i < k; ++i) same += ra[i] == rb[i];
  return static_cast<double>(same) / static_cast<double>(k);
}

inline double rank_agreement(const Vector& a, const Vector& b, std::size_t k) {
  return rank_agreement(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                        std::span<const double>(b.data(), static_cast<std::size_t>(b.size())), k);
}

// F1 of "in the top-k by |relevance|" against the true important set.
inline double topk_f1(std::span<const double> r, const std::set<std::size_t>& important, std::size_t k) {
  if (k == 0 || k > r.size()) throw ConfigError("topk_f1: k must lie in [1, p]");
  if (important.empty()) throw ConfigError("topk_f1: empty important set");
  const auto ranked = rank_by_magnitude(r);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += important.count(ranked[i]);
  if (hits == 0) return 0.0;
  const double precision = static_cast<double>(hits) / static_cast<double>(k);
  const double recall = static_cast<double>(hits) / static_cast<double>(important.size());
  return 2.0 * precision * recall / (precision + recall);
}

inline double topk_f1(const Vector& r, const std::set<std::size_t>& important, std::size_t k) {
  return topk_f1(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())), important, k);
}

}  // namespace attrib::metrics
