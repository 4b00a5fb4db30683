#pragma once

#include "attrib/core/types.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace attrib::dgp {

enum class EffectKind { linear, piecewise_linear, non_continuous, quadratic, categorical_equidistant };

inline std::string to_string(EffectKind k) {
  switch (k) {
    case EffectKind::linear: return "linear";
    case EffectKind::piecewise_linear: return "piecewise_linear";
    case EffectKind::non_continuous: return "non_continuous";
    case EffectKind::quadratic: return "quadratic";
    case EffectKind::categorical_equidistant: return "categorical_equidistant";
  }
  return "?";
}

inline EffectKind effect_from_string(std::string_view s) {
  if (s == "linear") return EffectKind::linear;
  if (s == "piecewise_linear" || s == "piecewise-linear") return EffectKind::piecewise_linear;
  if (s == "non_continuous" || s == "non-continuous") return EffectKind::non_continuous;
  if (s == "quadratic") return EffectKind::quadratic;
  if (s == "categorical_equidistant" || s == "categorical") return EffectKind::categorical_equidistant;
  throw ConfigError("unknown effect kind '" + std::string(s) + "'");
}

// Effect of level k (1-based) of a c-level categorical feature: equidistant
// values from -1 to 1.
inline double categorical_effect(int k, int c) {
  if (c < 2) throw ConfigError("categorical feature needs at least 2 levels");
  if (k < 1 || k > c) throw DataError("level " + std::to_string(k) + " outside 1.." + std::to_string(c));
  return -1.0 + 2.0 * static_cast<double>(k - 1) / static_cast<double>(c - 1);
}

// Transformation g for numeric features.
//   piecewise_linear: slope -0.5 left of 0, 1.5 right of 0 (continuous kink)
//   non_continuous:   x - 1 left of 0, x + 1 from 0 on (unit jump each side)
inline double apply_effect(EffectKind kind, double x) {
  switch (kind) {
    case EffectKind::linear: return x;
    case EffectKind::quadratic: return x * x;
    case EffectKind::piecewise_linear: return x <= 0.0 ? -0.5 * x : 1.5 * x;
    case EffectKind::non_continuous: return x < 0.0 ? x - 1.0 : x + 1.0;
    case EffectKind::categorical_equidistant:
      throw ConfigError("categorical effects are defined on level indices; use categorical_effect");
  }
  return x;
}

}  // namespace attrib::dgp
