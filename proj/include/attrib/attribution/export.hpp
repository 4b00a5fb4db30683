#pragma once

#include "attrib/attribution/types.hpp"
#include "attrib/core/csv.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace attrib::attribution {

inline nlohmann::json metadata(const AttributionMatrix& a) {
  return {{"format", "attrib-attribution"},
          {"version", 1},
          {"method", a.method},
          {"params", a.params},
          {"baseline", a.baseline},
          {"rows", a.rows()},
          {"cols", a.cols()}};
}

// `<stem>.csv`: one row per instance, one column per original feature.
// `<stem>.meta.json`: method, hyperparameters, baseline descriptor, seed.
inline void export_attribution(const AttributionMatrix& a, const std::vector<std::string>& feature_names,
                               const std::string& stem) {
  require_dims(static_cast<Index>(feature_names.size()) == a.cols(), "one feature name per attribution column");
  {
    std::ofstream os(stem + ".csv");
    if (!os) throw FormatError("cannot write " + stem + ".csv");
    csv::write_matrix(os, feature_names, a.values);
  }
  std::ofstream meta(stem + ".meta.json");
  if (!meta) throw FormatError("cannot write " + stem + ".meta.json");
  meta << metadata(a).dump(2) << '\n';
}

}  // namespace attrib::attribution
