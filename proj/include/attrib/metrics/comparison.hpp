#pragma once

#include "attrib/attribution/types.hpp"
#include "attrib/dgp/generate.hpp"
#include "attrib/metrics/correlation.hpp"
#include "attrib/metrics/ranking.hpp"

#include <vector>

namespace attrib::metrics {

// Per-feature Pearson r between an (aggregated, n x p) attribution and the
// ground-truth effect matrix.
inline std::vector<Flagged> ground_truth_correlation(const Matrix& attribution, const Matrix& effects) {
  require_dims(attribution.rows() == effects.rows() && attribution.cols() == effects.cols(),
               "attribution and effect matrices differ in shape");
  std::vector<Flagged> out;
  for (Index j = 0; j < effects.cols(); ++j) out.push_back(pearson(Vector(attribution.col(j)), Vector(effects.col(j))));
  return out;
}

// Refuses bundles without ground truth (e.g. ingested user data).
inline std::vector<Flagged> ground_truth_correlation(const attribution::AttributionMatrix& attribution,
                                                     const dgp::DatasetBundle& bundle) {
  return ground_truth_correlation(attribution.values, bundle.ground_truth());
}

struct MethodMatrix {
  Matrix values;
  Matrix degenerate;  // count of flagged contributions per entry
};

// Entry (a, b): mean over features of the Pearson r between the two
// methods' relevance columns.
inline MethodMatrix method_correlation_matrix(const std::vector<Matrix>& attrs) {
  const auto m = static_cast<Index>(attrs.size());
  MethodMatrix out{Matrix::Zero(m, m), Matrix::Zero(m, m)};
  for (Index a = 0; a < m; ++a)
    for (Index b = a; b < m; ++b) {
      const auto& A = attrs[static_cast<std::size_t>(a)];
      const auto& B = attrs[static_cast<std::size_t>(b)];
      require_dims(A.rows() == B.rows() && A.cols() == B.cols(), "attribution shapes differ");
      double s = 0.0;
      double flags = 0.0;
      for (Index j = 0; j < A.cols(); ++j) {
        const auto r = pearson(Vector(A.col(j)), Vector(B.col(j)));
        s += r.value;
        flags += r.degenerate;
      }
      out.values(a, b) = out.values(b, a) = s / static_cast<double>(A.cols());
      out.degenerate(a, b) = out.degenerate(b, a) = flags;
    }
  return out;
}

// Entry (a, b): mean over instances of Kendall tau-b between the rows.
inline MethodMatrix kendall_matrix(const std::vector<Matrix>& attrs, bool absolute = true) {
  const auto m = static_cast<Index>(attrs.size());
  MethodMatrix out{Matrix::Zero(m, m), Matrix::Zero(m, m)};
  for (Index a = 0; a < m; ++a)
    for (Index b = a; b < m; ++b) {
      const auto& A = attrs[static_cast<std::size_t>(a)];
      const auto& B = attrs[static_cast<std::size_t>(b)];
      require_dims(A.rows() == B.rows() && A.cols() == B.cols(), "attribution shapes differ");
      double s = 0.0, flags = 0.0;
      for (Index i = 0; i < A.rows(); ++i) {
        const auto t = kendall_tau(Vector(A.row(i).transpose()), Vector(B.row(i).transpose()), absolute);
        s += t.value;
        flags += t.degenerate;
      }
      out.values(a, b) = out.values(b, a) = s / static_cast<double>(A.rows());
      out.degenerate(a, b) = out.degenerate(b, a) = flags;
    }
  return out;
}

// Entry (a, b): mean over instances of top-k rank agreement.
inline MethodMatrix rank_agreement_matrix(const std::vector<Matrix>& attrs, std::size_t k) {
  const auto m = static_cast<Index>(attrs.size());
  MethodMatrix out{Matrix::Zero(m, m), Matrix::Zero(m, m)};
  for (Index a = 0; a < m; ++a)
    for (Index b = a; b < m; ++b) {
      const auto& A = attrs[static_cast<std::size_t>(a)];
      const auto& B = attrs[static_cast<std::size_t>(b)];
      require_dims(A.rows() == B.rows() && A.cols() == B.cols(), "attribution shapes differ");
      double s = 0.0;
      for (Index i = 0; i < A.rows(); ++i)
        s += rank_agreement(Vector(A.row(i).transpose()), Vector(B.row(i).transpose()), k);
      out.values(a, b) = out.values(b, a) = s / static_cast<double>(A.rows());
    }
  return out;
}

}  // namespace attrib::metrics
