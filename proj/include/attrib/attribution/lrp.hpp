#pragma once

#include "attrib/attribution/types.hpp"

#include <string>

namespace attrib::attribution {

struct LrpRule {
  enum class Kind { zero, epsilon, alpha_beta };
  Kind kind = Kind::zero;
  double epsilon = 0.01;
  double alpha = 2.0;

  static LrpRule zero_rule() { return {}; }
  static LrpRule epsilon_rule(double eps) { return {Kind::epsilon, eps, 2.0}; }
  static LrpRule alpha_beta(double alpha) { return {Kind::alpha_beta, 0.01, alpha}; }

  std::string name() const {
    switch (kind) {
      case Kind::zero: return "lrp_zero";
      case Kind::epsilon: return "lrp_epsilon";
      case Kind::alpha_beta: return "lrp_alpha_beta";
    }
    return "lrp";
  }
};

namespace detail {

// Elementwise num / den with 0/0 and x/0 defined as 0.
inline Matrix safe_divide(const Matrix& num, const Matrix& den) {
  return num.binaryExpr(den, [](double a, double b) { return b == 0.0 ? 0.0 : a / b; });
}

inline Matrix positive_part(const Matrix& m) { return m.cwiseMax(0.0); }
inline Matrix negative_part(const Matrix& m) { return m.cwiseMin(0.0); }

}  // namespace detail

// Layer-wise relevance propagation starting from R = f(x) at the output.
// Relevance passes through activations unchanged; each dense layer
// redistributes it in proportion to the contributions a_j * w_kj:
//   zero:       R_j = sum_k a_j w_kj / z_k * R_k
//   epsilon:    denominator z_k + eps * sign(z_k), sign(0) taken as +1
//   alpha_beta: R_j = sum_k (alpha (a_j w_kj)+ / z_k+ + beta (a_j w_kj)- / z_k-) R_k
//               with beta = 1 - alpha and z_k+- including the bias part.
// Bias relevance is not passed on and ends up in the intercept.
inline AttributionMatrix lrp(const nn::DenseNetwork& net, const Matrix& X, const LrpRule& rule) {
  const auto trace = nn::forward_trace(net, X);
  Matrix R = trace.output();
  for (std::size_t i = net.depth(); i-- > 0;) {
    const auto& layer = net.layer(i);
    const Matrix& A = trace.layer_input(i);
    const Matrix& Z = trace.pre[i];
    if (rule.kind == LrpRule::Kind::alpha_beta) {
      const Matrix Ap = detail::positive_part(A), An = detail::negative_part(A);
      const Matrix Wp = detail::positive_part(layer.weights), Wn = detail::negative_part(layer.weights);
      const RowVector bp = layer.bias.cwiseMax(0.0).transpose();
      const RowVector bn = layer.bias.cwiseMin(0.0).transpose();
      Matrix Zp = Ap * Wp.transpose() + An * Wn.transpose();
      Zp.rowwise() += bp;
      Matrix Zn = Ap * Wn.transpose() + An * Wp.transpose();
      Zn.rowwise() += bn;
      const Matrix Sp = detail::safe_divide(R, Zp);
      const Matrix Sn = detail::safe_divide(R, Zn);
      const double beta = 1.0 - rule.alpha;
      const Matrix pos = Ap.cwiseProduct(Sp * Wp) + An.cwiseProduct(Sp * Wn);
      const Matrix neg = Ap.cwiseProduct(Sn * Wn) + An.cwiseProduct(Sn * Wp);
      R = rule.alpha * pos + beta * neg;
    } else {
      Matrix den = Z;
      if (rule.kind == LrpRule::Kind::epsilon)
        den = Z.unaryExpr([eps = rule.epsilon](double z) { return z + (z >= 0.0 ? eps : -eps); });
      R = A.cwiseProduct(detail::safe_divide(R, den) * layer.weights);
    }
  }
  nlohmann::json params = nlohmann::json::object();
  if (rule.kind == LrpRule::Kind::epsilon) params["epsilon"] = rule.epsilon;
  if (rule.kind == LrpRule::Kind::alpha_beta) {
    params["alpha"] = rule.alpha;
    params["beta"] = 1.0 - rule.alpha;
  }
  AttributionMatrix a;
  a.intercept = trace.output().col(0) - R.rowwise().sum();
  a.values = std::move(R);
  a.method = rule.name();
  a.params = std::move(params);
  return a;
}

}  // namespace attrib::attribution
