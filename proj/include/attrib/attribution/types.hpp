#pragma once

#include "attrib/core/rng.hpp"
#include "attrib/core/types.hpp"
#include "attrib/nn/network.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace attrib::attribution {

// Reference input(s) for reference-based and Shapley-based methods.
class BaselineSpec {
 public:
  enum class Kind { zeros, feature_means, fixed, sample_set };

  static BaselineSpec zeros() { return BaselineSpec(Kind::zeros, {}); }

  // Column means of the (encoded) training data.
  static BaselineSpec feature_means(const Matrix& train) {
    if (train.rows() == 0) throw DataError("feature_means baseline needs training rows");
    return BaselineSpec(Kind::feature_means, train.colwise().mean());
  }

  static BaselineSpec fixed(const Vector& x) { return BaselineSpec(Kind::fixed, x.transpose()); }

  static BaselineSpec sample_set(Matrix rows) {
    if (rows.rows() == 0) throw DataError("empty background sample set");
    return BaselineSpec(Kind::sample_set, std::move(rows));
  }

  Kind kind() const { return kind_; }
  bool single() const { return kind_ != Kind::sample_set; }

  // The single reference vector for width p.
  Vector reference(Index p) const {
    if (!single()) throw ConfigError("sample_set baseline has no single reference; use a Shapley method");
    if (kind_ == Kind::zeros) return Vector::Zero(p);
    require_dims(data_.cols() == p, "baseline width does not match the encoded input width");
    return data_.row(0).transpose();
  }

  const Matrix& samples() const {
    if (kind_ != Kind::sample_set) throw ConfigError("baseline is not a sample set");
    return data_;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::zeros: return "zeros";
      case Kind::feature_means: return "feature_means";
      case Kind::fixed: return "fixed";
      case Kind::sample_set: return "sample_set(" + std::to_string(data_.rows()) + ")";
    }
    return "?";
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", describe()}};
    if (kind_ == Kind::feature_means || kind_ == Kind::fixed)
      j["values"] = std::vector<double>(data_.data(), data_.data() + data_.size());
    return j;
  }

 private:
  BaselineSpec(Kind k, Matrix data) : kind_(k), data_(std::move(data)) {}

  Kind kind_;
  Matrix data_;
};

struct MethodConfig {
  int sg_samples = 50;
  double sg_noise = 0.2;
  int intgrad_steps = 50;
  int mc_samples = 50;
  double lrp_epsilon = 0.01;
  double lrp_alpha = 2.0;
  std::uint64_t seed = 0;

  double lrp_beta() const { return 1.0 - lrp_alpha; }

  void validate() const {
    if (!(sg_noise >= 0.0)) throw ConfigError("sg_noise must be >= 0");
    if (sg_samples < 1 || intgrad_steps < 1 || mc_samples < 1)
      throw ConfigError("sample and step counts must be >= 1");
    if (!(lrp_epsilon > 0.0)) throw ConfigError("lrp_epsilon must be > 0");
  }

  nlohmann::json to_json() const {
    return {{"sg_samples", sg_samples}, {"sg_noise", sg_noise},     {"intgrad_steps", intgrad_steps},
            {"mc_samples", mc_samples}, {"lrp_epsilon", lrp_epsilon}, {"lrp_alpha", lrp_alpha},
            {"seed", seed}};
  }
};

// n x p relevance scores for one method. `intercept` is the explained output
// f(x) minus the row sum, i.e. r0 in f(x) = r0 + sum_i r_i.
struct AttributionMatrix {
  Matrix values;
  std::string method;
  nlohmann::json params = nlohmann::json::object();
  std::string baseline = "none";
  Vector intercept;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  bool all_finite() const { return values.allFinite() && intercept.allFinite(); }
};

inline AttributionMatrix make_attribution(const nn::DenseNetwork& net, const Matrix& X, Matrix values,
                                          std::string method, std::string baseline = "none",
                                          nlohmann::json params = nlohmann::json::object()) {
  AttributionMatrix a;
  a.intercept = nn::predict(net, X) - values.rowwise().sum();
  a.values = std::move(values);
  a.method = std::move(method);
  a.baseline = std::move(baseline);
  a.params = std::move(params);
  return a;
}

}  // namespace attrib::attribution
