#pragma once

#include "attrib/core/types.hpp"
#include "attrib/dgp/generate.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace attrib::preprocess {

enum class ScalerKind { none, z_score, max_abs };
enum class EncoderKind { label, one_hot, dummy, binary };

inline std::string to_string(ScalerKind s) {
  switch (s) {
    case ScalerKind::none: return "none";
    case ScalerKind::z_score: return "z_score";
    case ScalerKind::max_abs: return "max_abs";
  }
  return "?";
}

inline std::string to_string(EncoderKind e) {
  switch (e) {
    case EncoderKind::label: return "label";
    case EncoderKind::one_hot: return "one_hot";
    case EncoderKind::dummy: return "dummy";
    case EncoderKind::binary: return "binary";
  }
  return "?";
}

inline ScalerKind scaler_from_string(std::string_view s) {
  if (s == "none") return ScalerKind::none;
  if (s == "z_score" || s == "zscore" || s == "z-score") return ScalerKind::z_score;
  if (s == "max_abs" || s == "maxabs" || s == "max-abs") return ScalerKind::max_abs;
  throw ConfigError("unknown scaler '" + std::string(s) + "'");
}

inline EncoderKind encoder_from_string(std::string_view s) {
  if (s == "label") return EncoderKind::label;
  if (s == "one_hot" || s == "onehot" || s == "one-hot") return EncoderKind::one_hot;
  if (s == "dummy") return EncoderKind::dummy;
  if (s == "binary") return EncoderKind::binary;
  throw ConfigError("unknown encoder '" + std::string(s) + "'");
}

// Number of encoded columns for a c-level feature. Binary uses
// floor(log(c)/log(2) + 1) bits, i.e. the bit width of c.
inline Index encoded_width(EncoderKind e, int levels) {
  switch (e) {
    case EncoderKind::label: return 1;
    case EncoderKind::one_hot: return levels;
    case EncoderKind::dummy: return levels - 1;
    case EncoderKind::binary: return static_cast<Index>(std::bit_width(static_cast<unsigned>(levels)));
  }
  return 0;
}

// Preprocessing choice for one raw feature.
struct FeatureChoice {
  ScalerKind scaler = ScalerKind::none;
  EncoderKind encoder = EncoderKind::one_hot;
};

struct FeatureTransform {
  std::string name;
  bool categorical = false;
  // continuous: encoded = (x - center) / scale
  ScalerKind scaler = ScalerKind::none;
  double center = 0.0;
  double scale = 1.0;
  // categorical
  EncoderKind encoder = EncoderKind::label;
  int levels = 0;

  Index width() const { return categorical ? encoded_width(encoder, levels) : 1; }
};

class Pipeline {
 public:
  Pipeline() = default;

  const std::vector<FeatureTransform>& transforms() const { return transforms_; }
  const std::vector<std::vector<Index>>& column_map() const { return column_map_; }
  Index input_width() const { return static_cast<Index>(transforms_.size()); }
  Index output_width() const { return output_width_; }

  // Fits scaler parameters on training rows only.
  static Pipeline fit(const std::vector<FeatureChoice>& choices, const dgp::DatasetBundle& train) {
    const Index p = train.features();
    if (static_cast<Index>(choices.size()) != p)
      throw ConfigError("one preprocessing choice per feature required");
    if (train.rows() == 0) throw DataError("cannot fit preprocessing on empty training data");
    Pipeline pl;
    for (Index j = 0; j < p; ++j) {
      const auto& spec = train.schema[static_cast<std::size_t>(j)];
      const auto& choice = choices[static_cast<std::size_t>(j)];
      FeatureTransform t;
      t.name = spec.name;
      const auto col = train.X.col(j);
      if (spec.categorical()) {
        t.categorical = true;
        t.encoder = choice.encoder;
        t.levels = spec.levels;
        for (Index i = 0; i < col.size(); ++i) check_level(t, col(i));
      } else {
        t.scaler = choice.scaler;
        if (choice.scaler == ScalerKind::z_score) {
          const double n = static_cast<double>(col.size());
          if (col.size() < 2) throw DataError(spec.name + ": z-score needs at least 2 rows");
          t.center = col.mean();
          t.scale = std::sqrt((col.array() - t.center).square().sum() / (n - 1.0));
          if (!(t.scale > 0.0)) throw DataError(spec.name + ": constant column, sd = 0");
        } else if (choice.scaler == ScalerKind::max_abs) {
          t.scale = col.cwiseAbs().maxCoeff();
          if (!(t.scale > 0.0)) throw DataError(spec.name + ": constant zero column, max_abs = 0");
        }
      }
      pl.transforms_.push_back(std::move(t));
    }
    pl.rebuild_column_map();
    return pl;
  }

  // Encodes raw rows (categorical columns as 1-based level indices).
  Matrix apply(const Matrix& X) const {
    require_dims(X.cols() == input_width(), "raw matrix width does not match the pipeline");
    Matrix out = Matrix::Zero(X.rows(), output_width_);
    for (std::size_t j = 0; j < transforms_.size(); ++j) {
      const auto& t = transforms_[j];
      const auto& cols = column_map_[j];
      const auto jj = static_cast<Index>(j);
      for (Index i = 0; i < X.rows(); ++i) {
        const double x = X(i, jj);
        if (!t.categorical) {
          out(i, cols[0]) = (x - t.center) / t.scale;
          continue;
        }
        const int code = check_level(t, x) - 1;
        switch (t.encoder) {
          case EncoderKind::label: out(i, cols[0]) = code; break;
          case EncoderKind::one_hot: out(i, cols[static_cast<std::size_t>(code)]) = 1.0; break;
          case EncoderKind::dummy:
            if (code > 0) out(i, cols[static_cast<std::size_t>(code - 1)]) = 1.0;
            break;
          case EncoderKind::binary: {
            const auto w = cols.size();
            for (std::size_t b = 0; b < w; ++b) out(i, cols[b]) = (code >> (w - 1 - b)) & 1;
            break;
          }
        }
      }
    }
    return out;
  }

  Matrix apply(const dgp::DatasetBundle& b) const { return apply(b.X); }

  // Maps encoded rows back to raw values (level indices for categoricals).
  Matrix invert(const Matrix& encoded) const {
    require_dims(encoded.cols() == output_width_, "encoded matrix width does not match the pipeline");
    Matrix out(encoded.rows(), input_width());
    for (std::size_t j = 0; j < transforms_.size(); ++j) {
      const auto& t = transforms_[j];
      const auto& cols = column_map_[j];
      for (Index i = 0; i < encoded.rows(); ++i) {
        double v = 0.0;
        if (!t.categorical) {
          v = encoded(i, cols[0]) * t.scale + t.center;
        } else {
          int code = 0;
          switch (t.encoder) {
            case EncoderKind::label: code = static_cast<int>(std::lround(encoded(i, cols[0]))); break;
            case EncoderKind::one_hot:
            case EncoderKind::dummy:
              for (std::size_t c = 0; c < cols.size(); ++c)
                if (encoded(i, cols[c]) > 0.5) code = static_cast<int>(c) + (t.encoder == EncoderKind::dummy);
              break;
            case EncoderKind::binary:
              for (std::size_t b = 0; b < cols.size(); ++b) code = (code << 1) | (encoded(i, cols[b]) > 0.5);
              break;
          }
          v = code + 1;
        }
        out(i, static_cast<Index>(j)) = v;
      }
    }
    return out;
  }

  // Sums encoded-column relevances per original feature.
  Matrix aggregate_relevance(const Matrix& encoded_relevance) const {
    require_dims(encoded_relevance.cols() == output_width_,
                 "relevance width " + std::to_string(encoded_relevance.cols()) + " != pipeline output width " +
                     std::to_string(output_width_));
    Matrix out = Matrix::Zero(encoded_relevance.rows(), input_width());
    for (std::size_t j = 0; j < column_map_.size(); ++j)
      for (Index c : column_map_[j]) out.col(static_cast<Index>(j)) += encoded_relevance.col(c);
    return out;
  }

  std::vector<std::string> encoded_names() const {
    std::vector<std::string> names;
    for (const auto& t : transforms_) {
      if (!t.categorical || t.width() == 1) {
        names.push_back(t.name);
        continue;
      }
      for (Index c = 0; c < t.width(); ++c) names.push_back(t.name + "_" + std::to_string(c));
    }
    return names;
  }

  nlohmann::json to_json() const {
    nlohmann::json feats = nlohmann::json::array();
    for (std::size_t j = 0; j < transforms_.size(); ++j) {
      const auto& t = transforms_[j];
      nlohmann::json f{{"name", t.name}, {"columns", column_map_[j]}};
      if (t.categorical) {
        f["type"] = "categorical";
        f["encoder"] = to_string(t.encoder);
        f["levels"] = t.levels;
      } else {
        f["type"] = "continuous";
        f["scaler"] = to_string(t.scaler);
        f["center"] = t.center;
        f["scale"] = t.scale;
      }
      feats.push_back(std::move(f));
    }
    return {{"format", "attrib-pipeline"}, {"version", 1}, {"output_width", output_width_}, {"features", feats}};
  }

  static Pipeline from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "attrib-pipeline") throw FormatError("not a pipeline document");
    Pipeline pl;
    for (const auto& f : j.at("features")) {
      FeatureTransform t;
      t.name = f.at("name").get<std::string>();
      t.categorical = f.at("type").get<std::string>() == "categorical";
      if (t.categorical) {
        t.encoder = encoder_from_string(f.at("encoder").get<std::string>());
        t.levels = f.at("levels").get<int>();
      } else {
        t.scaler = scaler_from_string(f.at("scaler").get<std::string>());
        t.center = f.at("center").get<double>();
        t.scale = f.at("scale").get<double>();
      }
      pl.transforms_.push_back(std::move(t));
    }
    pl.rebuild_column_map();
    return pl;
  }

 private:
  static int check_level(const FeatureTransform& t, double x) {
    const auto k = static_cast<long>(std::lround(x));
    if (static_cast<double>(k) != x || k < 1 || k > t.levels)
      throw DataError(t.name + ": unseen or invalid level " + std::to_string(x));
    return static_cast<int>(k);
  }

  void rebuild_column_map() {
    column_map_.clear();
    Index next = 0;
    for (const auto& t : transforms_) {
      std::vector<Index> cols;
      for (Index c = 0; c < t.width(); ++c) cols.push_back(next++);
      column_map_.push_back(std::move(cols));
    }
    output_width_ = next;
  }

  std::vector<FeatureTransform> transforms_;
  std::vector<std::vector<Index>> column_map_;
  Index output_width_ = 0;
};

// Same scaler for every continuous feature and the same encoder for every
// categorical one.
inline std::vector<FeatureChoice> uniform_choices(const std::vector<dgp::FeatureSpec>& schema, ScalerKind scaler,
                                                  EncoderKind encoder) {
  return std::vector<FeatureChoice>(schema.size(), FeatureChoice{scaler, encoder});
}

}  // namespace attrib::preprocess
