#pragma once

#include "attrib/nn/network.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

// Binary model format (little-endian):
//   "ATNN" | u32 version | u32 layer count
//   per layer: u32 in_dim | u32 out_dim | u8 activation |
//              f64 weights (row-major, out x in) | f64 bias (out)
//   f64 dropout_rate
namespace attrib::nn {

inline constexpr std::array<char, 4> kModelMagic = {'A', 'T', 'N', 'N'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw FormatError("model file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

inline void write_model(std::ostream& os, const DenseNetwork& net) {
  net.validate();
  os.write(kModelMagic.data(), kModelMagic.size());
  detail::put_le<std::uint32_t>(os, kModelVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(net.depth()));
  for (const auto& l : net.layers()) {
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.in_dim()));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.out_dim()));
    detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(l.activation));
    for (Index r = 0; r < l.out_dim(); ++r)
      for (Index c = 0; c < l.in_dim(); ++c) detail::put_le<double>(os, l.weights(r, c));
    for (Index r = 0; r < l.out_dim(); ++r) detail::put_le<double>(os, l.bias(r));
  }
  detail::put_le<double>(os, net.dropout_rate());
}

inline DenseNetwork read_model(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size())) throw FormatError("model file truncated");
  if (magic != kModelMagic) throw FormatError("bad magic bytes, not a model file");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kModelVersion)
    throw FormatError("unsupported model format version " + std::to_string(version));
  const auto count = detail::get_le<std::uint32_t>(is);
  if (count == 0 || count > 4096) throw FormatError("implausible layer count");
  std::vector<DenseLayer> layers;
  layers.reserve(count);
  std::uint32_t prev_out = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto in = detail::get_le<std::uint32_t>(is);
    const auto out = detail::get_le<std::uint32_t>(is);
    const auto act = detail::get_le<std::uint8_t>(is);
    if (in == 0 || out == 0) throw FormatError("zero layer dimension");
    if (i > 0 && in != prev_out) throw FormatError("declared layer dimensions do not chain");
    if (act > 1) throw FormatError("unknown activation code");
    DenseLayer l;
    l.weights.resize(out, in);
    l.bias.resize(out);
    l.activation = static_cast<Activation>(act);
    for (Index r = 0; r < l.weights.rows(); ++r)
      for (Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = detail::get_le<double>(is);
    for (Index r = 0; r < l.bias.size(); ++r) l.bias(r) = detail::get_le<double>(is);
    prev_out = out;
    layers.push_back(std::move(l));
  }
  const double dropout = detail::get_le<double>(is);
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after model");
  try {
    return DenseNetwork(std::move(layers), dropout);
  } catch (const Error& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
}

inline void save_model(const DenseNetwork& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  write_model(os, net);
  if (!os) throw FormatError("write failed: " + path);
}

inline DenseNetwork load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  return read_model(is);
}

}  // namespace attrib::nn
