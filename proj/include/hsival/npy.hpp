#pragma once

// NPY (format versions 1.0 and 2.0) reading and writing for spectral cubes and
// label maps. Cubes are 3-D little-endian f4/f8 arrays in C order
// (row, col, band); label maps are 2-D u1/u2/i4 arrays.
// Written files use version 1.0 with the header padded to 64 bytes.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hsival/core.hpp"

namespace hsival {

namespace npy {

inline constexpr std::string_view magic = "\x93NUMPY";

enum class DType { f4, f8, u1, u2, i4 };

inline std::size_t item_size(DType t) {
  switch (t) {
  case DType::f4: return 4;
  case DType::f8: return 8;
  case DType::u1: return 1;
  case DType::u2: return 2;
  default: return 4;
  }
}

inline const char* descr(DType t) {
  switch (t) {
  case DType::f4: return "<f4";
  case DType::f8: return "<f8";
  case DType::u1: return "|u1";
  case DType::u2: return "<u2";
  default: return "<i4";
  }
}

struct Header {
  std::uint8_t major = 1, minor = 0;
  DType dtype = DType::f8;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;
};

namespace detail {

/// Minimal reader for the Python dict literal in an NPY header.
class DictParser {
public:
  DictParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  Header parse(Header h) {
    bool have_descr = false, have_order = false, have_shape = false;
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      const std::string key = string_literal();
      expect(':');
      skip_ws();
      if (key == "descr") {
        const std::size_t at = pos_;
        h.dtype = parse_descr(string_literal(), at);
        have_descr = true;
      } else if (key == "fortran_order") {
        h.fortran_order = boolean();
        have_order = true;
      } else if (key == "shape") {
        h.shape = tuple();
        have_shape = true;
      } else {
        fail("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') fail("expected ',' or '}' in header");
    }
    if (!have_descr || !have_order || !have_shape) fail("header is missing descr, fortran_order or shape");
    return h;
  }

private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("NPY header: " + what, base_ + pos_); }

  char peek() const {
    if (pos_ >= text_.size()) fail("unexpected end of header");
    return text_[pos_];
  }
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n')) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string string_literal() {
    skip_ws();
    const char q = peek();
    if (q != '\'' && q != '"') fail("expected a quoted string");
    const std::size_t end = text_.find(q, pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return s;
  }
  bool boolean() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }
  std::vector<std::size_t> tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (peek() < '0' || peek() > '9') fail("expected a dimension");
      std::size_t v = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') v = v * 10 + std::size_t(text_[pos_++] - '0');
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }
  DType parse_descr(const std::string& d, std::size_t at) const {
    if (d == "<f4") return DType::f4;
    if (d == "<f8") return DType::f8;
    if (d == "|u1" || d == "<u1" || d == "u1") return DType::u1;
    if (d == "<u2") return DType::u2;
    if (d == "<i4") return DType::i4;
    throw ParseError("unsupported NPY dtype '" + d + "'", base_ + at);
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

template <typename T>
T load_le(const std::uint8_t* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                                                 std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= U(U(p[i]) << (8 * i));
  return std::bit_cast<T>(u);
}

template <typename T>
void store_le(std::string& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                                                 std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  const U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(char((u >> (8 * i)) & 0xffu));
}

} // namespace detail

inline Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), magic.data(), magic.size()) != 0)
    throw ParseError("not an NPY file", 0);
  Header h;
  h.major = bytes[6];
  h.minor = bytes[7];
  std::size_t header_len = 0, prefix = 0;
  if (h.major == 1) {
    header_len = detail::load_le<std::uint16_t>(bytes.data() + 8);
    prefix = 10;
  } else if (h.major == 2) {
    if (bytes.size() < 12) throw ParseError("truncated NPY preamble", bytes.size());
    header_len = detail::load_le<std::uint32_t>(bytes.data() + 8);
    prefix = 12;
  } else {
    throw ParseError("unsupported NPY version " + std::to_string(h.major) + "." + std::to_string(h.minor), 6);
  }
  if (bytes.size() < prefix + header_len) throw ParseError("truncated NPY header", bytes.size());
  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + prefix), header_len);
  h = detail::DictParser(text, prefix).parse(h);
  h.data_offset = prefix + header_len;
  if (h.fortran_order) throw ParseError("fortran_order arrays are not supported", prefix);
  return h;
}

using Array = std::variant<SpectralCube, LabelMap>;

/// Routes by rank and dtype: 3-D float -> SpectralCube, 2-D integer -> LabelMap.
inline Array parse(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes);
  const bool is_float = h.dtype == DType::f4 || h.dtype == DType::f8;
  if (is_float && h.shape.size() != 3)
    throw ParseError("float arrays must be 3-D cubes, got rank " + std::to_string(h.shape.size()), 10);
  if (!is_float && h.shape.size() != 2)
    throw ParseError("integer arrays must be 2-D label maps, got rank " + std::to_string(h.shape.size()), 10);
  std::size_t count = 1;
  for (auto d : h.shape) {
    if (d == 0 || d > std::size_t(INT32_MAX)) throw ParseError("array dimension out of range", 10);
    count *= d;
  }
  const std::size_t need = count * item_size(h.dtype);
  if (bytes.size() - h.data_offset < need)
    throw ParseError("truncated NPY data: need " + std::to_string(need) + " bytes", bytes.size());
  if (bytes.size() - h.data_offset > need) throw ParseError("trailing bytes after NPY data", h.data_offset + need);
  const std::uint8_t* p = bytes.data() + h.data_offset;

  if (is_float) {
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = h.dtype == DType::f4 ? double(detail::load_le<float>(p + 4 * i)) : detail::load_le<double>(p + 8 * i);
      if (!std::isfinite(values[i])) throw ParseError("non-finite cube value", h.data_offset + i * item_size(h.dtype));
    }
    return SpectralCube(std::int32_t(h.shape[0]), std::int32_t(h.shape[1]), std::int32_t(h.shape[2]), std::move(values));
  }
  std::vector<ClassId> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    switch (h.dtype) {
    case DType::u1: labels[i] = p[i]; break;
    case DType::u2: labels[i] = detail::load_le<std::uint16_t>(p + 2 * i); break;
    default:
      labels[i] = detail::load_le<std::int32_t>(p + 4 * i);
      if (labels[i] < 0) throw ParseError("negative class label", h.data_offset + 4 * i);
    }
  }
  return LabelMap(std::int32_t(h.shape[0]), std::int32_t(h.shape[1]), std::move(labels));
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& bytes) {
  if (path.empty()) throw Error("output path is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

inline std::string encode_header(DType dtype, const std::vector<std::size_t>& shape) {
  std::string dict = std::string("{'descr': '") + descr(dtype) + "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) dict += (i ? ", " : "") + std::to_string(shape[i]);
  dict += shape.size() == 1 ? ",), }" : "), }";
  std::size_t total = 10 + dict.size() + 1;
  const std::size_t padded = (total + 63) / 64 * 64;
  dict.append(padded - total, ' ');
  dict.push_back('\n');
  std::string out(magic);
  out.push_back(char(1));
  out.push_back(char(0));
  detail::store_le<std::uint16_t>(out, std::uint16_t(dict.size()));
  return out + dict;
}

inline std::string encode(const SpectralCube& cube, DType dtype = DType::f8) {
  if (dtype != DType::f4 && dtype != DType::f8) throw ValidationError("cubes are written as f4 or f8");
  std::string out = encode_header(dtype, {std::size_t(cube.height()), std::size_t(cube.width()), std::size_t(cube.bands())});
  for (double v : cube.values()) {
    if (dtype == DType::f4)
      detail::store_le<float>(out, float(v));
    else
      detail::store_le<double>(out, v);
  }
  return out;
}

/// Picks the narrowest of u1/u2/i4 that holds every label.
inline std::string encode(const LabelMap& labels) {
  const ClassId k = labels.class_count();
  const DType dtype = k <= 0xff ? DType::u1 : (k <= 0xffff ? DType::u2 : DType::i4);
  std::string out = encode_header(dtype, {std::size_t(labels.height()), std::size_t(labels.width())});
  for (ClassId l : labels.labels()) {
    if (dtype == DType::u1)
      out.push_back(char(std::uint8_t(l)));
    else if (dtype == DType::u2)
      detail::store_le<std::uint16_t>(out, std::uint16_t(l));
    else
      detail::store_le<std::int32_t>(out, l);
  }
  return out;
}

} // namespace npy

inline npy::Array read_npy(const std::string& path) {
  const auto bytes = npy::read_file(path);
  return npy::parse(bytes);
}

inline SpectralCube read_cube(const std::string& path) {
  auto a = read_npy(path);
  if (!std::holds_alternative<SpectralCube>(a)) throw ValidationError("'" + path + "' holds a label map, not a cube");
  return std::get<SpectralCube>(std::move(a));
}

inline LabelMap read_labels(const std::string& path) {
  auto a = read_npy(path);
  if (!std::holds_alternative<LabelMap>(a)) throw ValidationError("'" + path + "' holds a cube, not a label map");
  return std::get<LabelMap>(std::move(a));
}

inline void write_npy(const SpectralCube& cube, const std::string& path, npy::DType dtype = npy::DType::f8) {
  npy::write_file(path, npy::encode(cube, dtype));
}

inline void write_npy(const LabelMap& labels, const std::string& path) { npy::write_file(path, npy::encode(labels)); }

} // namespace hsival
