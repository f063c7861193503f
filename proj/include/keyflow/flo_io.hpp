#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/flow.hpp"

// Middlebury .flo: float32 magic 202021.25, int32 width, int32 height, then
// row-major interleaved float32 (dx, dy). Everything little-endian.

namespace keyflow {

inline constexpr float kFloMagic = 202021.25f;

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "flo_io assumes a little-endian host");

template <typename T>
void put_le(std::vector<char>& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

}  // namespace detail

inline std::vector<char> encode_flo(const FlowField& f) {
  std::vector<char> buf;
  buf.reserve(12 + f.vectors().size() * 8);
  detail::put_le(buf, kFloMagic);
  detail::put_le(buf, static_cast<std::int32_t>(f.width()));
  detail::put_le(buf, static_cast<std::int32_t>(f.height()));
  for (const FlowVector& v : f.vectors()) {
    detail::put_le(buf, v.dx);
    detail::put_le(buf, v.dy);
  }
  return buf;
}

inline FlowField decode_flo(const std::vector<char>& buf) {
  if (buf.size() < 12) throw FormatError("flo: truncated header");
  if (detail::get_le<float>(buf.data()) != kFloMagic) throw FormatError("flo: bad magic number");
  const auto width = detail::get_le<std::int32_t>(buf.data() + 4);
  const auto height = detail::get_le<std::int32_t>(buf.data() + 8);
  if (width < 0 || height < 0) throw FormatError("flo: negative dimensions");
  const std::uint64_t count = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  if (buf.size() - 12 != count * 8) throw FormatError("flo: payload size does not match header");
  std::vector<FlowVector> vectors(count);
  const char* p = buf.data() + 12;
  for (auto& v : vectors) {
    v.dx = detail::get_le<float>(p);
    v.dy = detail::get_le<float>(p + 4);
    if (!std::isfinite(v.dx) || !std::isfinite(v.dy)) throw FormatError("flo: non-finite component");
    p += 8;
  }
  return {width, height, std::move(vectors)};
}

inline FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("flo: cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_flo(buf);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path.string() + ")");
  }
}

inline void write_flo(const FlowField& f, const std::filesystem::path& path) {
  const std::vector<char> buf = encode_flo(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("flo: cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("flo: write failed for " + path.string());
}

}  // namespace keyflow
