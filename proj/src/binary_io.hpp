#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace vasum::detail {

inline std::uint32_t byteswap32(std::uint32_t x) {
  return (x >> 24) | ((x >> 8) & 0xff00u) | ((x << 8) & 0xff0000u) | (x << 24);
}

// Little-endian float32 <-> host float.
inline float load_f32_le(const unsigned char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

inline void store_f32_le(float f, unsigned char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
  std::memcpy(p, &bits, 4);
}

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<float> decode_f32(std::span<const unsigned char> bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = load_f32_le(bytes.data() + 4 * i);
  return out;
}

inline void append_f32(std::vector<unsigned char>& out, float f) {
  unsigned char buf[4];
  store_f32_le(f, buf);
  out.insert(out.end(), buf, buf + 4);
}

inline bool write_file(const std::filesystem::path& path,
                       std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  return static_cast<bool>(out);
}

}  // namespace vasum::detail
