#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace embisim {

// Little-endian fixed-width field access. Every on-disk format in the
// project goes through these.

template <class T>
inline void store_le(std::byte* out, T v) {
  static_assert(std::is_unsigned_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
    }
  } else {
    std::memcpy(out, &v, sizeof(T));
  }
}

template <class T>
inline T load_le(const std::byte* in) {
  static_assert(std::is_unsigned_v<T>);
  T v{};
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(std::to_integer<unsigned>(in[i])) << (8 * i);
    }
  } else {
    std::memcpy(&v, in, sizeof(T));
  }
  return v;
}

template <class T>
inline void append_le(std::string& out, T v) {
  std::byte tmp[sizeof(T)];
  store_le(tmp, v);
  out.append(reinterpret_cast<const char*>(tmp), sizeof(T));
}

inline std::span<const std::byte> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

/// 64-bit hash over a byte string: FNV-1a over 8-byte words with a
/// murmur3 finalizer. Fixed definition, so values are stable across
/// platforms and runs.
inline std::uint64_t hash_bytes(std::span<const std::byte> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (bytes.size() * 0x9e3779b97f4a7c15ULL);
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    h ^= load_le<std::uint64_t>(bytes.data() + i);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  std::uint64_t tail = 0;
  for (std::size_t s = 0; i < bytes.size(); ++i, s += 8) {
    tail |= static_cast<std::uint64_t>(std::to_integer<unsigned>(bytes[i])) << s;
  }
  h ^= tail;
  h *= 0x100000001b3ULL;
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

inline std::uint64_t hash_bytes(std::string_view s) { return hash_bytes(as_bytes(s)); }

}  // namespace embisim
