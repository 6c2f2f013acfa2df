#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "tetra/common.hpp"

namespace tetra::cas {

inline constexpr std::uint8_t kSha256AlgorithmId = 1;

// 256-bit content digest tagged with the algorithm that produced it.
struct ContentHash {
  std::array<std::byte, 32> digest{};
  std::uint8_t algorithm = kSha256AlgorithmId;

  auto operator<=>(const ContentHash&) const = default;

  std::string hex() const;
  // Parses 64 hex characters; algorithm defaults to SHA-256.
  static ContentHash from_hex(std::string_view hex);
  bool is_zero() const;
};

// SHA-256 via OpenSSL.
ContentHash sha256(ByteView data);

// Incremental digest for callers that hash a sequence of fields.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  Hasher& update(ByteView data);
  ContentHash finish();

 private:
  void* ctx_;
};

}  // namespace tetra::cas

template <>
struct std::hash<tetra::cas::ContentHash> {
  std::size_t operator()(const tetra::cas::ContentHash& h) const noexcept {
    std::size_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | static_cast<std::uint8_t>(h.digest[i]);
    return v;
  }
};
