#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tetra/cas/content_hash.hpp"

namespace tetra::cas {

// Pack layout, little-endian throughout:
//   header: "ENSH" | u32 version | u8 algorithm-id
//   entry:  32-byte digest | u64 payload length | payload bytes
inline constexpr std::array<char, 4> kPackMagic = {'E', 'N', 'S', 'H'};
inline constexpr std::uint32_t kPackFormatVersion = 1;
inline constexpr std::size_t kPackHeaderSize = 4 + 4 + 1;
inline constexpr std::size_t kEntryHeaderSize = 32 + 8;

struct PackEntry {
  ContentHash hash;
  std::uint64_t length = 0;
  // Byte offset of the payload within the serialized pack.
  std::uint64_t offset = 0;
};

// An immutable-content pack: entries are unique by digest and kept in first-seen order.
class Pack {
 public:
  explicit Pack(std::uint8_t algorithm = kSha256AlgorithmId, std::uint32_t version = kPackFormatVersion);

  std::uint8_t algorithm() const { return algorithm_; }
  std::uint32_t version() const { return version_; }
  const std::vector<PackEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  bool contains(const ContentHash& hash) const { return index_.contains(hash); }

  // Adds content unless its digest is already present. Returns the digest.
  ContentHash add(ByteView content);
  ByteView payload(const PackEntry& entry) const;
  ByteView payload(const ContentHash& hash) const;

  std::size_t serialized_size() const { return kPackHeaderSize + body_.size(); }
  Bytes serialize() const;
  // Digest of the serialized form; the equality used by the monoid laws.
  ContentHash digest() const;

  // Parses a serialized pack. With verify set, every payload is rehashed and a
  // mismatch raises kCorruptEntry.
  static Pack parse(ByteView bytes, bool verify = true);

 private:
  void append_verified(const ContentHash& hash, ByteView content);

  std::uint8_t algorithm_;
  std::uint32_t version_;
  std::vector<PackEntry> entries_;
  std::unordered_map<ContentHash, std::size_t> index_;
  // Serialized entries (without the pack header).
  Bytes body_;

  friend Pack pack_concat(const Pack& first, const Pack& second);
};

// Deduplicated union preserving first-seen order. Associative, with the empty
// pack as identity. Throws kFormatMismatch on algorithm or version mismatch.
Pack pack_concat(const Pack& first, const Pack& second);

}  // namespace tetra::cas
