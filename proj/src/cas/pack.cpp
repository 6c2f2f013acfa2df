#include "tetra/cas/pack.hpp"

#include <cstring>

namespace tetra::cas {

Pack::Pack(std::uint8_t algorithm, std::uint32_t version) : algorithm_(algorithm), version_(version) {}

void Pack::append_verified(const ContentHash& hash, ByteView content) {
  PackEntry entry;
  entry.hash = hash;
  entry.length = content.size();
  entry.offset = kPackHeaderSize + body_.size() + kEntryHeaderSize;
  put_bytes(body_, hash.digest);
  put_u64(body_, content.size());
  put_bytes(body_, content);
  index_.emplace(hash, entries_.size());
  entries_.push_back(entry);
}

ContentHash Pack::add(ByteView content) {
  if (algorithm_ != kSha256AlgorithmId) {
    throw Error(ErrorCode::kFormatMismatch, "unsupported algorithm id " + std::to_string(algorithm_));
  }
  auto hash = sha256(content);
  if (!contains(hash)) append_verified(hash, content);
  return hash;
}

ByteView Pack::payload(const PackEntry& entry) const {
  return ByteView(body_).subspan(entry.offset - kPackHeaderSize, entry.length);
}

ByteView Pack::payload(const ContentHash& hash) const {
  auto it = index_.find(hash);
  if (it == index_.end()) throw Error(ErrorCode::kNotFound, hash.hex());
  return payload(entries_[it->second]);
}

Bytes Pack::serialize() const {
  Bytes out;
  out.reserve(serialized_size());
  for (char c : kPackMagic) put_u8(out, static_cast<std::uint8_t>(c));
  put_u32(out, version_);
  put_u8(out, algorithm_);
  put_bytes(out, body_);
  return out;
}

ContentHash Pack::digest() const { return sha256(serialize()); }

Pack Pack::parse(ByteView bytes, bool verify) {
  Reader in(bytes);
  auto magic = in.take(4);
  if (std::memcmp(magic.data(), kPackMagic.data(), 4) != 0) {
    throw Error(ErrorCode::kFormatMismatch, "bad pack magic");
  }
  const auto version = in.u32();
  const auto algorithm = in.u8();
  if (version != kPackFormatVersion) {
    throw Error(ErrorCode::kFormatMismatch, "unsupported pack version " + std::to_string(version));
  }
  Pack pack(algorithm, version);
  while (!in.done()) {
    ContentHash hash;
    hash.algorithm = algorithm;
    auto digest = in.take(32);
    std::memcpy(hash.digest.data(), digest.data(), 32);
    const auto length = in.u64();
    auto content = in.take(length);
    if (verify) {
      auto actual = sha256(content);
      actual.algorithm = algorithm;
      if (actual != hash) throw Error(ErrorCode::kCorruptEntry, hash.hex());
    }
    // Duplicates within one serialized pack are tolerated on read; the first copy wins.
    if (!pack.contains(hash)) {
      pack.append_verified(hash, content);
    } else {
      // Keep the byte layout faithful so offsets stay meaningful.
      PackEntry entry{hash, length, kPackHeaderSize + pack.body_.size() + kEntryHeaderSize};
      put_bytes(pack.body_, hash.digest);
      put_u64(pack.body_, length);
      put_bytes(pack.body_, content);
      pack.entries_.push_back(entry);
    }
  }
  return pack;
}

Pack pack_concat(const Pack& first, const Pack& second) {
  if (first.algorithm() != second.algorithm() || first.version() != second.version()) {
    throw Error(ErrorCode::kFormatMismatch, "packs differ in algorithm or format version");
  }
  Pack out(first.algorithm(), first.version());
  for (const auto* pack : {&first, &second}) {
    for (const auto& entry : pack->entries()) {
      if (!out.contains(entry.hash)) out.append_verified(entry.hash, pack->payload(entry));
    }
  }
  return out;
}

}  // namespace tetra::cas
