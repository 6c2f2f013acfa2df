#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tetra {

using Bytes = std::vector<std::byte>;
using ByteView = std::span<const std::byte>;

// Logical clock. Advanced explicitly by callers, never read from the wall.
using Tick = std::uint64_t;
inline constexpr Tick kNever = std::numeric_limits<Tick>::max();

using NodeId = std::uint64_t;
using ObjectId = std::uint64_t;

enum class ErrorCode {
  kStoreClosed,
  kObjectTooLarge,
  kNotFound,
  kCorruptEntry,
  kFormatMismatch,
  kNoWritesYet,
  kIllegalEscalation,
  kParentRevoked,
  kParentExpired,
  kUnknownCapability,
  kWriterActive,
  kReadersActive,
  kStaleLease,
  kDoubleRelease,
  kUnknownObject,
  kUnknownNode,
  kSchemaViolation,
  kCapabilityRejected,
  kDegreeBoundExceeded,
  kTypeMismatch,
  kNonMonotoneTick,
  kMissingContent,
  kIllegalFromState,
  kInvalidConfig,
  kInvalidParams,
  kEngineUnavailable,
  kEmptyLog,
  kParseError,
  kUnknownKey,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  Error(ErrorCode code, const std::string& message, std::uint64_t detail)
      : Error(code, message) {
    detail_ = detail;
  }

  ErrorCode code() const noexcept { return code_; }
  // Numeric payload carried by some errors (size limit, reader count, line number).
  std::uint64_t detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::uint64_t detail_ = 0;
};

inline Bytes to_bytes(std::string_view s) {
  Bytes out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<std::byte>(s[i]);
  return out;
}

inline std::string to_string(ByteView bytes) {
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

// Little-endian fixed-width encoding used by every on-disk and hashed format.
inline void put_u8(Bytes& out, std::uint8_t v) { out.push_back(static_cast<std::byte>(v)); }

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

inline void put_bytes(Bytes& out, ByteView bytes) { out.insert(out.end(), bytes.begin(), bytes.end()); }

inline void put_string(Bytes& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  put_bytes(out, ByteView(reinterpret_cast<const std::byte*>(s.data()), s.size()));
}

// Bounds-checked cursor over an encoded buffer. Throws kFormatMismatch on short input.
class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == data_.size(); }

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
    return v;
  }

  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
    return v;
  }

  ByteView take(std::size_t n) {
    if (n > remaining()) throw Error(ErrorCode::kFormatMismatch, "truncated input");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string string() {
    const auto n = u32();
    return to_string(take(n));
  }

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace tetra
