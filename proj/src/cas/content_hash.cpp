#include "tetra/cas/content_hash.hpp"

#include <openssl/evp.h>

namespace tetra::cas {

std::string ContentHash::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : digest) {
    const auto v = static_cast<std::uint8_t>(b);
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 0xf]);
  }
  return out;
}

ContentHash ContentHash::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw Error(ErrorCode::kParseError, "content hash must be 64 hex chars");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorCode::kParseError, std::string("bad hex digit '") + c + "'");
  };
  ContentHash h;
  for (std::size_t i = 0; i < 32; ++i) {
    h.digest[i] = static_cast<std::byte>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return h;
}

bool ContentHash::is_zero() const {
  for (auto b : digest) {
    if (b != std::byte{0}) return false;
  }
  return true;
}

Hasher::Hasher() : ctx_(EVP_MD_CTX_new()) {
  EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr);
}

Hasher::~Hasher() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

Hasher& Hasher::update(ByteView data) {
  EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size());
  return *this;
}

ContentHash Hasher::finish() {
  ContentHash h;
  unsigned int len = 0;
  EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), reinterpret_cast<unsigned char*>(h.digest.data()), &len);
  return h;
}

ContentHash sha256(ByteView data) { return Hasher().update(data).finish(); }

}  // namespace tetra::cas
