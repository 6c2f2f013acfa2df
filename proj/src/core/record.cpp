#include "tetra/core/record.hpp"

#include <algorithm>
#include <cstring>

namespace tetra::core {

namespace {

constexpr char kRecordMagic[4] = {'N', 'R', 'E', 'C'};
constexpr char kDeltaMagic[4] = {'N', 'D', 'L', 'T'};

enum class DeltaOp : std::uint8_t { kLabel = 1, kValue = 2, kAddEdge = 3, kRemoveEdge = 4 };

void put_magic(Bytes& out, const char (&magic)[4]) {
  for (char c : magic) put_u8(out, static_cast<std::uint8_t>(c));
}

bool has_magic(ByteView bytes, const char (&magic)[4]) {
  return bytes.size() >= 4 && std::memcmp(bytes.data(), magic, 4) == 0;
}

void put_value(Bytes& out, const std::optional<cas::ContentHash>& value) {
  put_u8(out, value ? 1 : 0);
  if (value) put_bytes(out, value->digest);
}

std::optional<cas::ContentHash> read_value(Reader& in) {
  const auto flag = in.u8();
  if (flag == 0) return std::nullopt;
  if (flag != 1) throw Error(ErrorCode::kFormatMismatch, "bad value flag");
  cas::ContentHash h;
  auto raw = in.take(h.digest.size());
  std::copy(raw.begin(), raw.end(), h.digest.begin());
  return h;
}

}  // namespace

NodeRecord record_of(const graph::Node& node) { return NodeRecord{node.label, node.value, node.out}; }

Bytes encode_record(const NodeRecord& record) {
  Bytes out;
  put_magic(out, kRecordMagic);
  put_string(out, record.label);
  put_value(out, record.value);
  put_u32(out, static_cast<std::uint32_t>(record.out.size()));
  for (const auto& [dst, type] : record.out) {
    put_u64(out, dst);
    put_string(out, type);
  }
  return out;
}

NodeRecord decode_record(ByteView bytes) {
  if (!has_magic(bytes, kRecordMagic)) throw Error(ErrorCode::kFormatMismatch, "not a node record");
  Reader in(bytes.subspan(4));
  NodeRecord record;
  record.label = in.string();
  record.value = read_value(in);
  const auto edges = in.u32();
  for (std::uint32_t i = 0; i < edges; ++i) {
    const auto dst = in.u64();
    record.out.emplace(dst, in.string());
  }
  if (!in.done()) throw Error(ErrorCode::kFormatMismatch, "trailing bytes in node record");
  return record;
}

Bytes encode_delta(const NodeRecord& before, const NodeRecord& after) {
  Bytes ops;
  std::uint32_t count = 0;
  if (before.label != after.label) {
    put_u8(ops, static_cast<std::uint8_t>(DeltaOp::kLabel));
    put_string(ops, after.label);
    ++count;
  }
  if (before.value != after.value) {
    put_u8(ops, static_cast<std::uint8_t>(DeltaOp::kValue));
    put_value(ops, after.value);
    ++count;
  }
  for (const auto& edge : before.out) {
    if (after.out.contains(edge)) continue;
    put_u8(ops, static_cast<std::uint8_t>(DeltaOp::kRemoveEdge));
    put_u64(ops, edge.first);
    put_string(ops, edge.second);
    ++count;
  }
  for (const auto& edge : after.out) {
    if (before.out.contains(edge)) continue;
    put_u8(ops, static_cast<std::uint8_t>(DeltaOp::kAddEdge));
    put_u64(ops, edge.first);
    put_string(ops, edge.second);
    ++count;
  }
  Bytes out;
  put_magic(out, kDeltaMagic);
  put_u32(out, count);
  put_bytes(out, ops);
  return out;
}

void apply_delta(NodeRecord& record, ByteView delta) {
  if (!has_magic(delta, kDeltaMagic)) throw Error(ErrorCode::kFormatMismatch, "not a delta chunk");
  Reader in(delta.subspan(4));
  const auto count = in.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    switch (static_cast<DeltaOp>(in.u8())) {
      case DeltaOp::kLabel:
        record.label = in.string();
        break;
      case DeltaOp::kValue:
        record.value = read_value(in);
        break;
      case DeltaOp::kAddEdge: {
        const auto dst = in.u64();
        record.out.emplace(dst, in.string());
        break;
      }
      case DeltaOp::kRemoveEdge: {
        const auto dst = in.u64();
        record.out.erase({dst, in.string()});
        break;
      }
      default:
        throw Error(ErrorCode::kFormatMismatch, "unknown delta op");
    }
  }
  if (!in.done()) throw Error(ErrorCode::kFormatMismatch, "trailing bytes in delta chunk");
}

NodeRecord assemble(std::span<const Bytes> chunks) {
  if (chunks.empty()) throw Error(ErrorCode::kFormatMismatch, "empty chunk chain");
  auto record = decode_record(chunks.front());
  for (std::size_t i = 1; i < chunks.size(); ++i) apply_delta(record, chunks[i]);
  return record;
}

}  // namespace tetra::core
