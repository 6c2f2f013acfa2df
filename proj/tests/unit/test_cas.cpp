#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <unistd.h>

#include "tetra/cas/pack_store.hpp"

using namespace tetra;
using namespace tetra::cas;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  Bytes b(rng() % (max_len + 1));
  for (auto& x : b) x = static_cast<std::byte>(rng());
  return b;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tetra-cas-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

std::uint64_t dir_bytes(const std::filesystem::path& dir) {
  std::uint64_t total = 0;
  for (const auto& f : std::filesystem::directory_iterator(dir)) total += f.file_size();
  return total;
}

}  // namespace

TEST(ContentHash, KnownSha256Vectors) {
  EXPECT_EQ(sha256({}).hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256(to_bytes("abc")).hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto h = sha256(to_bytes("abc"));
  EXPECT_EQ(ContentHash::from_hex(h.hex()), h);
}

TEST(PackStore, DuplicatePutWritesNothing) {
  PackStore store;
  const auto x = to_bytes("hello pack");
  const auto h1 = store.put(x);
  const auto after_first = store.stats();
  const auto segment = store.segment_bytes(0);
  const auto h2 = store.put(x);
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(store.stats().physical_bytes, after_first.physical_bytes);
  EXPECT_EQ(store.segment_bytes(0), segment);
  EXPECT_EQ(store.stats().logical_bytes, 2 * x.size());
}

TEST(PackStore, EmptyContentHasFixedDigest) {
  PackStore a, b;
  EXPECT_EQ(a.put({}), b.put({}));
  EXPECT_EQ(a.put({}).hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_TRUE(a.get(sha256({})).empty());
}

TEST(PackStore, DedupHeavyWorkloadMatchesByteCounter) {
  std::mt19937_64 rng(7);
  std::vector<Bytes> payloads;
  for (int i = 0; i < 100; ++i) payloads.push_back(random_bytes(rng, 512));
  std::sort(payloads.begin(), payloads.end());
  payloads.erase(std::unique(payloads.begin(), payloads.end()), payloads.end());

  const auto dir = temp_dir("dedup");
  StoreOptions opts;
  opts.directory = dir;
  PackStore store(opts);
  StoreOptions naive_opts;
  naive_opts.deduplicate = false;
  PackStore naive(naive_opts);
  for (int round = 0; round < 5; ++round) {
    for (const auto& p : payloads) {
      store.put(p);
      naive.put(p);
    }
  }
  // Independent byte counter: one 9-byte header, then 40 + len per unique payload.
  std::uint64_t expected = 4 + 4 + 1, logical = 0;
  for (const auto& p : payloads) {
    expected += 32 + 8 + p.size();
    logical += 5 * p.size();
  }
  EXPECT_EQ(store.stats().physical_bytes, expected);
  EXPECT_EQ(store.stats().logical_bytes, logical);
  EXPECT_EQ(dir_bytes(dir), expected);
  const double ratio = write_amplification(store.stats()) / write_amplification(naive.stats());
  EXPECT_NEAR(ratio, 0.2, 0.01);
  std::filesystem::remove_all(dir);
}

TEST(PackStore, RoundTripAndMissing) {
  PackStore store;
  const auto x = to_bytes("round trip");
  EXPECT_EQ(store.get(store.put(x)), x);
  try {
    store.get(sha256(to_bytes("never put")));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(PackStore, InterleavingsGiveSameState) {
  const auto a = to_bytes("alpha"), b = to_bytes("beta");
  const auto ha = sha256(a);
  // Orders of {put a, put b, get(a)} where the get follows its put.
  const std::vector<std::vector<int>> orders = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}};
  std::set<std::pair<ContentHash, Bytes>> reference;
  Bytes reference_get;
  for (const auto& order : orders) {
    PackStore store;
    Bytes got;
    for (int op : order) {
      if (op == 0) store.put(a);
      if (op == 1) store.put(b);
      if (op == 2) got = store.get(ha);
    }
    std::set<std::pair<ContentHash, Bytes>> state;
    for (const auto& c : {a, b}) state.emplace(sha256(c), store.get(sha256(c)));
    EXPECT_EQ(store.object_count(), 2u);
    if (reference.empty()) {
      reference = state;
      reference_get = got;
    }
    EXPECT_EQ(state, reference);
    EXPECT_EQ(got, reference_get);
  }
}

TEST(PackStore, PhysicalBytesEqualFileGrowth) {
  const auto dir = temp_dir("growth");
  StoreOptions opts;
  opts.directory = dir;
  opts.segment_bytes = 256;
  std::mt19937_64 rng(3);
  std::set<Bytes> distinct;
  while (distinct.size() < 50) distinct.insert(random_bytes(rng, 100));
  {
    PackStore store(opts);
    for (const auto& b : distinct) store.put(b);
    EXPECT_GT(store.segment_count(), 1u);
    EXPECT_EQ(dir_bytes(dir), store.stats().physical_bytes);
  }
  PackStore reopened(opts);
  EXPECT_EQ(reopened.object_count(), 50u);
  std::filesystem::remove_all(dir);
}

TEST(PackStore, TamperedSegmentIsRejected) {
  const auto dir = temp_dir("tamper");
  StoreOptions opts;
  opts.directory = dir;
  { PackStore(opts).put(to_bytes("integrity matters")); }
  const auto path = dir / "segment-000000.pack";
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(static_cast<std::streamoff>(kPackHeaderSize + kEntryHeaderSize));
  f.put('X');
  f.close();
  try {
    PackStore reopened(opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptEntry);
  }
  std::filesystem::remove_all(dir);
}

TEST(PackStore, LimitsAndClose) {
  StoreOptions opts;
  opts.max_object_size = 4;
  PackStore store(opts);
  try {
    store.put(to_bytes("too long"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kObjectTooLarge);
    EXPECT_EQ(e.detail(), 4u);
  }
  store.close();
  try {
    store.put(to_bytes("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStoreClosed);
  }
}

TEST(WriteAmplification, Ratios) {
  EXPECT_DOUBLE_EQ(write_amplification({1000, 1000}), 1.0);
  EXPECT_THROW(write_amplification({0, 10}), Error);
  // 10 unique 1000-byte payloads, each put 10 times: 90% duplicates.
  PackStore store;
  for (int round = 0; round < 10; ++round) {
    for (int i = 0; i < 10; ++i) store.put(Bytes(1000, static_cast<std::byte>(i)));
  }
  const double expected = (9.0 + 10 * (40.0 + 1000.0)) / (100.0 * 1000.0);
  EXPECT_DOUBLE_EQ(write_amplification(store.stats()), expected);
  EXPECT_LT(write_amplification(store.stats()), 0.2);
  EXPECT_EQ(stats_csv(store.stats()), "logical_bytes,physical_bytes,wa\n100000,10409,0.104090\n");
}

TEST(Pack, HeaderIsBitExact) {
  const auto bytes = Pack().serialize();
  const Bytes expected = {std::byte{'E'}, std::byte{'N'}, std::byte{'S'}, std::byte{'H'}, std::byte{1},
                          std::byte{0},   std::byte{0},   std::byte{0},   std::byte{1}};
  EXPECT_EQ(bytes, expected);
  Pack p;
  p.add(to_bytes("ab"));
  const auto one = p.serialize();
  ASSERT_EQ(one.size(), 9u + 32 + 8 + 2);
  EXPECT_EQ(one[9 + 32], std::byte{2});  // little-endian length
  EXPECT_EQ(Pack::parse(one).digest(), p.digest());
}

TEST(Pack, MonoidLaws) {
  std::mt19937_64 rng(11);
  auto random_pack = [&] {
    Pack p;
    const auto n = rng() % 4;
    for (std::uint64_t i = 0; i < n; ++i) p.add(Bytes(1, static_cast<std::byte>(rng() % 6)));
    return p;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_pack(), b = random_pack(), c = random_pack();
    EXPECT_EQ(pack_concat(pack_concat(a, b), c).digest(), pack_concat(a, pack_concat(b, c)).digest());
    EXPECT_EQ(pack_concat(a, Pack()).digest(), a.digest());
    EXPECT_EQ(pack_concat(Pack(), a).digest(), a.digest());
  }
}

TEST(Pack, SharedEntryKeptOnce) {
  Pack a, b;
  a.add(to_bytes("shared"));
  a.add(to_bytes("left"));
  b.add(to_bytes("shared"));
  b.add(to_bytes("right"));
  const auto joined = pack_concat(a, b);
  ASSERT_EQ(joined.entries().size(), 3u);
  EXPECT_EQ(joined.entries()[0].hash, sha256(to_bytes("shared")));
  EXPECT_EQ(joined.entries()[2].hash, sha256(to_bytes("right")));
  try {
    pack_concat(a, Pack(kSha256AlgorithmId, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatMismatch);
  }
}

TEST(Pack, OffsetsIncreaseAndVerify) {
  Pack p;
  for (int i = 0; i < 5; ++i) p.add(to_bytes("payload-" + std::to_string(i)));
  std::uint64_t last_end = 0;
  for (const auto& e : p.entries()) {
    EXPECT_GE(e.offset, last_end);
    last_end = e.offset + e.length;
    EXPECT_EQ(sha256(p.payload(e)), e.hash);
  }
}
