#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <numeric>
#include <random>
#include <thread>

#include "tetra/ownership/lease_table.hpp"
#include "tetra/ownership/stress.hpp"

using namespace tetra;
using namespace tetra::ownership;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

// A quiescent object: created, then its root write lease released.
LeaseTable& quiescent(LeaseTable& t, ObjectId id) {
  t.release(t.create(id));
  return t;
}

}  // namespace

TEST(Leases, SharedReadsAndExclusion) {
  LeaseTable t;
  quiescent(t, 1);
  const auto a = t.acquire_read(1);
  const auto b = t.acquire_read(1);
  EXPECT_EQ(t.state(1).readers, 2u);
  try {
    t.acquire_write(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReadersActive);
    EXPECT_EQ(e.detail(), 2u);
  }
  t.release(a);
  EXPECT_EQ(t.state(1).readers, 1u);
  t.release(b);
  const auto w = t.acquire_write(1);
  EXPECT_TRUE(t.state(1).writer);
  EXPECT_EQ(code_of([&] { t.acquire_read(1); }), ErrorCode::kWriterActive);
  EXPECT_EQ(code_of([&] { t.acquire_write(1); }), ErrorCode::kWriterActive);
  t.release(w);
  EXPECT_EQ(code_of([&] { t.release(w); }), ErrorCode::kDoubleRelease);
  EXPECT_EQ(code_of([&] { t.acquire_read(7); }), ErrorCode::kUnknownObject);
}

TEST(Leases, OneReadLeaseReportsCount) {
  LeaseTable t;
  quiescent(t, 0);
  const auto r = t.acquire_read(0);
  try {
    t.acquire_write(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReadersActive);
    EXPECT_EQ(e.detail(), 1u);
  }
  t.release(r);
  EXPECT_EQ(code_of([&] { t.release(r); }), ErrorCode::kDoubleRelease);
}

TEST(Leases, EveryReleaseOrderOfFourLeases) {
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  do {
    // Interleave acquires and releases: acquire all, release in `order`,
    // with a reacquire of the first released lease midway.
    LeaseTable t;
    quiescent(t, 3);
    int oracle = 0;
    std::vector<ReadLease> leases;
    for (int i = 0; i < 4; ++i) {
      leases.push_back(t.acquire_read(3));
      ++oracle;
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      t.release(leases[order[k]]);
      --oracle;
      if (k == 1) {
        leases[order[0]] = t.acquire_read(3);
        ++oracle;
        t.release(leases[order[0]]);
        --oracle;
      }
      EXPECT_EQ(t.state(3).readers, static_cast<std::uint32_t>(oracle));
      EXPECT_FALSE(t.state(3).writer);
    }
    EXPECT_EQ(t.state(3).readers, 0u);
    t.release(t.acquire_write(3));
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(Leases, RoundTripRestoresEntry) {
  LeaseTable t;
  cas::PackStore store;
  const auto root = t.create(5);
  t.commit(root, to_bytes("v1"), store);
  t.release(root);
  const auto before = t.state(5);
  t.release(t.acquire_read(5));
  EXPECT_EQ(t.state(5), before);
  t.release(t.acquire_write(5));
  EXPECT_EQ(t.state(5), before);
}

TEST(Leases, RacingWritersExactlyOneWins) {
  constexpr int kThreads = 8;
  for (int round = 0; round < 50; ++round) {
    LeaseTable t;
    quiescent(t, 0);
    std::atomic<int> wins{0}, losses{0};
    std::barrier start(kThreads);
    std::vector<std::thread> threads;
    for (int i = 0; i < kThreads; ++i) {
      threads.emplace_back([&] {
        start.arrive_and_wait();
        try {
          t.acquire_write(0);
          ++wins;
        } catch (const Error&) {
          ++losses;
        }
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(wins.load(), 1);
    EXPECT_EQ(losses.load(), kThreads - 1);
  }
}

TEST(Commit, HeadAndVersion) {
  LeaseTable t;
  cas::PackStore store;
  const auto w = t.create(1);
  EXPECT_EQ(t.commit(w, to_bytes("x"), store), cas::sha256(to_bytes("x")));
  EXPECT_EQ(t.state(1).head, cas::sha256(to_bytes("x")));
  t.commit(w, to_bytes("y"), store, 1);
  t.commit(w, to_bytes("z"), store, 2);
  EXPECT_EQ(t.state(1).version, 3u);
  EXPECT_EQ(t.state(1).head, cas::sha256(to_bytes("z")));
  t.release(w);
  EXPECT_EQ(code_of([&] { t.commit(w, to_bytes("late"), store); }), ErrorCode::kStaleLease);
  EXPECT_EQ(t.state(1).version, 3u);
}

TEST(Commit, ReplayReproducesHead) {
  LeaseTable t;
  cas::PackStore store;
  const auto w = t.create(2);
  std::mt19937_64 rng(11);
  for (Tick i = 0; i < 200; ++i) t.commit(w, to_bytes(std::to_string(rng() % 50)), store, i);
  const auto report = t.replay(2, store);
  EXPECT_EQ(report.versions, 200u);
  EXPECT_EQ(report.diff, 0u);
  EXPECT_EQ(report.reconstructed_head, t.state(2).head);
}

TEST(Commit, EntryOpsIndependentOfHistory) {
  LeaseTable t;
  cas::PackStore store;
  const auto w = t.create(0);
  std::vector<std::uint64_t> ops;
  std::uint64_t committed = 0;
  for (std::uint64_t target : {1ull, 1'000ull, 1'000'000ull}) {
    for (; committed < target; ++committed) t.commit(w, to_bytes(std::to_string(committed)), store, committed);
    ops.push_back(t.last_commit_entry_ops(0));
  }
  EXPECT_EQ(ops[0], ops[1]);
  EXPECT_EQ(ops[1], ops[2]);
  EXPECT_EQ(ops[0], 1u);
}

TEST(Commit, IndependentUpdatesCommuteAcrossArrivalOrders) {
  std::vector<int> order{0, 1, 2, 3};
  std::vector<std::vector<cas::ContentHash>> heads;
  do {
    LeaseTable t;
    cas::PackStore store;
    std::vector<WriteLease> leases;
    for (ObjectId o = 0; o < 4; ++o) leases.push_back(t.create(o));
    for (int i : order) t.commit(leases[i], to_bytes("update-" + std::to_string(i)), store, 1);
    std::vector<cas::ContentHash> h;
    for (ObjectId o = 0; o < 4; ++o) h.push_back(t.state(o).head_record);
    heads.push_back(h);
  } while (std::next_permutation(order.begin(), order.end()));
  for (const auto& h : heads) EXPECT_EQ(h, heads.front());
}

TEST(Stress, NoExclusivityViolations) {
  StressParams p;
  p.workers = 4;
  p.ops = 20'000;
  const auto report = stress_leases(p);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_EQ(report.reads_granted + report.writes_granted + report.refused, report.ops);
  EXPECT_GT(report.writes_granted, 0u);
  EXPECT_GT(report.reads_granted, 0u);
  std::vector<StressReport> trials{report};
  EXPECT_EQ(stress_csv(trials), "trial,violations\n0,0\n");
}
