#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "embisim/em/change_queue.hpp"
#include "embisim/em/external_sort.hpp"
#include "embisim/em/merge_join.hpp"
#include "embisim/em/merge_ops.hpp"
#include "embisim/em/var_file.hpp"
#include "test_support.hpp"

using namespace embisim;
using embisim::testing::Env;
using embisim::testing::small_budget;

namespace {

std::vector<EdgeRecord> fig2_edges() {
  std::vector<EdgeRecord> out;
  for (const auto& e : embisim::testing::fig2().edges) out.push_back({e.source, e.label, e.target, {}});
  return out;
}

std::vector<std::uint64_t> drain_ids(Env& env, const em::ChangeQueue::Drained& d) {
  auto ids = em::read_all<U64Codec>(*env.ws, d.ids);
  em::drop_table(d.ids);
  return ids;
}

}  // namespace

TEST(Budget, RejectsTinyBuffers) {
  EXPECT_THROW(small_budget(1).validate(), ConfigError);
  EXPECT_NO_THROW(small_budget(2).validate());
}

TEST(Table, WriteReadRoundTripCountsBytes) {
  Env env;
  const auto rows = fig2_edges();
  const auto t = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), rows);
  EXPECT_EQ(t.record_count, rows.size());
  EXPECT_EQ(env.io.snapshot().table_write, rows.size() * EdgeCodec::kWidth);
  EXPECT_EQ(em::read_all<EdgeCodec>(*env.ws, t), rows);
  EXPECT_EQ(env.io.snapshot().table_read, rows.size() * EdgeCodec::kWidth);
  EXPECT_EQ(env.io.snapshot().store_total(), 0u);
}

TEST(Table, WidthMismatchIsRejected) {
  Env env;
  const auto t = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), fig2_edges());
  EXPECT_THROW(em::TableReader<SigPairCodec>(*env.ws, t), InputError);
}

TEST(ExternalSort, EmptyInput) {
  Env env;
  const auto t = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), std::vector<EdgeRecord>{});
  const auto s = em::external_sort<EdgeCodec>(*env.ws, t, ByTidSid{});
  EXPECT_EQ(s.record_count, 0u);
}

TEST(ExternalSort, SmallGraphByTarget) {
  Env env;
  const auto t = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), fig2_edges());
  const auto s = em::external_sort<EdgeCodec>(*env.ws, t, ByTidSid{});
  std::vector<std::pair<std::uint64_t, std::uint64_t>> got;
  for (const auto& e : em::read_all<EdgeCodec>(*env.ws, s)) got.emplace_back(e.tid.value, e.sid.value);
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> want{{1, 3}, {2, 1}, {2, 2}, {2, 5},
                                                                  {3, 4}, {4, 1}, {6, 2}};
  EXPECT_EQ(got, want);
}

TEST(ExternalSort, MatchesInMemorySortWithTinyBudget) {
  Env env(small_budget(4, 4096));
  std::mt19937_64 rng(3);
  std::vector<EdgeRecord> rows;
  for (int i = 0; i < 100000; ++i) {
    rows.push_back({NodeId{rng() % 5000}, LabelId{static_cast<std::uint32_t>(rng() % 3)}, NodeId{rng() % 5000},
                    PartitionId{static_cast<std::uint64_t>(i)}});
  }
  const auto t = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), rows);
  em::SortStats stats;
  const auto s = em::external_sort<EdgeCodec>(*env.ws, t, BySid{}, {}, {}, &stats);
  EXPECT_GT(stats.merge_passes, 1u);
  // Stable: ties on sId keep input order, which pid_old_t records.
  std::stable_sort(rows.begin(), rows.end(), BySid{});
  EXPECT_EQ(em::read_all<EdgeCodec>(*env.ws, s), rows);
}

TEST(ExternalSort, DedupRemovesExactDuplicates) {
  Env env(small_budget(2, 4096));
  std::vector<EdgeRecord> rows;
  for (int rep = 0; rep < 3; ++rep) {
    for (std::uint64_t i = 0; i < 1000; ++i) rows.push_back({NodeId{i % 97}, LabelId{0}, NodeId{i}, {}});
  }
  const auto t = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), rows);
  em::SortOptions so;
  so.dedup = true;
  const auto s = em::external_sort<EdgeCodec>(*env.ws, t, BySid{}, so);
  const auto got = em::read_all<EdgeCodec>(*env.ws, s);
  ASSERT_EQ(got.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

TEST(ExternalSort, PageIoWithinClosedForm) {
  for (std::uint64_t b : {4u, 16u}) {
    Env env(small_budget(b, 4096));
    std::mt19937_64 rng(b);
    std::vector<U64Codec::value_type> rows(300 * 4096 / 8);
    for (auto& r : rows) r = rng();
    const auto t = em::write_all<U64Codec>(*env.ws, env.ws->temp_path("x"), rows);
    const auto before = env.io.snapshot();
    const auto s = em::external_sort<U64Codec>(*env.ws, t, std::less<std::uint64_t>{});
    const auto io = env.io.snapshot() - before;
    const double pages = static_cast<double>(io.table_total()) / 4096;
    EXPECT_LE(pages, 1.05 * em::merge_sort_io_pages(t.pages(4096), b)) << "B=" << b;
    EXPECT_TRUE(em::is_sorted_table<U64Codec>(*env.ws, s, std::less<std::uint64_t>{}));
  }
}

TEST(MergeSortFormula, KnownValues) {
  // 2*|X|*(1 + ceil(log_{B-1} ceil(|X|/B)))
  EXPECT_EQ(em::merge_sort_io_pages(8, 8), 16u);
  EXPECT_EQ(em::merge_sort_io_pages(100, 4), 2 * 100 * (1 + 3));
  EXPECT_EQ(em::merge_sort_io_pages(0, 4), 0u);
}

TEST(MergeJoin, MatchesNestedLoop) {
  Env env(small_budget(2, 4096));
  std::mt19937_64 rng(9);
  std::vector<EdgeRecord> left;
  for (int i = 0; i < 3000; ++i) left.push_back({NodeId{rng() % 100}, LabelId{0}, NodeId{rng() % 700}, {}});
  std::sort(left.begin(), left.end(), ByTidSid{});
  std::vector<AssignmentRecord> right;
  for (std::uint64_t n = 0; n < 700; n += 1 + rng() % 3) right.push_back({NodeId{n}, PartitionId{n * 10 + 1}});
  const auto lt = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("l"), left);
  const auto rt = em::write_all<AssignmentCodec>(*env.ws, env.ws->temp_path("r"), right);
  std::vector<std::uint64_t> got;
  em::merge_join<EdgeCodec, AssignmentCodec>(
      *env.ws, lt, rt, [](const EdgeRecord& e) { return e.tid; }, [](const AssignmentRecord& a) { return a.nid; },
      [&](const EdgeRecord&, const AssignmentRecord* a) { got.push_back(a ? a->pid.value : 0); });
  std::vector<std::uint64_t> want;
  for (const auto& e : left) {
    std::uint64_t v = 0;
    for (const auto& a : right) {
      if (a.nid == e.tid) v = a.pid.value;
    }
    want.push_back(v);
  }
  EXPECT_EQ(got, want);
}

TEST(MergeJoin, SeekPathMatchesScan) {
  Env env(small_budget(2, 4096));
  std::vector<AssignmentRecord> right;
  for (std::uint64_t n = 0; n < 50000; ++n) right.push_back({NodeId{2 * n}, PartitionId{n}});
  const auto rt = em::write_all<AssignmentCodec>(*env.ws, env.ws->temp_path("r"), right);
  const std::vector<EdgeRecord> left{{NodeId{0}, {}, NodeId{4}, {}}, {NodeId{0}, {}, NodeId{5}, {}},
                                     {NodeId{0}, {}, NodeId{99998}, {}}, {NodeId{0}, {}, NodeId{99998}, {}}};
  const auto lt = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("l"), left);
  ASSERT_TRUE(em::prefer_seeks(*env.ws, lt.record_count, rt));
  const auto before = env.io.snapshot();
  std::vector<std::int64_t> got;
  em::merge_join<EdgeCodec, AssignmentCodec>(
      *env.ws, lt, rt, [](const EdgeRecord& e) { return e.tid; }, [](const AssignmentRecord& a) { return a.nid; },
      [&](const EdgeRecord&, const AssignmentRecord* a) {
        got.push_back(a ? static_cast<std::int64_t>(a->pid.value) : -1);
      });
  EXPECT_EQ(got, (std::vector<std::int64_t>{2, -1, 49999, 49999}));
  EXPECT_LT((env.io.snapshot() - before).table_read, rt.byte_size() / 4);
}

TEST(MergeJoin, KeyRegressionIsAnError) {
  Env env;
  const std::vector<EdgeRecord> left{{NodeId{0}, {}, NodeId{5}, {}}, {NodeId{0}, {}, NodeId{3}, {}}};
  const std::vector<AssignmentRecord> right{{NodeId{3}, PartitionId{1}}, {NodeId{5}, PartitionId{2}}};
  const auto lt = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("l"), left);
  const auto rt = em::write_all<AssignmentCodec>(*env.ws, env.ws->temp_path("r"), right);
  auto run = [&] {
    em::merge_join<EdgeCodec, AssignmentCodec>(
        *env.ws, lt, rt, [](const EdgeRecord& e) { return e.tid; }, [](const AssignmentRecord& a) { return a.nid; },
        [](const EdgeRecord&, const AssignmentRecord*) {});
  };
  EXPECT_THROW(run(), InputError);
}

TEST(Semijoin, SelectsMatchingRows) {
  Env env(small_budget(2, 4096));
  std::vector<EdgeRecord> edges;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    for (std::uint64_t t = 0; t < 3; ++t) edges.push_back({NodeId{s}, LabelId{0}, NodeId{t}, {}});
  }
  const auto et = em::write_all<EdgeCodec>(*env.ws, env.ws->temp_path("e"), edges);
  for (const std::vector<std::uint64_t>& keys :
       {std::vector<std::uint64_t>{7, 4999}, [] {
          std::vector<std::uint64_t> v;
          for (std::uint64_t i = 0; i < 5000; i += 2) v.push_back(i);
          return v;
        }()}) {
    const auto kt = em::write_all<U64Codec>(*env.ws, env.ws->temp_path("k"), keys);
    std::uint64_t hits = 0;
    bool ok = true;
    em::semijoin<EdgeCodec>(*env.ws, et, kt, [](const EdgeRecord& e) { return e.sid.value; },
                            [&](const EdgeRecord& e) {
                              ++hits;
                              ok = ok && std::binary_search(keys.begin(), keys.end(), e.sid.value);
                            });
    EXPECT_EQ(hits, 3 * keys.size());
    EXPECT_TRUE(ok);
  }
}

TEST(MergeOps, UnionAndSubtract) {
  Env env;
  auto desc = [](const AssignmentRecord& r) { return "node " + std::to_string(r.nid.value); };
  const std::vector<AssignmentRecord> a{{NodeId{1}, {}}, {NodeId{4}, {}}}, b{{NodeId{2}, {}}, {NodeId{5}, {}}};
  const auto at = em::write_all<AssignmentCodec>(*env.ws, env.ws->temp_path("a"), a);
  const auto bt = em::write_all<AssignmentCodec>(*env.ws, env.ws->temp_path("b"), b);
  const auto u = em::merge_union<AssignmentCodec>(*env.ws, at, bt, ByNid{}, desc, env.ws->temp_path("u"));
  EXPECT_EQ(u.record_count, 4u);
  EXPECT_THROW(em::merge_union<AssignmentCodec>(*env.ws, u, bt, ByNid{}, desc, env.ws->temp_path("u")), InputError);
  const auto d = em::merge_subtract<AssignmentCodec>(*env.ws, u, at, ByNid{}, desc, env.ws->temp_path("d"));
  EXPECT_EQ(em::read_all<AssignmentCodec>(*env.ws, d), b);
  EXPECT_THROW(em::merge_subtract<AssignmentCodec>(*env.ws, d, at, ByNid{}, desc, env.ws->temp_path("d2")),
               InputError);
}

TEST(ChangeQueue, LevelOrderAndDedup) {
  Env env;
  em::ChangeQueue q(*env.ws);
  q.push(1, NodeId{6});
  q.push(2, NodeId{6});
  q.push(2, NodeId{9});
  q.push(1, NodeId{3});
  q.push(1, NodeId{7});
  q.push(1, NodeId{3});
  auto d = q.drain_level();
  ASSERT_TRUE(d);
  EXPECT_EQ(d->level, 1u);
  EXPECT_EQ(drain_ids(env, *d), (std::vector<std::uint64_t>{3, 6, 7}));
  d = q.drain_level();
  ASSERT_TRUE(d);
  EXPECT_EQ(d->level, 2u);
  EXPECT_EQ(drain_ids(env, *d), (std::vector<std::uint64_t>{6, 9}));
  EXPECT_FALSE(q.drain_level());
  EXPECT_THROW(q.push(0, NodeId{1}), InputError);
}

TEST(ChangeQueue, SpilledBucketDrainsSorted) {
  Env env;
  em::ChangeQueue q(*env.ws, 64);
  for (std::uint64_t i = 0; i < 1000; ++i) q.push(1, NodeId{999 - i});
  auto d = q.drain_level();
  ASSERT_TRUE(d);
  const auto ids = drain_ids(env, *d);
  ASSERT_EQ(ids.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  q.push(2, NodeId{1});
  q.push(1, NodeId{4});
  EXPECT_EQ(q.drain_level()->level, 1u);
}

TEST(VarFile, SorterOrdersRecords) {
  Env env(small_budget(2, 4096));
  em::VarSorter::Options o;
  o.memory_bytes = 512;
  o.fan_in = 2;
  em::VarSorter s(*env.ws, [](std::string_view a, std::string_view b) { return a < b; }, o);
  std::vector<std::string> want;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    std::string r(1 + rng() % 40, 'a');
    for (auto& c : r) c = static_cast<char>('a' + rng() % 26);
    want.push_back(r);
    s.push(r);
  }
  const auto f = s.finish();
  std::sort(want.begin(), want.end());
  em::VarReader r(*env.ws, f, em::Traffic::table);
  std::vector<std::string> got;
  std::string rec;
  while (r.next(rec)) got.push_back(rec);
  EXPECT_EQ(got, want);
}
