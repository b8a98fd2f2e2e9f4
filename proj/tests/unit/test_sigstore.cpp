#include <gtest/gtest.h>

#include <random>

#include "embisim/sigstore/signature_store.hpp"
#include "test_support.hpp"

using namespace embisim;
using embisim::testing::Env;
using embisim::testing::kL;
using embisim::testing::kW;
using embisim::testing::small_budget;
using sigstore::Backend;
using sigstore::Scope;
using sigstore::SignatureStore;
using sigstore::StoreOptions;

namespace {

StoreOptions opts(Backend b, Scope s = Scope::global_counter) {
  StoreOptions o;
  o.backend = b;
  o.scope = s;
  return o;
}

Signature sig(std::uint64_t pid0, std::vector<SignaturePair> pairs) { return make_signature(PartitionId{pid0}, pairs); }

class StoreTest : public ::testing::TestWithParam<Backend> {};

}  // namespace

TEST_P(StoreTest, SmallGraphLevelOneIds) {
  Env env;
  SignatureStore store(*env.ws, env.dir.path() / "store", opts(GetParam()));
  const auto m = store.issue_id();
  const auto p = store.issue_id();
  EXPECT_EQ(m.value, 1u);
  EXPECT_EQ(p.value, 2u);
  // Nodes 1..6 at level 1, in nId order.
  const std::vector<Signature> level1{
      sig(1, {{kL, p}, {kW, m}}), sig(1, {{kL, p}, {kW, m}}), sig(2, {{kL, m}}),
      sig(2, {{kL, p}}),          sig(2, {{kL, m}}),          sig(2, {})};
  std::vector<std::uint64_t> got;
  for (const auto& s : level1) got.push_back(store.insert(1, s).value);
  EXPECT_EQ(got, (std::vector<std::uint64_t>{3, 3, 4, 5, 4, 6}));
  EXPECT_EQ(store.counters().issued, 6u);  // includes the two label ids
  EXPECT_EQ(store.size(), 4u);
}

TEST_P(StoreTest, LevelIsPartOfTheKey) {
  Env env;
  SignatureStore store(*env.ws, env.dir.path() / "store", opts(GetParam()));
  const auto a = store.insert(1, sig(2, {}));
  const auto b = store.insert(2, sig(2, {}));
  EXPECT_NE(a, b);
  EXPECT_EQ(store.find(1, sig(2, {})), a);
  EXPECT_FALSE(store.find(3, sig(2, {})));
}

TEST_P(StoreTest, SharedKeysAcrossLevels) {
  Env env;
  auto o = opts(GetParam());
  o.share_across_levels = true;
  SignatureStore store(*env.ws, env.dir.path() / "store", o);
  EXPECT_EQ(store.insert(1, sig(2, {})), store.insert(2, sig(2, {})));
}

TEST_P(StoreTest, GlobalScopeRejectsReset) {
  Env env;
  SignatureStore store(*env.ws, env.dir.path() / "store", opts(GetParam()));
  EXPECT_THROW(store.reset_iteration(), ConfigError);
}

TEST_P(StoreTest, PerIterationResetForgets) {
  Env env;
  SignatureStore store(*env.ws, env.dir.path() / "store", opts(GetParam(), Scope::per_iteration_counter));
  const auto a = store.insert(1, sig(2, {}));
  store.reset_iteration();
  const auto b = store.insert(1, sig(2, {}));
  EXPECT_NE(a, b);

  Env env2;
  auto o = opts(GetParam(), Scope::per_iteration_counter);
  o.restart_counter_on_reset = true;
  SignatureStore restart(*env2.ws, env2.dir.path() / "store", o);
  restart.insert(1, sig(2, {}));
  restart.insert(1, sig(3, {}));
  restart.reset_iteration();
  EXPECT_EQ(restart.insert(1, sig(3, {})).value, 1u);
}

TEST_P(StoreTest, OversizedSignatureIsRejected) {
  Env env;
  auto o = opts(GetParam());
  o.max_signature_bytes = canonical_size(2);
  SignatureStore store(*env.ws, env.dir.path() / "store", o);
  EXPECT_NO_THROW(store.insert(1, sig(1, {{kL, PartitionId{1}}, {kW, PartitionId{1}}})));
  EXPECT_THROW(store.insert(1, sig(1, {{kL, PartitionId{1}}, {kL, PartitionId{2}}, {kW, PartitionId{1}}})),
               InputError);
}

TEST_P(StoreTest, BulkEqualsSingleInserts) {
  std::mt19937_64 rng(17);
  std::vector<Signature> sigs;
  for (int i = 0; i < 5000; ++i) {
    std::vector<SignaturePair> p;
    for (int j = static_cast<int>(rng() % 4); j > 0; --j) {
      p.push_back({LabelId{static_cast<std::uint32_t>(rng() % 2)}, PartitionId{1 + rng() % 30}});
    }
    sigs.push_back(make_signature(PartitionId{1 + rng() % 3}, p));
  }
  Env a(small_budget(4)), b(small_budget(4));
  SignatureStore single(*a.ws, a.dir.path() / "store", opts(GetParam()));
  SignatureStore bulk(*b.ws, b.dir.path() / "store", opts(GetParam()));
  // Some prior content so the bulk path has to consult existing entries.
  for (int i = 0; i < 100; ++i) {
    single.insert(1, sigs[i * 7]);
    bulk.insert(1, sigs[i * 7]);
  }
  std::vector<std::uint64_t> want;
  for (const auto& s : sigs) want.push_back(single.insert(1, s).value);
  auto assigner = bulk.begin_bulk(1);
  for (std::size_t i = 0; i < sigs.size(); ++i) assigner.add(NodeId{i}, sigs[i]);
  const auto r = assigner.finish();
  std::vector<std::uint64_t> got;
  for (const auto& x : em::read_all<AssignmentCodec>(*b.ws, r.assignments)) got.push_back(x.pid.value);
  EXPECT_EQ(got, want);
  EXPECT_EQ(bulk.next_id(), single.next_id());
}

TEST_P(StoreTest, StateRestoreKeepsMapping) {
  Env env(small_budget(2));
  const auto dir = env.dir.path() / "store";
  nlohmann::json state;
  std::vector<std::uint64_t> ids;
  {
    SignatureStore store(*env.ws, dir, opts(GetParam()));
    for (std::uint64_t i = 0; i < 3000; ++i) ids.push_back(store.insert(1, sig(i % 5, {{kL, PartitionId{i}}})).value);
    state = store.state();
  }
  auto store = SignatureStore::restore(*env.ws, dir, state);
  for (std::uint64_t i = 0; i < 3000; ++i) {
    ASSERT_EQ(store->find(1, sig(i % 5, {{kL, PartitionId{i}}}))->value, ids[i]);
  }
  EXPECT_EQ(store->insert(1, sig(9, {})).value, ids.back() + 1);
}

INSTANTIATE_TEST_SUITE_P(Backends, StoreTest, ::testing::Values(Backend::in_memory, Backend::external_sorted),
                         [](const auto& info) {
                           return std::string(info.param == Backend::in_memory ? "InMemory" : "External");
                         });

TEST(StoreNames, ParseRoundTrip) {
  for (auto b : {Backend::in_memory, Backend::external_sorted}) {
    EXPECT_EQ(sigstore::parse_backend(sigstore::to_string(b)), b);
  }
  for (auto s : {Scope::global_counter, Scope::per_iteration_counter}) {
    EXPECT_EQ(sigstore::parse_scope(sigstore::to_string(s)), s);
  }
  EXPECT_THROW(sigstore::parse_backend("nope"), ConfigError);
}

TEST(StoreIo, ExternalBackendChargesStoreTraffic) {
  Env env(small_budget(2));
  SignatureStore store(*env.ws, env.dir.path() / "store", opts(Backend::external_sorted));
  for (std::uint64_t i = 0; i < 5000; ++i) store.insert(1, sig(1, {{kL, PartitionId{i}}}));
  store.state();
  EXPECT_GT(env.io.snapshot().store_write, 0u);
  EXPECT_EQ(env.io.snapshot().table_total(), 0u);
}
