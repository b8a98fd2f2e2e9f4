#include <gtest/gtest.h>

#include <sstream>

#include "embisim/oracle/oracle.hpp"
#include "test_support.hpp"

using namespace embisim;
using namespace embisim::oracle;
namespace et = embisim::testing;

namespace {

SmallGraph path(std::uint64_t n) {
  SmallGraph g;
  for (std::uint64_t i = 0; i < n; ++i) g.nodes.emplace_back(NodeId{i}, LabelId{0});
  for (std::uint64_t i = 0; i + 1 < n; ++i) g.edges.push_back({NodeId{i}, LabelId{0}, NodeId{i + 1}});
  return g;
}

}  // namespace

TEST(Partition, FromKeysNumbersByFirstOccurrence) {
  const std::vector<NodeId> ids{NodeId{1}, NodeId{2}, NodeId{3}};
  const auto p = partition_from_keys(ids, std::vector<std::uint32_t>{7, 3, 7});
  EXPECT_EQ(p.block, (std::vector<std::uint32_t>{0, 1, 0}));
  EXPECT_EQ(p.block_count(), 2u);
  EXPECT_EQ(p.block_of(NodeId{3}), 0u);
  EXPECT_FALSE(p.block_of(NodeId{9}));
}

TEST(Partition, WitnessAndRefinement) {
  const std::vector<NodeId> ids{NodeId{1}, NodeId{2}, NodeId{3}};
  const auto a = partition_from_keys(ids, std::vector<std::uint32_t>{0, 0, 1});
  const auto b = partition_from_keys(ids, std::vector<std::uint32_t>{0, 1, 2});
  EXPECT_TRUE(refines(b, a));
  EXPECT_FALSE(refines(a, b));
  const auto w = find_witness(a, b);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->first, NodeId{1});
  EXPECT_EQ(w->second, NodeId{2});
  EXPECT_FALSE(find_witness(a, a));
}

TEST(Oracles, SmallGraphLevels) {
  const auto g = et::fig2();
  const auto levels = naive_levels(g, 2);
  EXPECT_EQ(levels[0].block, (std::vector<std::uint32_t>{0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(levels[1].block, (std::vector<std::uint32_t>{0, 0, 1, 2, 1, 3}));
  EXPECT_EQ(levels[2].block, (std::vector<std::uint32_t>{0, 1, 2, 3, 2, 4}));
}

TEST(Oracles, ThreeDefinitionsAgree) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto g = et::random_graph(25, 50 + seed, 3, 2, seed);
    for (Level k = 0; k <= 4; ++k) {
      const auto n = naive_k_bisim(g, k);
      EXPECT_EQ(n, kaushik_k_bisim(g, k)) << "seed " << seed << " k " << k;
      EXPECT_EQ(n, refine_k_bisim(g, k)) << "seed " << seed << " k " << k;
    }
  }
}

TEST(Oracles, LevelsRefine) {
  const auto levels = naive_levels(et::random_graph(40, 100, 2, 2, 8), 6);
  for (std::size_t j = 1; j < levels.size(); ++j) EXPECT_TRUE(refines(levels[j], levels[j - 1]));
}

TEST(FullBisimulation, PathNeedsLengthRounds) {
  const auto r = full_bisim(path(6));
  EXPECT_EQ(r.partition.block_count(), 6u);
  EXPECT_EQ(r.stabilization_round, 5u);
}

TEST(FullBisimulation, CompleteGraphCollapses) {
  SmallGraph g;
  for (std::uint64_t i = 0; i < 5; ++i) g.nodes.emplace_back(NodeId{i}, LabelId{0});
  for (std::uint64_t s = 0; s < 5; ++s) {
    for (std::uint64_t t = 0; t < 5; ++t) {
      if (s != t) g.edges.push_back({NodeId{s}, LabelId{0}, NodeId{t}});
    }
  }
  const auto r = full_bisim(g);
  EXPECT_EQ(r.partition.block_count(), 1u);
  EXPECT_EQ(r.stabilization_round, 0u);
}

TEST(FullBisimulation, RoundBoundedByNodeCount) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = et::random_graph(20, 25, 1, 1, seed);
    EXPECT_LE(full_bisim(g).stabilization_round, g.nodes.size());
  }
}

TEST(ReadTextGraph, NumbersLikeIngest) {
  std::istringstream nodes("b\tP\na\tM\n");
  std::istringstream edges("a\tw\tb\na\tw\tb\nb\ta\n");
  std::vector<std::string> names;
  const auto g = read_text_graph(nodes, edges, &names);
  EXPECT_EQ(names, (std::vector<std::string>{"b", "a"}));
  // labels sorted: M P _ w
  EXPECT_EQ(g.nodes[0].second, LabelId{1});
  EXPECT_EQ(g.nodes[1].second, LabelId{0});
  ASSERT_EQ(g.edges.size(), 2u);
}

TEST(CheckSmall, RejectsDanglingEdges) {
  auto g = et::fig2();
  g.edges.push_back({NodeId{1}, et::kL, NodeId{42}});
  EXPECT_THROW(check_small(g), InputError);
}
