#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "embisim/maintain/maintain.hpp"
#include "test_support.hpp"

using namespace embisim;
namespace et = embisim::testing;
using maintain::MaintOptions;

namespace {

using Col = std::vector<std::uint64_t>;
using Maint = et::Maintained;

oracle::SmallEdge edge(std::uint64_t s, LabelId l, std::uint64_t t) { return {NodeId{s}, l, NodeId{t}}; }

}  // namespace

TEST(AddNodes, NewNodeSharesSinkColumns) {
  Maint m(et::fig2(), 2);
  m.add_nodes({{NodeId{7}, et::kP}});
  EXPECT_EQ(m.row(NodeId{7}), (Col{2, 6, 11}));
  EXPECT_EQ(m.row(NodeId{6}), (Col{2, 6, 11}));
  EXPECT_EQ(m.columns()[2], (Col{7, 8, 9, 10, 9, 11, 11}));
}

TEST(AddNodes, FreshLabelAndSiblings) {
  Maint m(et::fig2(), 3);
  const PartitionId next = m.store->next_id();
  m.add_nodes({{NodeId{10}, LabelId{5}}, {NodeId{11}, LabelId{5}}, {NodeId{12}, LabelId{5}}});
  const auto r = m.row(NodeId{10});
  // The sink signature is keyed per level, so each level issues its own id.
  for (Level j = 0; j <= 3; ++j) EXPECT_GE(r[j], next.value);
  EXPECT_EQ(std::set<std::uint64_t>(r.begin(), r.end()).size(), 4u);
  EXPECT_EQ(m.row(NodeId{11}), r);
  EXPECT_EQ(m.row(NodeId{12}), r);
  EXPECT_TRUE(m.matches_rebuild());
}

TEST(AddNodes, DuplicateIdIsRejected) {
  Maint m(et::fig2(), 2);
  const auto before = m.columns();
  EXPECT_THROW(m.add_nodes({{NodeId{3}, et::kP}}), InputError);
  EXPECT_EQ(m.columns(), before);
}

TEST(AddEdges, EdgeToNewSinkChangesNothing) {
  Maint m(et::fig2(), 2);
  m.add_nodes({{NodeId{7}, et::kP}});
  const auto before = m.columns();
  const auto s = m.add_edges({edge(2, et::kL, 7)});
  EXPECT_EQ(m.columns(), before);
  ASSERT_EQ(s.levels.size(), 2u);
  for (const auto& l : s.levels) {
    EXPECT_EQ(l.checked_nodes, 1u);
    EXPECT_EQ(l.changed_nodes, 0u);
  }
}

TEST(AddEdges, EdgeBetweenSinkAndLeafMergesParents) {
  Maint m(et::fig2(), 2);
  const auto s = m.add_edges({edge(6, et::kL, 5)});
  EXPECT_EQ(m.row(NodeId{6}), (Col{2, 5, 10}));
  EXPECT_EQ(m.row(NodeId{1})[2], 7u);
  EXPECT_EQ(m.row(NodeId{2})[2], 7u);
  EXPECT_EQ(m.columns()[1], (Col{3, 3, 4, 5, 4, 5}));
  ASSERT_EQ(s.levels.size(), 2u);
  EXPECT_EQ(maintain::to_csv_row(s.levels[0]).substr(0, 10), "1,1,1,2,0,");
  EXPECT_EQ(maintain::to_csv_row(s.levels[1]).substr(0, 10), "2,2,2,4,0,");
  EXPECT_TRUE(m.matches_rebuild());
}

TEST(AddEdges, Rejections) {
  Maint m(et::fig2(), 2);
  EXPECT_THROW(m.add_edges({edge(1, et::kL, 42)}), InputError);
  Maint m2(et::fig2(), 2);
  EXPECT_THROW(m2.add_edges({edge(42, et::kL, 1)}), InputError);
  Maint m3(et::fig2(), 2);
  EXPECT_THROW(m3.add_edges({edge(3, et::kL, 1)}), InputError);
}

TEST(AddEdges, PerIterationStoreIsRefused) {
  Maint m(et::fig2(), 2, false, sigstore::Scope::per_iteration_counter);
  EXPECT_THROW(m.add_edges({edge(6, et::kL, 5)}), ConfigError);
}

TEST(DeleteEdges, UndoesInsert) {
  Maint m(et::fig2(), 2);
  m.add_edges({edge(6, et::kL, 5)});
  m.delete_edges({edge(6, et::kL, 5)});
  EXPECT_TRUE(m.matches_rebuild());
  EXPECT_EQ(et::history_partitions(*m.env.ws, m.st.node_table, m.st.width, 3), oracle::naive_levels(et::fig2(), 2));
}

TEST(DeleteEdges, RedundantPairChangesNothing) {
  oracle::SmallGraph g;
  for (std::uint64_t i = 0; i < 3; ++i) g.nodes.emplace_back(NodeId{i}, LabelId{0});
  g.edges = {edge(0, LabelId{0}, 1), edge(0, LabelId{0}, 2)};
  Maint m(g, 3);
  const auto s = m.delete_edges({edge(0, LabelId{0}, 2)});
  for (const auto& l : s.levels) EXPECT_EQ(l.changed_nodes, 0u);
  EXPECT_TRUE(m.matches_rebuild());
}

TEST(DeleteEdges, MissingEdgeIsRejected) {
  Maint m(et::fig2(), 2);
  EXPECT_THROW(maintain::delete_edges(*m.env.ws, m.st, *m.store, m.edges({edge(6, et::kL, 5)})), InputError);
}

TEST(DeleteNodes, IsolatedNodeHasNoPropagation) {
  Maint m(et::fig2(), 2);
  m.add_nodes({{NodeId{7}, et::kP}});
  const auto s = m.delete_nodes({NodeId{7}});
  for (const auto& l : s.levels) EXPECT_EQ(l.checked_nodes, 0u);
  EXPECT_EQ(m.columns()[2], (Col{7, 8, 9, 10, 9, 11}));
}

TEST(DeleteNodes, RemovesIncidentEdges) {
  Maint m(et::fig2(), 2);
  m.add_nodes({{NodeId{7}, et::kP}});
  m.add_edges({edge(2, et::kL, 7)});
  m.delete_nodes({NodeId{7}});
  EXPECT_TRUE(m.matches_rebuild());
  EXPECT_EQ(m.st.edge_st.record_count, 7u);
  EXPECT_EQ(m.st.edge_ts.record_count, 7u);
  Maint m2(et::fig2(), 3);
  m2.delete_nodes({NodeId{2}});
  EXPECT_TRUE(m2.matches_rebuild());
}

TEST(DeleteNodes, UnknownNodeIsRejected) {
  Maint m(et::fig2(), 2);
  EXPECT_THROW(maintain::delete_nodes(*m.env.ws, m.st, *m.store, {NodeId{99}}), InputError);
}

TEST(ChangeK, LowerIsAView) {
  Maint m(et::fig2(), 2);
  const auto before = m.env.io.snapshot();
  m.change_k(1);
  EXPECT_EQ(m.env.io.snapshot(), before);
  const auto cols = m.columns();
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[1], (Col{3, 3, 4, 5, 4, 6}));
  m.change_k(1);
  EXPECT_EQ(m.columns(), cols);
}

TEST(ChangeK, RaiseMatchesDirectBuild) {
  Maint m(et::fig2(), 1);
  m.change_k(2);
  EXPECT_EQ(m.columns()[2], (Col{7, 8, 9, 10, 9, 11}));
  m.change_k(5);
  EXPECT_TRUE(m.matches_rebuild());
  m.change_k(1);
  m.change_k(4);
  EXPECT_TRUE(m.matches_rebuild());
}

TEST(EarlyStop, MaintenanceAfterEarlyStoppedBuild) {
  oracle::SmallGraph g;
  for (std::uint64_t i = 0; i < 6; ++i) g.nodes.emplace_back(NodeId{i}, LabelId{0});
  for (std::uint64_t i = 0; i + 1 < 3; ++i) g.edges.push_back(edge(i, LabelId{0}, i + 1));
  Maint m(g, 6, true);
  EXPECT_LT(m.st.consistent, 6u);
  m.add_edges({edge(2, LabelId{0}, 3), edge(3, LabelId{0}, 4)});
  EXPECT_TRUE(m.matches_rebuild());
  m.delete_edges({edge(0, LabelId{0}, 1)});
  EXPECT_TRUE(m.matches_rebuild());
}

TEST(Heuristic, Threshold) {
  EXPECT_FALSE(maintain::switch_heuristic(10, 1000000, 0.5));
  EXPECT_TRUE(maintain::switch_heuristic(1000000, 1000000, 0.5));
  EXPECT_FALSE(maintain::switch_heuristic(5, 10, 0.5));
  EXPECT_TRUE(maintain::switch_heuristic(1, 10, 0.0));
}

TEST(Heuristic, RebuildGivesSameResult) {
  for (double theta : {0.0, 0.5}) {
    Maint m(et::fig2(), 2);
    const auto s = m.add_edges({edge(6, et::kL, 5)}, {true, theta});
    EXPECT_TRUE(m.matches_rebuild());
    EXPECT_EQ(m.row(NodeId{6}), (Col{2, 5, 10}));
    bool rebuilt = false;
    for (const auto& l : s.levels) rebuilt = rebuilt || l.rebuilt;
    EXPECT_EQ(rebuilt, theta == 0.0);
  }
}

TEST(Random, UpdatesMatchRebuild) {
  std::mt19937_64 rng(2024);
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Maint m(et::random_graph(30, 70, 3, 2, seed), 4, seed % 2 == 0);
    for (int op = 0; op < 6; ++op) {
      const auto n = m.graph.nodes.size();
      switch (rng() % 4) {
        case 0: {
          const auto s = m.graph.nodes[rng() % n].first.value, t = m.graph.nodes[rng() % n].first.value;
          const auto e = edge(s, LabelId{static_cast<std::uint32_t>(rng() % 2)}, t);
          if (std::find(m.graph.edges.begin(), m.graph.edges.end(), e) == m.graph.edges.end()) m.add_edges({e});
          break;
        }
        case 1:
          if (!m.graph.edges.empty()) m.delete_edges({m.graph.edges[rng() % m.graph.edges.size()]});
          break;
        case 2:
          m.delete_nodes({m.graph.nodes[rng() % n].first});
          break;
        default:
          m.add_nodes({{NodeId{1000 + seed * 10 + static_cast<std::uint64_t>(op)}, LabelId{0}}});
      }
      ASSERT_TRUE(m.matches_rebuild()) << "seed " << seed << " op " << op;
    }
  }
}
