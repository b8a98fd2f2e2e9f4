#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "embisim/core/types.hpp"

// In-memory reference implementations of k-bisimulation. Intended for
// graphs of at most kMaxNodes nodes.

namespace embisim::oracle {

inline constexpr std::size_t kMaxNodes = 10000;

struct SmallEdge {
  NodeId source;
  LabelId label;
  NodeId target;
  auto operator<=>(const SmallEdge&) const = default;
};

struct SmallGraph {
  std::vector<std::pair<NodeId, LabelId>> nodes;
  std::vector<SmallEdge> edges;
};

/// Block id per node, aligned with `nodes` sorted ascending. Block ids are
/// dense and numbered by first occurrence, so two partitions over the same
/// nodes are equal as relations iff their block vectors are equal.
struct Partition {
  std::vector<NodeId> nodes;
  std::vector<std::uint32_t> block;

  std::size_t block_count() const;
  std::optional<std::uint32_t> block_of(NodeId n) const;
  bool operator==(const Partition&) const = default;
};

/// Renumbers arbitrary per-node keys into a Partition.
template <class Key>
Partition partition_from_keys(const std::vector<NodeId>& sorted_nodes, const std::vector<Key>& keys);

/// Two nodes grouped differently by the partitions (together in one,
/// apart in the other), or nullopt when the relations are equal. Throws
/// InputError when the node sets differ.
std::optional<std::pair<NodeId, NodeId>> find_witness(const Partition& a, const Partition& b);

/// True if every block of `fine` lies inside one block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

/// Groups nodes by (label block, set of (edge label, child block)) k times.
Partition naive_k_bisim(const SmallGraph& g, Level k);

/// All levels 0..k of naive_k_bisim.
std::vector<Partition> naive_levels(const SmallGraph& g, Level k);

/// Pairwise definition: u ~k v iff u ~(k-1) v and each labeled child of
/// one is matched by an equally labeled (k-1)-equivalent child of the
/// other.
Partition kaushik_k_bisim(const SmallGraph& g, Level k);

/// Partition refinement: each round splits the previous partition against
/// parents_l(J) for every previous block J and edge label l.
Partition refine_k_bisim(const SmallGraph& g, Level k);

struct FullBisim {
  Partition partition;
  /// Smallest r with P_r = P_(r+1).
  Level stabilization_round = 0;
};
FullBisim full_bisim(const SmallGraph& g);

/// Reads the ingest text formats. Node ids are numbered 0.. in file order
/// and labels in lexicographic order, as ingest does; duplicate edges are
/// dropped. `names`, when given, receives the external ids by node id.
SmallGraph read_text_graph(std::istream& nodes, std::istream& edges, std::vector<std::string>* names = nullptr);

/// Throws InputError for graphs above kMaxNodes or with dangling edges.
void check_small(const SmallGraph& g);

}  // namespace embisim::oracle
