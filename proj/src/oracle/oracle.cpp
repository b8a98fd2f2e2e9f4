#include "embisim/oracle/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "embisim/core/label_dict.hpp"
#include "embisim/core/text_format.hpp"

namespace embisim::oracle {

namespace {

/// Index-based view of a SmallGraph.
struct Dense {
  std::vector<NodeId> ids;
  std::vector<LabelId> labels;
  // out[u] = (edge label, child index), sorted and distinct.
  std::vector<std::vector<std::pair<LabelId, std::size_t>>> out;
};

Dense densify(const SmallGraph& g) {
  check_small(g);
  std::vector<std::pair<NodeId, LabelId>> nodes = g.nodes;
  std::sort(nodes.begin(), nodes.end());
  Dense d;
  std::map<NodeId, std::size_t> index;
  for (const auto& [id, label] : nodes) {
    index.emplace(id, d.ids.size());
    d.ids.push_back(id);
    d.labels.push_back(label);
  }
  d.out.resize(d.ids.size());
  for (const auto& e : g.edges) d.out[index.at(e.source)].push_back({e.label, index.at(e.target)});
  for (auto& o : d.out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  return d;
}

Partition label_partition(const Dense& d) { return partition_from_keys(d.ids, d.labels); }

Partition naive_step(const Dense& d, const Partition& p0, const Partition& prev) {
  using Key = std::pair<std::uint32_t, std::vector<std::pair<LabelId, std::uint32_t>>>;
  std::vector<Key> keys(d.ids.size());
  for (std::size_t u = 0; u < d.ids.size(); ++u) {
    keys[u].first = p0.block[u];
    for (const auto& [l, c] : d.out[u]) keys[u].second.push_back({l, prev.block[c]});
    std::sort(keys[u].second.begin(), keys[u].second.end());
    keys[u].second.erase(std::unique(keys[u].second.begin(), keys[u].second.end()), keys[u].second.end());
  }
  return partition_from_keys(d.ids, keys);
}

}  // namespace

template <class Key>
Partition partition_from_keys(const std::vector<NodeId>& sorted_nodes, const std::vector<Key>& keys) {
  Partition p;
  p.nodes = sorted_nodes;
  p.block.resize(keys.size());
  std::map<Key, std::uint32_t> ids;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto [it, fresh] = ids.emplace(keys[i], static_cast<std::uint32_t>(ids.size()));
    p.block[i] = it->second;
  }
  return p;
}

template Partition partition_from_keys(const std::vector<NodeId>&, const std::vector<LabelId>&);
template Partition partition_from_keys(const std::vector<NodeId>&, const std::vector<std::uint64_t>&);
template Partition partition_from_keys(const std::vector<NodeId>&, const std::vector<std::uint32_t>&);

std::size_t Partition::block_count() const {
  return block.empty() ? 0 : *std::max_element(block.begin(), block.end()) + 1;
}

std::optional<std::uint32_t> Partition::block_of(NodeId n) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), n);
  if (it == nodes.end() || *it != n) return std::nullopt;
  return block[static_cast<std::size_t>(it - nodes.begin())];
}

std::optional<std::pair<NodeId, NodeId>> find_witness(const Partition& a, const Partition& b) {
  if (a.nodes != b.nodes) throw InputError("partitions are over different node sets");
  // Map each block of `a` to the first b-block seen, and vice versa.
  std::map<std::uint32_t, std::size_t> first_a, first_b;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    auto [ia, fa] = first_a.emplace(a.block[i], i);
    if (!fa && b.block[ia->second] != b.block[i]) return std::make_pair(a.nodes[ia->second], a.nodes[i]);
    auto [ib, fb] = first_b.emplace(b.block[i], i);
    if (!fb && a.block[ib->second] != a.block[i]) return std::make_pair(a.nodes[ib->second], a.nodes[i]);
  }
  return std::nullopt;
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.nodes != coarse.nodes) throw InputError("partitions are over different node sets");
  std::map<std::uint32_t, std::uint32_t> host;
  for (std::size_t i = 0; i < fine.block.size(); ++i) {
    auto [it, fresh] = host.emplace(fine.block[i], coarse.block[i]);
    if (!fresh && it->second != coarse.block[i]) return false;
  }
  return true;
}

SmallGraph read_text_graph(std::istream& nodes, std::istream& edges, std::vector<std::string>* names) {
  struct Raw {
    std::string s, l, t;
    std::uint64_t line;
  };
  std::vector<std::pair<std::string, std::string>> raw_nodes;
  std::vector<Raw> raw_edges;
  std::set<std::string, std::less<>> labels;
  auto label = [](std::string_view l) { return std::string(l.empty() ? text::kDefaultLabel : l); };
  text::read_nodes(nodes, "nodes", [&](const text::NodeLine& l) {
    raw_nodes.emplace_back(std::string(l.id), label(l.label));
    labels.insert(raw_nodes.back().second);
  });
  text::read_edges(edges, "edges", [&](const text::EdgeLine& l) {
    raw_edges.push_back({std::string(l.source), label(l.label), std::string(l.target), l.line});
    labels.insert(raw_edges.back().l);
  });
  if (raw_nodes.size() > kMaxNodes) {
    throw InputError("graph has " + std::to_string(raw_nodes.size()) + " nodes; the oracle accepts at most " +
                     std::to_string(kMaxNodes));
  }
  const LabelDictionary dict = LabelDictionary::from_labels(labels);
  SmallGraph g;
  std::map<std::string, NodeId, std::less<>> ids;
  for (const auto& [id, l] : raw_nodes) {
    const NodeId n{g.nodes.size()};
    if (!ids.emplace(id, n).second) throw InputError("nodes: duplicate node id '" + id + "'");
    g.nodes.emplace_back(n, dict.at(l));
    if (names) names->push_back(id);
  }
  std::set<SmallEdge> seen;
  for (const auto& e : raw_edges) {
    const auto s = ids.find(e.s);
    const auto t = ids.find(e.t);
    if (s == ids.end() || t == ids.end()) {
      throw InputError("edges:" + std::to_string(e.line) + ": unknown endpoint '" + (s == ids.end() ? e.s : e.t) + "'");
    }
    const SmallEdge se{s->second, dict.at(e.l), t->second};
    if (seen.insert(se).second) g.edges.push_back(se);
  }
  return g;
}

void check_small(const SmallGraph& g) {
  if (g.nodes.size() > kMaxNodes) {
    throw InputError("graph has " + std::to_string(g.nodes.size()) + " nodes; the oracle accepts at most " +
                     std::to_string(kMaxNodes));
  }
  std::set<NodeId> ids;
  for (const auto& [id, l] : g.nodes) {
    if (!ids.insert(id).second) throw InputError("duplicate node " + std::to_string(id.value));
  }
  for (const auto& e : g.edges) {
    if (!ids.count(e.source) || !ids.count(e.target)) {
      throw InputError("edge (" + std::to_string(e.source.value) + "," + std::to_string(e.target.value) +
                       ") has an endpoint outside the node set");
    }
  }
}

std::vector<Partition> naive_levels(const SmallGraph& g, Level k) {
  const Dense d = densify(g);
  std::vector<Partition> levels{label_partition(d)};
  for (Level j = 1; j <= k; ++j) levels.push_back(naive_step(d, levels[0], levels.back()));
  return levels;
}

Partition naive_k_bisim(const SmallGraph& g, Level k) { return naive_levels(g, k).back(); }

Partition kaushik_k_bisim(const SmallGraph& g, Level k) {
  const Dense d = densify(g);
  const std::size_t n = d.ids.size();
  std::vector<std::vector<char>> rel(n, std::vector<char>(n));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) rel[u][v] = d.labels[u] == d.labels[v];
  }
  // Every labeled child of a has an equally labeled related child of b.
  auto covered = [&](const std::vector<std::vector<char>>& r, std::size_t a, std::size_t b) {
    for (const auto& [la, ca] : d.out[a]) {
      bool found = false;
      for (const auto& [lb, cb] : d.out[b]) {
        if (la == lb && r[ca][cb]) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  for (Level j = 1; j <= k; ++j) {
    auto next = rel;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        next[u][v] = rel[u][v] && covered(rel, u, v) && covered(rel, v, u);
      }
    }
    rel = std::move(next);
  }
  std::vector<std::uint64_t> rep(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t r = 0;
    while (!rel[u][r]) ++r;
    rep[u] = r;
  }
  return partition_from_keys(d.ids, rep);
}

Partition refine_k_bisim(const SmallGraph& g, Level k) {
  const Dense d = densify(g);
  const std::size_t n = d.ids.size();
  std::set<LabelId> edge_labels;
  for (const auto& o : d.out) {
    for (const auto& [l, c] : o) edge_labels.insert(l);
  }
  // Blocks as sorted node-index lists.
  std::vector<std::vector<std::size_t>> blocks;
  {
    std::map<LabelId, std::vector<std::size_t>> by_label;
    for (std::size_t u = 0; u < n; ++u) by_label[d.labels[u]].push_back(u);
    for (auto& [l, b] : by_label) blocks.push_back(std::move(b));
  }
  for (Level j = 1; j <= k; ++j) {
    const auto splitters = blocks;
    for (const auto& J : splitters) {
      std::vector<char> in_j(n);
      for (auto x : J) in_j[x] = 1;
      for (LabelId l : edge_labels) {
        std::vector<char> parent(n);
        for (std::size_t y = 0; y < n; ++y) {
          for (const auto& [el, c] : d.out[y]) {
            if (el == l && in_j[c]) {
              parent[y] = 1;
              break;
            }
          }
        }
        std::vector<std::vector<std::size_t>> next;
        for (auto& I : blocks) {
          std::vector<std::size_t> inside, outside;
          for (auto x : I) (parent[x] ? inside : outside).push_back(x);
          if (!inside.empty()) next.push_back(std::move(inside));
          if (!outside.empty()) next.push_back(std::move(outside));
        }
        blocks = std::move(next);
      }
    }
  }
  std::vector<std::uint64_t> rep(n);
  for (const auto& b : blocks) {
    for (auto x : b) rep[x] = b.front();
  }
  return partition_from_keys(d.ids, rep);
}

FullBisim full_bisim(const SmallGraph& g) {
  const Dense d = densify(g);
  const Partition p0 = label_partition(d);
  Partition cur = p0;
  Level r = 0;
  for (;;) {
    Partition next = naive_step(d, p0, cur);
    // Each level refines the previous one, so equal counts mean equal relations.
    if (next.block_count() == cur.block_count()) return {cur, r};
    cur = std::move(next);
    ++r;
  }
}

}  // namespace embisim::oracle
