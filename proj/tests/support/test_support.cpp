#include "test_support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>

namespace embisim::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> seq{0};
  path_ = fs::temp_directory_path() /
          ("embisim-test-" + std::to_string(::getpid()) + "-" + std::to_string(seq++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Env::Env(em::BufferBudget b) { ws = std::make_unique<em::Workspace>(dir.path(), b, io); }

em::BufferBudget small_budget(std::uint64_t pages, std::uint32_t page_size) {
  em::BufferBudget b;
  b.page_size = page_size;
  b.table_buffer_bytes = pages * page_size;
  b.store_buffer_bytes = pages * page_size;
  return b;
}

oracle::SmallGraph fig2() {
  oracle::SmallGraph g;
  const LabelId labels[] = {kM, kM, kP, kP, kP, kP};
  for (std::uint64_t i = 1; i <= 6; ++i) g.nodes.emplace_back(NodeId{i}, labels[i - 1]);
  auto e = [&](std::uint64_t s, LabelId l, std::uint64_t t) { g.edges.push_back({NodeId{s}, l, NodeId{t}}); };
  e(3, kL, 1);
  e(1, kW, 2);
  e(2, kW, 2);
  e(5, kL, 2);
  e(4, kL, 3);
  e(1, kL, 4);
  e(2, kL, 6);
  return g;
}

LabelId SmallGraphSink::intern(std::string_view label) {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it != labels_.end()) return LabelId{static_cast<std::uint32_t>(it - labels_.begin())};
  labels_.emplace_back(label);
  return LabelId{static_cast<std::uint32_t>(labels_.size() - 1)};
}

void SmallGraphSink::node(std::uint64_t id, std::string_view label) { graph.nodes.emplace_back(NodeId{id}, intern(label)); }

void SmallGraphSink::edge(std::uint64_t s, std::string_view label, std::uint64_t t) {
  graph.edges.push_back({NodeId{s}, intern(label), NodeId{t}});
}

Maintained::Maintained(const oracle::SmallGraph& g, Level k, bool early_stop, sigstore::Scope scope,
                       em::BufferBudget budget)
    : env(budget), graph(g) {
  sigstore::StoreOptions so;
  so.scope = scope;
  store = std::make_unique<sigstore::SignatureStore>(*env.ws, env.dir.path() / "store", so);
  construct::BuildOptions bo;
  bo.early_stop = early_stop;
  auto r = construct::build_bisim(*env.ws, node_table(*env.ws, g), edge_table(*env.ws, g), k, *store, bo);
  em::drop_table(r.node_table);
  st = maintain::from_build(r);
}

maintain::UpdateStats Maintained::apply(maintain::Update u) {
  maintain::drop_unshared(st, u.state);
  st = u.state;
  return u.stats;
}

em::Table Maintained::edges(const std::vector<oracle::SmallEdge>& es) {
  oracle::SmallGraph g;
  g.edges = es;
  return edge_table(*env.ws, g);
}

maintain::UpdateStats Maintained::add_edges(const std::vector<oracle::SmallEdge>& es, maintain::MaintOptions o) {
  const em::Table t = edges(es);
  auto u = maintain::add_edges(*env.ws, st, *store, t, o);
  em::drop_table(t);
  for (const auto& e : es) graph.edges.push_back(e);
  return apply(std::move(u));
}

maintain::UpdateStats Maintained::delete_edges(const std::vector<oracle::SmallEdge>& es, maintain::MaintOptions o) {
  const em::Table t = edges(es);
  auto u = maintain::delete_edges(*env.ws, st, *store, t, o);
  em::drop_table(t);
  for (const auto& e : es) std::erase(graph.edges, e);
  return apply(std::move(u));
}

maintain::UpdateStats Maintained::add_nodes(const std::vector<std::pair<NodeId, LabelId>>& ns) {
  std::vector<NodeLabelRecord> rows;
  for (const auto& [n, l] : ns) rows.push_back({n, l});
  const auto t = em::write_all<NodeLabelCodec>(*env.ws, env.ws->temp_path("new"), rows);
  auto u = maintain::add_nodes(*env.ws, st, *store, t);
  em::drop_table(t);
  for (const auto& p : ns) graph.nodes.push_back(p);
  return apply(std::move(u));
}

maintain::UpdateStats Maintained::delete_nodes(const std::vector<NodeId>& ns, maintain::MaintOptions o) {
  auto u = maintain::delete_nodes(*env.ws, st, *store, ns, o);
  for (NodeId n : ns) {
    std::erase_if(graph.nodes, [&](const auto& p) { return p.first == n; });
    std::erase_if(graph.edges, [&](const auto& e) { return e.source == n || e.target == n; });
  }
  return apply(std::move(u));
}

maintain::UpdateStats Maintained::change_k(Level k) { return apply(maintain::change_k(*env.ws, st, *store, k)); }

std::vector<std::vector<std::uint64_t>> Maintained::columns() {
  std::vector<std::vector<std::uint64_t>> out(st.k + 1);
  for (const auto& r : read_history(*env.ws, st.node_table, st.width)) {
    for (Level j = 0; j <= st.k; ++j) out[j].push_back(r.pids[j].value);
  }
  return out;
}

std::vector<std::uint64_t> Maintained::row(NodeId n) {
  for (const auto& r : read_history(*env.ws, st.node_table, st.width)) {
    if (r.nid != n) continue;
    std::vector<std::uint64_t> c;
    for (Level j = 0; j <= st.k; ++j) c.push_back(r.pids[j].value);
    return c;
  }
  return {};
}

std::vector<oracle::Partition> Maintained::partitions() {
  return history_partitions(*env.ws, st.node_table, st.width, st.k + 1);
}

::testing::AssertionResult Maintained::matches_rebuild() {
  const auto got = partitions();
  const auto want = oracle::naive_levels(graph, st.k);
  for (Level j = 0; j <= st.k; ++j) {
    if (!(got[j] == want[j])) return ::testing::AssertionFailure() << "level " << j << " differs";
  }
  return ::testing::AssertionSuccess();
}

oracle::SmallGraph random_graph(std::uint64_t n, std::uint64_t m, std::uint32_t node_labels,
                                std::uint32_t edge_labels, std::uint64_t seed) {
  SmallGraphSink sink;
  gen::gen_random(n, m, node_labels, edge_labels, seed, sink);
  return sink.graph;
}

em::Table node_table(em::Workspace& ws, const oracle::SmallGraph& g) {
  std::vector<ConstructNodeRecord> rows;
  rows.reserve(g.nodes.size());
  for (const auto& [id, label] : g.nodes) rows.push_back({id, label, {}, {}, {}});
  return em::write_all<ConstructNodeCodec>(ws, ws.temp_path("test-nodes"), rows);
}

em::Table edge_table(em::Workspace& ws, const oracle::SmallGraph& g) {
  std::vector<EdgeRecord> rows;
  rows.reserve(g.edges.size());
  for (const auto& e : g.edges) rows.push_back({e.source, e.label, e.target, {}});
  return em::write_all<EdgeCodec>(ws, ws.temp_path("test-edges"), rows);
}

std::vector<MaintNodeRecord> read_history(em::Workspace& ws, const em::Table& history, std::size_t width) {
  return em::read_all<MaintNodeCodec>(ws, history, MaintNodeCodec(width));
}

std::vector<oracle::Partition> history_partitions(em::Workspace& ws, const em::Table& history, std::size_t width,
                                                  std::size_t levels) {
  const auto rows = read_history(ws, history, width);
  std::vector<NodeId> ids;
  for (const auto& r : rows) ids.push_back(r.nid);
  std::vector<oracle::Partition> out;
  for (std::size_t j = 0; j < levels; ++j) {
    std::vector<std::uint64_t> keys;
    for (const auto& r : rows) keys.push_back(r.pids[j].value);
    out.push_back(oracle::partition_from_keys(ids, keys));
  }
  return out;
}

}  // namespace embisim::testing
