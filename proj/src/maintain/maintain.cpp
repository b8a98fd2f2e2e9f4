#include "embisim/maintain/maintain.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "embisim/construct/pipeline.hpp"
#include "embisim/em/change_queue.hpp"
#include "embisim/em/external_sort.hpp"
#include "embisim/em/merge_join.hpp"
#include "embisim/em/merge_ops.hpp"

namespace embisim::maintain {

namespace {

using em::Table;
using em::TableReader;
using em::TableWriter;
using sigstore::SignatureStore;

bool is_input(const MaintState& in, const Table& t) {
  return t.path == in.node_table.path || t.path == in.edge_st.path || t.path == in.edge_ts.path;
}

/// Puts `fresh` into `slot`, dropping the previous table unless the input
/// state still refers to it.
void replace(const MaintState& in, Table& slot, Table fresh) {
  if (!slot.path.empty() && !is_input(in, slot) && slot.path != fresh.path) em::drop_table(slot);
  slot = std::move(fresh);
}

void require_global(const SignatureStore& store) {
  if (store.options().scope != sigstore::Scope::global_counter) {
    throw ConfigError("maintenance requires a signature store with a global numbering scope");
  }
}

std::string edge_text(const EdgeRecord& e) {
  return "edge (" + std::to_string(e.sid.value) + "," + std::to_string(e.label.value) + "," +
         std::to_string(e.tid.value) + ")";
}

struct ByFirst {
  bool operator()(const U64PairCodec::value_type& a, const U64PairCodec::value_type& b) const {
    return a.first < b.first;
  }
};

em::SortOptions dedup_opts(std::string key = {}) {
  em::SortOptions o;
  o.dedup = true;
  o.sort_key = std::move(key);
  return o;
}

em::SortOptions keyed(std::string key) {
  em::SortOptions o;
  o.sort_key = std::move(key);
  return o;
}

/// Sort buffer for several sorters alive at once.
em::SortOptions shared_dedup(const em::Workspace& ws, std::size_t ways) {
  em::SortOptions o;
  o.dedup = true;
  o.memory_bytes = std::max<std::uint64_t>(2ull * ws.budget().page_size,
                                           ws.budget().table_buffer_bytes / std::max<std::size_t>(1, ways));
  return o;
}

Table sorted_ids(em::Workspace& ws, const std::vector<NodeId>& ids) {
  std::vector<std::uint64_t> v;
  v.reserve(ids.size());
  for (auto n : ids) v.push_back(n.value);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return em::write_all<U64Codec>(ws, ws.temp_path("ids"), v, {}, "nId");
}

/// Recomputes columns from..to with the construction pipeline, seeded with
/// column from-1, and writes them into st.node_table (widening it when
/// needed). One stats row per recomputed level.
void recompute_levels(em::Workspace& ws, const MaintState& input, MaintState& st, SignatureStore& store,
                      Level from, Level to, std::vector<LevelStats>* rows) {
  using namespace construct;
  if (from > to) return;
  const std::size_t w = st.width;
  const MaintNodeCodec codec(w);
  TableWriter<ConstructNodeCodec> seed(ws, ws.temp_path("seed"));
  em::scan<MaintNodeCodec>(
      ws, st.node_table,
      [&](const MaintNodeRecord& m) { seed.push({m.nid, m.label, m.pids[0], {}, m.pids[from - 1]}); }, codec);
  Table nt = seed.finish("nId");
  Table et = st.edge_ts;
  bool own_et = false;
  std::vector<Table> cols;
  std::vector<em::IoSnapshot> ios;
  for (Level l = from; l <= to; ++l) {
    const em::IoSnapshot io0 = ws.io().snapshot();
    Table shifted = shift_pids(ws, nt);
    em::drop_table(nt);
    FilledEdges fe = fill_targets(ws, et, shifted);
    if (own_et) em::drop_table(et);
    et = fe.edges;
    own_et = true;
    AssignOutcome ao = assign_signatures(ws, shifted, fe.f, l, store);
    em::drop_table(fe.f);
    AppliedColumn ac = apply_assignments(ws, shifted, ao.assignments);
    em::drop_table(ao.assignments);
    em::drop_table(shifted);
    nt = ac.nodes;
    cols.push_back(ac.column);
    ios.push_back(ws.io().snapshot() - io0);
  }
  if (own_et) em::drop_table(et);
  em::drop_table(nt);

  const em::IoSnapshot zip0 = ws.io().snapshot();
  const std::size_t levels = to - from + 1;
  const std::size_t w2 = std::max<std::size_t>(w, to + 1);
  TableWriter<MaintNodeCodec> out(ws, ws.temp_path("nodes"), MaintNodeCodec(w2));
  std::vector<std::unique_ptr<TableReader<U64Codec>>> readers;
  std::vector<std::unique_ptr<em::ExternalSorter<U64Codec, std::less<std::uint64_t>>>> parts;
  for (const auto& c : cols) {
    readers.push_back(std::make_unique<TableReader<U64Codec>>(ws, c));
    parts.push_back(std::make_unique<em::ExternalSorter<U64Codec, std::less<std::uint64_t>>>(
        ws, U64Codec{}, std::less<std::uint64_t>{}, shared_dedup(ws, 2 * levels)));
  }
  std::vector<std::uint64_t> changed(levels);
  em::scan<MaintNodeCodec>(
      ws, st.node_table,
      [&](MaintNodeRecord m) {
        m.pids.resize(w2);
        for (std::size_t i = 0; i < levels; ++i) {
          const Level l = from + static_cast<Level>(i);
          std::uint64_t v = 0;
          if (!readers[i]->next(v)) throw IoError("recomputed column shorter than node table");
          if (l <= st.valid && m.pids[l].value != v) {
            ++changed[i];
            parts[i]->push(m.pids[l].value);
            parts[i]->push(v);
          }
          m.pids[l] = PartitionId{v};
        }
        out.push(m);
      },
      codec);
  readers.clear();
  for (const auto& c : cols) em::drop_table(c);
  replace(input, st.node_table, out.finish("nId"));
  st.width = w2;
  const em::IoSnapshot zip_io = ws.io().snapshot() - zip0;
  if (!rows) {
    for (auto& p : parts) em::drop_table(p->finish());
    return;
  }
  for (std::size_t i = 0; i < levels; ++i) {
    LevelStats s;
    s.level = from + static_cast<Level>(i);
    s.checked_nodes = st.node_table.record_count;
    s.changed_nodes = changed[i];
    const Table p = parts[i]->finish();
    s.changed_partitions = p.record_count;
    em::drop_table(p);
    s.rebuilt = true;
    s.io = ios[i];
    if (i + 1 == levels) s.io += zip_io;
    rows->push_back(s);
  }
}

/// Replaces column j for the nodes in `changes` (both sorted by nId).
Table apply_column(em::Workspace& ws, const Table& nodes, std::size_t width, const Table& changes, Level j) {
  const MaintNodeCodec codec(width);
  TableWriter<MaintNodeCodec> out(ws, ws.temp_path("nodes"), codec);
  TableReader<AssignmentCodec> cr(ws, changes);
  AssignmentRecord c{};
  bool have = cr.next(c);
  em::scan<MaintNodeCodec>(
      ws, nodes,
      [&](MaintNodeRecord m) {
        if (have && c.nid == m.nid) {
          m.pids[j] = c.pid;
          have = cr.next(c);
        }
        out.push(m);
      },
      codec);
  if (have) throw IoError("pid change for unknown node " + std::to_string(c.nid.value));
  return out.finish("nId");
}

/// Drains the queue level by level, recomputing the signatures of queued
/// nodes and pushing parents of changed nodes to the next level.
void propagate(em::Workspace& ws, const MaintState& input, MaintState& st, SignatureStore& store,
               em::ChangeQueue& q, const MaintOptions& opts, UpdateStats& stats) {
  std::vector<LevelStats> rows(st.k);
  for (Level j = 1; j <= st.k; ++j) rows[j - 1].level = j;
  const std::uint64_t node_count = st.node_table.record_count;
  while (auto d = q.drain_level()) {
    const Level j = d->level;
    const Table m_ids = d->ids;
    const em::IoSnapshot io0 = ws.io().snapshot();
    LevelStats& ls = rows[j - 1];
    ls.checked_nodes = m_ids.record_count;

    if (opts.heuristic && switch_heuristic(m_ids.record_count, node_count, opts.theta)) {
      em::drop_table(m_ids);
      while (auto rest = q.drain_level()) em::drop_table(rest->ids);
      std::vector<LevelStats> rebuilt;
      recompute_levels(ws, input, st, store, j, st.k, &rebuilt);
      for (const auto& r : rebuilt) rows[r.level - 1] = r;
      rows[j - 1].io += ws.io().snapshot() - io0 - rebuilt.front().io;
      break;
    }

    const MaintNodeCodec codec(st.width);
    // Outgoing edges of the queued nodes, by target.
    em::ExternalSorter<EdgeCodec, ByTid> by_target(ws, {}, {}, keyed("tId"));
    em::semijoin<EdgeCodec>(
        ws, st.edge_st, m_ids, [](const EdgeRecord& e) { return e.sid.value; },
        [&](const EdgeRecord& e) { by_target.push(e); });
    const Table f = by_target.finish();
    // Signature elements with the children's level j-1 ids.
    em::ExternalSorter<SigPairCodec, std::less<SigPairRecord>> h_sorter(ws, {}, {}, dedup_opts("sId,eLabel,pid"));
    em::merge_join<EdgeCodec, MaintNodeCodec>(
        ws, f, st.node_table, [](const EdgeRecord& e) { return e.tid; },
        [](const MaintNodeRecord& n) { return n.nid; },
        [&](const EdgeRecord& e, const MaintNodeRecord* n) {
          if (!n) throw IoError(edge_text(e) + " points to a node missing from the node table");
          h_sorter.push({e.sid, e.label, n->pids[j - 1]});
        },
        EdgeCodec{}, codec);
    em::drop_table(f);
    const Table h = h_sorter.finish();

    TableWriter<AssignmentCodec> changes(ws, ws.temp_path("changes"));
    TableWriter<U64Codec> changed_ids(ws, ws.temp_path("changed"));
    em::ExternalSorter<U64Codec, std::less<std::uint64_t>> parts(ws, {}, {}, shared_dedup(ws, 2));
    {
      TableReader<SigPairCodec> hr(ws, h);
      SigPairRecord p{};
      bool have = hr.next(p);
      std::vector<SignaturePair> pairs;
      em::semijoin<MaintNodeCodec>(
          ws, st.node_table, m_ids, [](const MaintNodeRecord& n) { return n.nid.value; },
          [&](const MaintNodeRecord& n) {
            while (have && p.sid < n.nid) have = hr.next(p);
            pairs.clear();
            while (have && p.sid == n.nid) {
              pairs.push_back({p.label, p.pid});
              have = hr.next(p);
            }
            const PartitionId id = store.insert(j, Signature::from_sorted(n.pids[0], pairs));
            if (id != n.pids[j]) {
              changes.push({n.nid, id});
              changed_ids.push(n.nid.value);
              parts.push(n.pids[j].value);
              parts.push(id.value);
            }
          },
          codec);
    }
    em::drop_table(h);
    const Table ch = changes.finish("nId");
    const Table ch_ids = changed_ids.finish("nId");
    const Table pt = parts.finish();
    ls.changed_nodes = ch.record_count;
    ls.changed_partitions = pt.record_count;
    em::drop_table(pt);
    if (!ch.empty()) {
      replace(input, st.node_table, apply_column(ws, st.node_table, st.width, ch, j));
      if (j < st.k) {
        em::semijoin<EdgeCodec>(
            ws, st.edge_ts, ch_ids, [](const EdgeRecord& e) { return e.tid.value; },
            [&](const EdgeRecord& e) { q.push(j + 1, e.sid); });
      }
    }
    em::drop_table(ch);
    em::drop_table(ch_ids);
    em::drop_table(m_ids);
    ls.io = ws.io().snapshot() - io0;
  }
  stats.levels = std::move(rows);
}

/// Pushes (j, s) for every distinct source of `edges_st` (sorted by sId)
/// and every level 1..k, skipping nodes in `skip` (sorted).
void enqueue_sources(em::Workspace& ws, em::ChangeQueue& q, const Table& edges_st, Level k,
                     const std::vector<NodeId>& skip = {}) {
  std::optional<NodeId> last;
  em::scan<EdgeCodec>(ws, edges_st, [&](const EdgeRecord& e) {
    if (last && *last == e.sid) return;
    last = e.sid;
    if (std::binary_search(skip.begin(), skip.end(), e.sid)) return;
    for (Level j = 1; j <= k; ++j) q.push(j, e.sid);
  });
}

void finish_state(MaintState& st) {
  st.valid = st.k;
  st.consistent = std::min(st.consistent, st.k);
}

}  // namespace

MaintState from_build(const construct::BuildResult& r) {
  MaintState s;
  s.node_table = r.history_table;
  s.width = static_cast<std::size_t>(r.k) + 1;
  s.edge_st = r.edge_table_st;
  s.edge_ts = r.edge_table_ts;
  s.k = r.k;
  s.valid = r.k;
  s.consistent = r.k_effective;
  return s;
}

std::string level_csv_header() {
  return "level,checked_nodes,changed_nodes,changed_partitions,rebuilt,table_read_bytes,table_write_bytes,"
         "store_read_bytes,store_write_bytes";
}

std::string to_csv_row(const LevelStats& s) {
  std::ostringstream o;
  o << s.level << ',' << s.checked_nodes << ',' << s.changed_nodes << ',' << s.changed_partitions << ','
    << (s.rebuilt ? 1 : 0) << ',' << s.io.table_read << ',' << s.io.table_write << ',' << s.io.store_read << ','
    << s.io.store_write;
  return o.str();
}

bool switch_heuristic(std::uint64_t queued, std::uint64_t node_count, double theta) {
  if (node_count == 0) return false;
  return static_cast<double>(queued) / static_cast<double>(node_count) > theta;
}

void drop_unshared(const MaintState& s, const MaintState& keep) {
  for (const Table* t : {&s.node_table, &s.edge_st, &s.edge_ts}) {
    if (!t->path.empty() && !is_input(keep, *t)) em::drop_table(*t);
  }
}

Update materialize(em::Workspace& ws, const MaintState& st, SignatureStore& store) {
  Update u{st, {}};
  if (st.consistent >= st.k) return u;
  const em::IoSnapshot io0 = ws.io().snapshot();
  recompute_levels(ws, st, u.state, store, st.consistent + 1, st.k, nullptr);
  u.state.consistent = st.k;
  u.state.valid = std::max(st.valid, st.k);
  u.stats.io = ws.io().snapshot() - io0;
  u.stats.materialize_io = u.stats.io;
  return u;
}

Update change_k(em::Workspace& ws, const MaintState& st, SignatureStore& store, Level new_k) {
  Update u{st, {}};
  if (new_k <= st.valid) {
    u.state.k = new_k;
    return u;
  }
  require_global(store);
  const em::IoSnapshot io0 = ws.io().snapshot();
  recompute_levels(ws, st, u.state, store, st.valid + 1, new_k, &u.stats.levels);
  if (st.consistent == st.valid) u.state.consistent = new_k;
  u.state.k = new_k;
  u.state.valid = new_k;
  u.stats.io = ws.io().snapshot() - io0;
  return u;
}

Update add_nodes(em::Workspace& ws, const MaintState& st, SignatureStore& store, const Table& nodes) {
  require_global(store);
  const em::IoSnapshot io0 = ws.io().snapshot();
  Update u = materialize(ws, st, store);
  MaintState& s = u.state;
  const MaintNodeCodec codec(s.width);

  // Reject ids already in use, within the batch or in the graph.
  const Table by_nid = em::external_sort<NodeLabelCodec>(ws, nodes, ByNid{}, keyed("nId"));
  {
    std::optional<NodeId> last;
    em::merge_join<NodeLabelCodec, MaintNodeCodec>(
        ws, by_nid, s.node_table, [](const NodeLabelRecord& r) { return r.nid; },
        [](const MaintNodeRecord& r) { return r.nid; },
        [&](const NodeLabelRecord& r, const MaintNodeRecord* hit) {
          if (hit || (last && *last == r.nid)) {
            throw InputError("node " + std::to_string(r.nid.value) + " already exists");
          }
          last = r.nid;
        },
        NodeLabelCodec{}, codec);
  }
  em::drop_table(by_nid);

  // Existing label -> pid0.
  em::ExternalSorter<U64PairCodec, ByFirst> label_map(ws, {}, {}, dedup_opts("nLabel"));
  em::scan<MaintNodeCodec>(
      ws, s.node_table, [&](const MaintNodeRecord& m) { label_map.push({m.label.value, m.pids[0].value}); }, codec);
  const Table labels = label_map.finish();
  const Table by_label = em::external_sort<NodeLabelCodec>(ws, nodes, ByLabel{}, keyed("nLabel"));

  std::map<std::uint64_t, std::vector<PartitionId>> level_ids;
  em::ExternalSorter<MaintNodeCodec, ByNid> rows(ws, codec, {}, keyed("nId"));
  {
    TableReader<U64PairCodec> lr(ws, labels);
    U64PairCodec::value_type l{};
    bool have = lr.next(l);
    std::optional<std::pair<LabelId, PartitionId>> fresh;
    em::scan<NodeLabelCodec>(ws, by_label, [&](const NodeLabelRecord& n) {
      while (have && l.first < n.label.value) have = lr.next(l);
      PartitionId pid0;
      if (have && l.first == n.label.value) {
        pid0 = PartitionId{l.second};
      } else {
        if (!fresh || fresh->first != n.label) fresh = std::make_pair(n.label, store.issue_id());
        pid0 = fresh->second;
      }
      auto& ids = level_ids[pid0.value];
      if (ids.empty()) {
        ids.push_back(pid0);
        const Signature sink = Signature::from_sorted(pid0, {});
        for (Level j = 1; j <= s.k; ++j) ids.push_back(store.insert(j, sink));
      }
      MaintNodeRecord m{n.nid, n.label, std::vector<PartitionId>(s.width)};
      for (std::size_t j = 0; j < s.width; ++j) m.pids[j] = ids[std::min<std::size_t>(j, s.k)];
      rows.push(std::move(m));
    });
  }
  em::drop_table(labels);
  em::drop_table(by_label);
  const Table added = rows.finish();
  replace(st, s.node_table,
          em::merge_union<MaintNodeCodec>(
              ws, s.node_table, added, ByNid{},
              [](const MaintNodeRecord& r) { return "node " + std::to_string(r.nid.value); },
              ws.temp_path("nodes"), codec));
  em::drop_table(added);
  finish_state(s);
  for (Level j = 1; j <= s.k; ++j) {
    LevelStats ls;
    ls.level = j;
    u.stats.levels.push_back(ls);
  }
  u.stats.io = ws.io().snapshot() - io0;
  return u;
}

Update add_edges(em::Workspace& ws, const MaintState& st, SignatureStore& store, const Table& edges,
                 MaintOptions opts) {
  require_global(store);
  const em::IoSnapshot io0 = ws.io().snapshot();
  Update u = materialize(ws, st, store);
  MaintState& s = u.state;
  const MaintNodeCodec codec(s.width);

  // New edges with pidOldT set from column 0, in both orders.
  em::ExternalSorter<EdgeCodec, ByTidSid> ts_sorter(ws, {}, {}, keyed("tId,sId"));
  {
    const Table st_sorted = em::external_sort<EdgeCodec>(ws, edges, BySidTid{}, keyed("sId,tId"));
    std::optional<EdgeRecord> last;
    em::merge_join<EdgeCodec, MaintNodeCodec>(
        ws, st_sorted, s.node_table, [](const EdgeRecord& e) { return e.sid; },
        [](const MaintNodeRecord& n) { return n.nid; },
        [&](EdgeRecord e, const MaintNodeRecord* n) {
          if (!n) throw InputError(edge_text(e) + " has a missing source node");
          e.pid_old_t = {};
          if (last && !BySidTid{}(*last, e)) return;  // duplicate within the batch
          last = e;
          ts_sorter.push(e);
        },
        EdgeCodec{}, codec);
    em::drop_table(st_sorted);
  }
  const Table ts_raw = ts_sorter.finish();
  TableWriter<EdgeCodec> ts_w(ws, ws.temp_path("new_ts"));
  em::merge_join<EdgeCodec, MaintNodeCodec>(
      ws, ts_raw, s.node_table, [](const EdgeRecord& e) { return e.tid; },
      [](const MaintNodeRecord& n) { return n.nid; },
      [&](EdgeRecord e, const MaintNodeRecord* n) {
        if (!n) throw InputError(edge_text(e) + " has a missing target node");
        e.pid_old_t = n->pids[0];
        ts_w.push(e);
      },
      EdgeCodec{}, codec);
  em::drop_table(ts_raw);
  const Table new_ts = ts_w.finish("tId,sId");
  const Table new_st = em::external_sort<EdgeCodec>(ws, new_ts, BySidTid{}, keyed("sId,tId"));

  replace(st, s.edge_st,
          em::merge_union<EdgeCodec>(ws, s.edge_st, new_st, BySidTid{}, edge_text, ws.temp_path("edges_st")));
  replace(st, s.edge_ts,
          em::merge_union<EdgeCodec>(ws, s.edge_ts, new_ts, ByTidSid{}, edge_text, ws.temp_path("edges_ts")));
  em::drop_table(new_ts);

  em::ChangeQueue q(ws);
  enqueue_sources(ws, q, new_st, s.k);
  em::drop_table(new_st);
  propagate(ws, st, s, store, q, opts, u.stats);
  finish_state(s);
  u.stats.io = ws.io().snapshot() - io0;
  return u;
}

Update delete_edges(em::Workspace& ws, const MaintState& st, SignatureStore& store, const Table& edges,
                    MaintOptions opts) {
  require_global(store);
  const em::IoSnapshot io0 = ws.io().snapshot();
  Update u = materialize(ws, st, store);
  MaintState& s = u.state;

  // Normalize: clear pidOldT, dedup.
  em::ExternalSorter<EdgeCodec, BySidTid> st_sorter(ws, {}, {}, dedup_opts("sId,tId"));
  em::scan<EdgeCodec>(ws, edges, [&](EdgeRecord e) {
    e.pid_old_t = {};
    st_sorter.push(e);
  });
  const Table gone_st = st_sorter.finish();
  const Table gone_ts = em::external_sort<EdgeCodec>(ws, gone_st, ByTidSid{}, keyed("tId,sId"));
  replace(st, s.edge_st,
          em::merge_subtract<EdgeCodec>(ws, s.edge_st, gone_st, BySidTid{}, edge_text, ws.temp_path("edges_st")));
  replace(st, s.edge_ts,
          em::merge_subtract<EdgeCodec>(ws, s.edge_ts, gone_ts, ByTidSid{}, edge_text, ws.temp_path("edges_ts")));
  em::drop_table(gone_ts);

  em::ChangeQueue q(ws);
  enqueue_sources(ws, q, gone_st, s.k);
  em::drop_table(gone_st);
  propagate(ws, st, s, store, q, opts, u.stats);
  finish_state(s);
  u.stats.io = ws.io().snapshot() - io0;
  return u;
}

Update delete_nodes(em::Workspace& ws, const MaintState& st, SignatureStore& store, std::vector<NodeId> nodes,
                    MaintOptions opts) {
  require_global(store);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const em::IoSnapshot io0 = ws.io().snapshot();
  Update u = materialize(ws, st, store);
  MaintState& s = u.state;
  const MaintNodeCodec codec(s.width);
  const Table keys = sorted_ids(ws, nodes);

  // Every node must exist.
  {
    std::size_t i = 0;
    em::semijoin<MaintNodeCodec>(
        ws, s.node_table, keys, [](const MaintNodeRecord& m) { return m.nid.value; },
        [&](const MaintNodeRecord& m) {
          if (nodes[i] != m.nid) throw InputError("node " + std::to_string(nodes[i].value) + " does not exist");
          ++i;
        },
        codec);
    if (i != nodes.size()) throw InputError("node " + std::to_string(nodes[i].value) + " does not exist");
  }

  // Incident edges in both directions.
  em::ExternalSorter<EdgeCodec, BySidTid> incident(ws, {}, {}, dedup_opts("sId,tId"));
  auto collect = [&](const EdgeRecord& e) {
    EdgeRecord c = e;
    c.pid_old_t = {};
    incident.push(c);
  };
  em::semijoin<EdgeCodec>(ws, s.edge_st, keys, [](const EdgeRecord& e) { return e.sid.value; }, collect);
  em::semijoin<EdgeCodec>(ws, s.edge_ts, keys, [](const EdgeRecord& e) { return e.tid.value; }, collect);
  const Table gone_st = incident.finish();
  const Table gone_ts = em::external_sort<EdgeCodec>(ws, gone_st, ByTidSid{}, keyed("tId,sId"));
  replace(st, s.edge_st,
          em::merge_subtract<EdgeCodec>(ws, s.edge_st, gone_st, BySidTid{}, edge_text, ws.temp_path("edges_st")));
  replace(st, s.edge_ts,
          em::merge_subtract<EdgeCodec>(ws, s.edge_ts, gone_ts, ByTidSid{}, edge_text, ws.temp_path("edges_ts")));
  em::drop_table(gone_ts);

  // Remove the rows.
  {
    TableWriter<MaintNodeCodec> out(ws, ws.temp_path("nodes"), codec);
    em::scan<MaintNodeCodec>(
        ws, s.node_table,
        [&](const MaintNodeRecord& m) {
          if (!std::binary_search(nodes.begin(), nodes.end(), m.nid)) out.push(m);
        },
        codec);
    replace(st, s.node_table, out.finish("nId"));
  }
  em::drop_table(keys);

  em::ChangeQueue q(ws);
  enqueue_sources(ws, q, gone_st, s.k, nodes);
  em::drop_table(gone_st);
  propagate(ws, st, s, store, q, opts, u.stats);
  finish_state(s);
  u.stats.io = ws.io().snapshot() - io0;
  return u;
}

}  // namespace embisim::maintain
