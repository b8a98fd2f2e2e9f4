#include "embisim/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "embisim/cli/graph_directory.hpp"
#include "embisim/construct/build.hpp"
#include "embisim/core/label_dict.hpp"
#include "embisim/core/text_format.hpp"
#include "embisim/em/external_sort.hpp"
#include "embisim/em/file.hpp"
#include "embisim/generators/generators.hpp"
#include "embisim/maintain/maintain.hpp"
#include "embisim/oracle/oracle.hpp"

namespace embisim::cli {

namespace fs = std::filesystem;
using em::Table;
using em::TableWriter;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path scratch_of(const GraphDirectory& d, const RunConfig& cfg) {
  return cfg.scratch.empty() ? d.scratch_root() : cfg.scratch;
}

json io_json(const em::IoSnapshot& s) {
  json j = json::object();
  for (const auto& [k, v] : em::IoCounter::report(s)) j[k] = v;
  return j;
}

json run_json(const std::string& command, const em::IoSnapshot& io, double secs) {
  return {{"command", command}, {"io", io_json(io)}, {"seconds", secs}};
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  return in;
}

void emit_csv(const RunConfig& cfg, std::ostream& out, const std::string& csv) {
  if (cfg.stats_out.empty()) {
    out << csv;
  } else {
    em::write_file_atomic(cfg.stats_out, csv);
  }
}

std::string_view label_or_default(std::string_view l) { return l.empty() ? text::kDefaultLabel : l; }

VarRef describe_var(const GraphDirectory& d, const em::VarFile& v) {
  return {fs::relative(v.path, d.root()).string(), v.record_count, v.byte_size};
}

/// Dense ids of the wanted external ids, by one scan of the names file.
std::unordered_map<std::string, NodeId> resolve_names(em::Workspace& ws, const em::VarFile& names,
                                                      const std::unordered_set<std::string>& wanted) {
  std::unordered_map<std::string, NodeId> found;
  if (wanted.empty() || names.record_count == 0) return found;
  em::VarReader r(ws, names, em::Traffic::table);
  std::string s;
  for (std::uint64_t i = 0; r.next(s); ++i) {
    if (!s.empty() && wanted.count(s)) found.emplace(s, NodeId{i});
  }
  return found;
}

std::unordered_map<NodeId, std::string> names_of(em::Workspace& ws, const em::VarFile& names,
                                                 const std::set<NodeId>& ids) {
  std::unordered_map<NodeId, std::string> found;
  if (ids.empty() || names.record_count == 0) return found;
  em::VarReader r(ws, names, em::Traffic::table);
  std::string s;
  for (std::uint64_t i = 0; r.next(s); ++i) {
    if (ids.count(NodeId{i})) found.emplace(NodeId{i}, s);
  }
  return found;
}

/// Copy of the names file with `deleted` blanked and `appended` added.
em::VarFile rewrite_names(em::Workspace& ws, const em::VarFile& old, const std::set<NodeId>& deleted,
                          const std::vector<std::string>& appended, const fs::path& out) {
  em::VarWriter w(ws, out, em::Traffic::table);
  if (old.record_count > 0) {
    em::VarReader r(ws, old, em::Traffic::table);
    std::string s;
    for (std::uint64_t i = 0; r.next(s); ++i) w.push(deleted.count(NodeId{i}) ? std::string_view{} : s);
  }
  for (const auto& a : appended) w.push(a);
  return w.finish();
}

std::string missing_list(const std::vector<std::string>& first, std::uint64_t total, const std::string& what) {
  std::string msg = std::to_string(total) + " " + what;
  for (const auto& f : first) msg += "\n  " + f;
  if (total > first.size()) msg += "\n  ...";
  return msg;
}

struct EdgeBatch {
  Table edges;
  std::uint64_t lines = 0;
};

/// Reads an edge file and maps it onto dense ids. With `intern`, unknown
/// labels are added to the dictionary; otherwise such edges cannot exist
/// and are reported.
EdgeBatch read_edge_batch(em::Workspace& ws, const fs::path& file, const em::VarFile& names, LabelDictionary& labels,
                          bool intern) {
  struct Raw {
    std::string s, l, t;
    std::uint64_t line;
  };
  std::vector<Raw> raw;
  std::unordered_set<std::string> wanted;
  auto in = open_input(file);
  text::read_edges(in, file.string(), [&](const text::EdgeLine& e) {
    raw.push_back({std::string(e.source), std::string(label_or_default(e.label)), std::string(e.target), e.line});
    wanted.emplace(e.source);
    wanted.emplace(e.target);
  });
  const auto ids = resolve_names(ws, names, wanted);
  std::vector<std::string> bad;
  std::uint64_t bad_count = 0;
  EdgeBatch b;
  TableWriter<EdgeCodec> w(ws, ws.temp_path("batch"));
  for (const auto& r : raw) {
    const auto s = ids.find(r.s);
    const auto t = ids.find(r.t);
    const auto l = intern ? std::optional<LabelId>(labels.intern(r.l)) : labels.find(r.l);
    if (s == ids.end() || t == ids.end() || !l) {
      if (bad.size() < 10) {
        const char* why = s == ids.end() ? "unknown source" : t == ids.end() ? "unknown target" : "unknown label";
        bad.push_back(file.string() + ":" + std::to_string(r.line) + ": (" + r.s + ", " + r.l + ", " + r.t + ") " +
                      why);
      }
      ++bad_count;
      continue;
    }
    w.push({s->second, *l, t->second, {}});
  }
  if (bad_count) throw InputError(missing_list(bad, bad_count, "edges reference missing nodes or labels:"));
  b.edges = w.finish();
  b.lines = raw.size();
  return b;
}

maintain::MaintState state_of(const GraphDirectory& d) {
  const Meta& m = d.meta();
  maintain::MaintState s;
  s.node_table = d.table(*m.history);
  s.width = m.width;
  s.edge_st = d.table(m.edges_st);
  s.edge_ts = d.table(m.edges_ts);
  s.k = m.k;
  s.valid = m.valid;
  s.consistent = m.consistent;
  return s;
}

void require_built(const GraphDirectory& d) {
  if (!d.meta().built()) {
    throw InputError("graph directory " + d.root().string() + " has not been built yet (run: embisim build)");
  }
}

}  // namespace

IngestSummary cmd_ingest(const fs::path& nodes_file, const fs::path& edges_file, const fs::path& dir, bool force,
                         const RunConfig& cfg, std::ostream& err) {
  const auto t0 = Clock::now();
  auto nin = open_input(nodes_file);
  auto ein = open_input(edges_file);
  GraphDirectory d = GraphDirectory::create(dir, force);
  em::IoCounter io;
  em::Workspace ws(scratch_of(d, cfg), cfg.budget, io);

  // Labels are numbered in lexicographic order, so a first pass collects them.
  std::set<std::string, std::less<>> label_set;
  text::read_nodes(nin, nodes_file.string(),
                   [&](const text::NodeLine& l) { label_set.emplace(label_or_default(l.label)); });
  text::read_edges(ein, edges_file.string(),
                   [&](const text::EdgeLine& l) { label_set.emplace(label_or_default(l.label)); });
  const LabelDictionary labels = LabelDictionary::from_labels(label_set);
  for (auto* in : {&nin, &ein}) {
    in->clear();
    in->seekg(0);
  }

  std::unordered_map<std::string, NodeId> ids;
  em::VarWriter names(ws, d.path(d.fresh_name("names", "var")), em::Traffic::table);
  TableWriter<NodeLabelCodec> nodes(ws, ws.temp_path("nodes"));
  std::uint64_t next = 0;
  text::read_nodes(nin, nodes_file.string(), [&](const text::NodeLine& l) {
    if (!ids.emplace(std::string(l.id), NodeId{next}).second) {
      throw InputError(nodes_file.string() + ":" + std::to_string(l.line) + ": duplicate node id '" +
                       std::string(l.id) + "'");
    }
    nodes.push({NodeId{next}, labels.at(label_or_default(l.label))});
    names.push(l.id);
    ++next;
  });

  em::SortOptions so;
  so.dedup = true;
  so.sort_key = "sId,tId";
  em::ExternalSorter<EdgeCodec, BySidTid> sorter(ws, {}, {}, so);
  std::vector<std::string> dangling;
  std::uint64_t dangling_count = 0;
  text::read_edges(ein, edges_file.string(), [&](const text::EdgeLine& l) {
    const auto s = ids.find(std::string(l.source));
    const auto t = ids.find(std::string(l.target));
    if (s == ids.end() || t == ids.end()) {
      if (dangling.size() < 10) {
        dangling.push_back(edges_file.string() + ":" + std::to_string(l.line) + ": " +
                           std::string(s == ids.end() ? l.source : l.target));
      }
      ++dangling_count;
      return;
    }
    sorter.push({s->second, labels.at(label_or_default(l.label)), t->second, {}});
  });
  if (dangling_count) throw InputError(missing_list(dangling, dangling_count, "edges have an unknown endpoint:"));
  const Table est = sorter.finish();
  em::SortOptions ts;
  ts.sort_key = "tId,sId";
  const Table ets = em::external_sort<EdgeCodec>(ws, est, ByTidSid{}, ts);

  Meta m;
  m.next_node_id = next;
  m.duplicate_edges_removed = sorter.pushed() - est.record_count;
  m.labels = d.fresh_name("labels", "dict");
  labels.save(d.path(m.labels));
  m.names = describe_var(d, names.finish());
  m.nodes = d.adopt(nodes.finish("nId"), d.fresh_name("nodes", "tbl"));
  m.edges_st = d.adopt(est, d.fresh_name("edges_st", "tbl"));
  m.edges_ts = d.adopt(ets, d.fresh_name("edges_ts", "tbl"));
  m.last_run = run_json("ingest", io.snapshot(), seconds_since(t0));
  d.commit(m);

  if (m.duplicate_edges_removed) err << "warning: removed " << m.duplicate_edges_removed << " duplicate edges\n";
  return {m.nodes.record_count, m.edges_st.record_count, m.duplicate_edges_removed, labels.size()};
}

int cmd_build(const fs::path& dir, std::uint32_t k, bool overwrite, const RunConfig& cfg, std::ostream& out,
              std::ostream& err) {
  const auto t0 = Clock::now();
  GraphDirectory d = GraphDirectory::open(dir);
  if (d.meta().built() && !overwrite) {
    throw InputError("graph directory " + dir.string() + " already holds a build (pass --overwrite to replace it)");
  }
  em::IoCounter io;
  em::Workspace ws(scratch_of(d, cfg), cfg.budget, io);
  Meta m = d.meta();

  TableWriter<ConstructNodeCodec> cn(ws, ws.temp_path("nodes"));
  em::scan<NodeLabelCodec>(ws, d.table(m.nodes),
                           [&](const NodeLabelRecord& r) { cn.push({r.nid, r.label, {}, {}, {}}); });
  const Table nodes = cn.finish("nId");

  m.store_dir = "store/" + d.fresh_name("s", "d");
  sigstore::StoreOptions so;
  so.backend = cfg.backend;
  so.scope = cfg.scope;
  sigstore::SignatureStore store(ws, d.path(m.store_dir), so);
  construct::BuildOptions bo;
  bo.early_stop = cfg.early_stop;
  const construct::BuildResult r = construct::build_bisim(ws, nodes, d.table(m.edges_st), k, store, bo);
  em::drop_table(nodes);
  em::drop_table(r.node_table);

  m.history = d.adopt(r.history_table, d.fresh_name("history", "tbl"));
  m.edges_st = d.adopt(r.edge_table_st, d.fresh_name("edges_st", "tbl"));
  m.edges_ts = d.adopt(r.edge_table_ts, d.fresh_name("edges_ts", "tbl"));
  m.width = static_cast<std::uint64_t>(k) + 1;
  m.k = k;
  m.valid = k;
  m.consistent = r.k_effective;
  m.k_effective = r.k_effective;
  m.store = store.state();
  m.build_stats = json::array();
  std::string csv = construct::iteration_csv_header() + "\n";
  for (const auto& s : r.stats) {
    csv += construct::to_csv_row(s) + "\n";
    m.build_stats.push_back({{"iteration", s.iteration}, {"partition_count", s.partition_count}});
  }
  m.last_run = run_json("build", io.snapshot(), seconds_since(t0));
  d.commit(m);
  store.gc();
  emit_csv(cfg, out, csv);
  err << "built k=" << k << " (k_effective=" << r.k_effective << ") over " << m.nodes.record_count << " nodes and "
      << m.edges_st.record_count << " edges\n";
  return kExitOk;
}

int cmd_update(const fs::path& dir, UpdateKind kind, const fs::path& input, std::uint32_t new_k,
               const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  GraphDirectory d = GraphDirectory::open(dir);
  require_built(d);
  const Meta& old = d.meta();
  em::IoCounter io;
  em::Workspace ws(scratch_of(d, cfg), cfg.budget, io);
  auto store = sigstore::SignatureStore::restore(ws, d.path(old.store_dir), old.store);
  const maintain::MaintState st = state_of(d);
  maintain::MaintOptions mo;
  mo.heuristic = cfg.heuristic;
  mo.theta = cfg.theta;
  LabelDictionary labels = LabelDictionary::load(d.path(old.labels));
  const std::size_t label_count = labels.size();
  const em::VarFile names = d.var(old.names);
  Meta m = old;
  maintain::Update u;
  std::string command;

  switch (kind) {
    case UpdateKind::add_nodes: {
      command = "update add-nodes";
      std::vector<std::pair<std::string, std::string>> rows;
      std::unordered_set<std::string> wanted;
      auto in = open_input(input);
      text::read_nodes(in, input.string(), [&](const text::NodeLine& l) {
        if (!wanted.emplace(l.id).second) {
          throw InputError(input.string() + ":" + std::to_string(l.line) + ": duplicate node id '" +
                           std::string(l.id) + "'");
        }
        rows.emplace_back(std::string(l.id), std::string(label_or_default(l.label)));
      });
      const auto existing = resolve_names(ws, names, wanted);
      if (!existing.empty()) throw InputError("node '" + existing.begin()->first + "' already exists");
      TableWriter<NodeLabelCodec> batch(ws, ws.temp_path("batch"));
      std::vector<std::string> appended;
      for (const auto& [id, label] : rows) {
        batch.push({NodeId{m.next_node_id++}, labels.intern(label)});
        appended.push_back(id);
      }
      const Table added = batch.finish("nId");
      u = maintain::add_nodes(ws, st, *store, added);
      TableWriter<NodeLabelCodec> all(ws, ws.temp_path("nodes"));
      em::scan<NodeLabelCodec>(ws, d.table(old.nodes), [&](const NodeLabelRecord& r) { all.push(r); });
      em::scan<NodeLabelCodec>(ws, added, [&](const NodeLabelRecord& r) { all.push(r); });
      em::drop_table(added);
      m.nodes = d.adopt(all.finish("nId"), d.fresh_name("nodes", "tbl"));
      m.names = describe_var(d, rewrite_names(ws, names, {}, appended, d.path(d.fresh_name("names", "var"))));
      break;
    }
    case UpdateKind::add_edges:
    case UpdateKind::del_edges: {
      const bool add = kind == UpdateKind::add_edges;
      command = add ? "update add-edges" : "update del-edges";
      const EdgeBatch b = read_edge_batch(ws, input, names, labels, add);
      u = add ? maintain::add_edges(ws, st, *store, b.edges, mo) : maintain::delete_edges(ws, st, *store, b.edges, mo);
      em::drop_table(b.edges);
      break;
    }
    case UpdateKind::del_nodes: {
      command = "update del-nodes";
      std::vector<std::pair<std::string, std::uint64_t>> wanted_lines;
      std::unordered_set<std::string> wanted;
      auto in = open_input(input);
      text::read_nodes(in, input.string(), [&](const text::NodeLine& l) {
        wanted_lines.emplace_back(std::string(l.id), l.line);
        wanted.emplace(l.id);
      });
      const auto ids = resolve_names(ws, names, wanted);
      std::vector<NodeId> gone;
      for (const auto& [id, line] : wanted_lines) {
        const auto it = ids.find(id);
        if (it == ids.end()) {
          throw InputError(input.string() + ":" + std::to_string(line) + ": node '" + id + "' does not exist");
        }
        gone.push_back(it->second);
      }
      u = maintain::delete_nodes(ws, st, *store, gone, mo);
      const std::set<NodeId> gone_set(gone.begin(), gone.end());
      TableWriter<NodeLabelCodec> kept(ws, ws.temp_path("nodes"));
      em::scan<NodeLabelCodec>(ws, d.table(old.nodes), [&](const NodeLabelRecord& r) {
        if (!gone_set.count(r.nid)) kept.push(r);
      });
      m.nodes = d.adopt(kept.finish("nId"), d.fresh_name("nodes", "tbl"));
      m.names = describe_var(d, rewrite_names(ws, names, gone_set, {}, d.path(d.fresh_name("names", "var"))));
      break;
    }
    case UpdateKind::set_k:
      command = "update set-k";
      u = maintain::change_k(ws, st, *store, new_k);
      break;
  }

  auto keep_or_adopt = [&](const Table& t, const TableRef& prev, const char* stem) {
    return t.path == d.path(prev.file) ? prev : d.adopt(t, d.fresh_name(stem, "tbl"));
  };
  m.history = keep_or_adopt(u.state.node_table, *old.history, "history");
  m.edges_st = keep_or_adopt(u.state.edge_st, old.edges_st, "edges_st");
  m.edges_ts = keep_or_adopt(u.state.edge_ts, old.edges_ts, "edges_ts");
  m.width = u.state.width;
  m.k = u.state.k;
  m.valid = u.state.valid;
  m.consistent = u.state.consistent;
  if (labels.size() != label_count) {
    m.labels = d.fresh_name("labels", "dict");
    labels.save(d.path(m.labels));
  }
  m.store = store->state();
  m.last_run = run_json(command, io.snapshot(), seconds_since(t0));
  m.last_run["materialize_io"] = io_json(u.stats.materialize_io);
  d.commit(m);
  store->gc();

  std::string csv = maintain::level_csv_header() + "\n";
  for (const auto& l : u.stats.levels) csv += maintain::to_csv_row(l) + "\n";
  emit_csv(cfg, out, csv);
  err << command << ": done, k=" << m.k << "\n";
  return kExitOk;
}

int cmd_validate(const fs::path& dir, std::optional<std::uint32_t> k, const RunConfig& cfg, std::ostream& out) {
  GraphDirectory d = GraphDirectory::open(dir);
  require_built(d);
  const Meta& m = d.meta();
  const Level kk = k.value_or(m.k);
  if (kk > m.valid) {
    throw InputError("levels above " + std::to_string(m.valid) + " are not stored (raise k with update set-k)");
  }
  if (m.nodes.record_count > oracle::kMaxNodes) {
    throw InputError("graph has " + std::to_string(m.nodes.record_count) + " nodes and " +
                     std::to_string(m.edges_st.record_count) + " edges; validation is limited to " +
                     std::to_string(oracle::kMaxNodes) + " nodes");
  }
  em::IoCounter io;
  em::Workspace ws(scratch_of(d, cfg), cfg.budget, io);
  oracle::SmallGraph g;
  em::scan<NodeLabelCodec>(ws, d.table(m.nodes), [&](const NodeLabelRecord& r) { g.nodes.emplace_back(r.nid, r.label); });
  em::scan<EdgeCodec>(ws, d.table(m.edges_st),
                      [&](const EdgeRecord& e) { g.edges.push_back({e.sid, e.label, e.tid}); });
  std::vector<NodeId> ids;
  std::vector<std::vector<std::uint64_t>> cols(kk + 1);
  em::scan<MaintNodeCodec>(
      ws, d.table(*m.history),
      [&](const MaintNodeRecord& r) {
        ids.push_back(r.nid);
        for (Level j = 0; j <= kk; ++j) cols[j].push_back(r.pids[j].value);
      },
      MaintNodeCodec(m.width));

  // The pairwise oracle is quadratic in memory and cubic in time.
  constexpr std::size_t kPairwiseLimit = 2000;
  const bool pairwise = g.nodes.size() <= kPairwiseLimit;
  const auto naive = oracle::naive_levels(g, kk);
  bool ok = true;
  for (Level j = 0; j <= kk; ++j) {
    const auto stored = oracle::partition_from_keys(ids, cols[j]);
    std::vector<std::pair<const char*, oracle::Partition>> refs;
    refs.emplace_back("naive", naive[j]);
    refs.emplace_back("refine", oracle::refine_k_bisim(g, j));
    if (pairwise) refs.emplace_back("kaushik", oracle::kaushik_k_bisim(g, j));
    bool level_ok = true;
    for (const auto& [name, p] : refs) {
      const auto w = oracle::find_witness(stored, p);
      if (!w) continue;
      level_ok = false;
      const auto n = names_of(ws, d.var(m.names), {w->first, w->second});
      const bool together = stored.block_of(w->first) == stored.block_of(w->second);
      out << "level " << j << ": FAIL against " << name << ": nodes '" << n.at(w->first) << "' and '"
          << n.at(w->second) << "' are " << (together ? "together" : "apart") << " in the stored partition but "
          << (together ? "apart" : "together") << " in the oracle\n";
      break;
    }
    if (level_ok) {
      out << "level " << j << ": PASS (" << stored.block_count() << " blocks; naive, refine"
          << (pairwise ? ", kaushik" : "") << ")\n";
    }
    ok = ok && level_ok;
  }
  if (!pairwise) out << "note: pairwise oracle skipped above " << kPairwiseLimit << " nodes\n";
  out << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitMismatch;
}

int cmd_stats(const fs::path& dir, const RunConfig& cfg, std::ostream& out) {
  GraphDirectory d = GraphDirectory::open(dir);
  require_built(d);
  const Meta& m = d.meta();
  em::IoCounter io;
  em::Workspace ws(scratch_of(d, cfg), cfg.budget, io);
  out << "node_count: " << m.nodes.record_count << "\n";
  out << "edge_count: " << m.edges_st.record_count << "\n";
  out << "label_count: " << LabelDictionary::load(d.path(m.labels)).size() << "\n";
  out << "duplicate_edges_removed: " << m.duplicate_edges_removed << "\n";
  out << "k: " << m.k << "\n";
  out << "k_effective: " << m.k_effective << "\n";
  out << "valid_levels: " << m.valid << "\n";
  const MaintNodeCodec codec(m.width);
  for (Level j = 0; j <= m.k; ++j) {
    em::SortOptions so;
    so.dedup = true;
    em::ExternalSorter<U64Codec, std::less<std::uint64_t>> distinct(ws, {}, {}, so);
    em::scan<MaintNodeCodec>(
        ws, d.table(*m.history), [&](const MaintNodeRecord& r) { distinct.push(r.pids[j].value); }, codec);
    const Table t = distinct.finish();
    out << "partition_count[" << j << "]: " << t.record_count << "\n";
    em::drop_table(t);
  }
  const std::uint64_t store_entries = [&] {
    std::uint64_t n = 0;
    const json runs = m.store.value("runs", json::array());
    for (const auto& r : runs) n += r.value("count", std::uint64_t{0});
    return n;
  }();
  out << "store_backend: " << m.store.value("backend", "") << "\n";
  out << "store_scope: " << m.store.value("scope", "") << "\n";
  out << "store_entries: " << store_entries << "\n";
  out << "store_next_id: " << m.store.value("next_id", std::uint64_t{0}) << "\n";
  if (!m.last_run.empty()) {
    out << "last_run: " << m.last_run.value("command", "") << "\n";
    const json last_io = m.last_run.value("io", json::object());
    for (const auto& [key, v] : last_io.items()) {
      out << "last_run_" << key << ": " << v.get<std::uint64_t>() << "\n";
    }
    out << "last_run_seconds: " << m.last_run.value("seconds", 0.0) << "\n";
  }
  return kExitOk;
}

int cmd_generate(const GenerateSpec& spec, const fs::path& prefix, std::ostream& out) {
  struct Counting : gen::TextFileSink {
    using gen::TextFileSink::TextFileSink;
    std::uint64_t nodes = 0, edges = 0;
    void node(std::uint64_t id, std::string_view label) override {
      ++nodes;
      gen::TextFileSink::node(id, label);
    }
    void edge(std::uint64_t s, std::string_view label, std::uint64_t t) override {
      ++edges;
      gen::TextFileSink::edge(s, label, t);
    }
  };
  if (!prefix.parent_path().empty()) fs::create_directories(prefix.parent_path());
  Counting sink(prefix);
  gen::Limits lim;
  lim.max_elements = spec.max_elements;
  std::optional<gen::Edge> ins;
  if (spec.kind == "dbest") {
    ins = gen::gen_dbest(spec.arity, spec.height, sink, lim);
  } else if (spec.kind == "dworst") {
    ins = gen::gen_dworst(spec.n, sink, lim);
  } else if (spec.kind == "random") {
    gen::gen_random(spec.n, spec.m, spec.node_labels, spec.edge_labels, spec.seed, sink, lim);
  } else {
    throw InputError("unknown generator '" + spec.kind + "' (expected dbest, dworst or random)");
  }
  sink.commit(ins);
  out << "nodes: " << sink.nodes << "\nedges: " << sink.edges << "\n";
  if (ins) out << "insertion_edge: " << ins->source << " " << ins->label << " " << ins->target << "\n";
  return kExitOk;
}

}  // namespace embisim::cli
