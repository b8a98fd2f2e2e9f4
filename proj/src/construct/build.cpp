#include "embisim/construct/build.hpp"

#include <chrono>
#include <sstream>

#include "embisim/construct/pipeline.hpp"
#include "embisim/em/external_sort.hpp"

namespace embisim::construct {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

}  // namespace

std::string iteration_csv_header() {
  return "iteration,partition_count,max_signature_pairs,new_ids,table_read_bytes,table_write_bytes,"
         "store_read_bytes,store_write_bytes,prepare_seconds,signature_seconds";
}

std::string to_csv_row(const IterationStats& s) {
  std::ostringstream o;
  o << s.iteration << ',' << s.partition_count << ',' << s.max_signature_pairs << ',' << s.new_ids << ','
    << s.io.table_read << ',' << s.io.table_write << ',' << s.io.store_read << ',' << s.io.store_write << ','
    << s.prepare_seconds << ',' << s.signature_seconds;
  return o.str();
}

BuildResult build_bisim(em::Workspace& ws, const em::Table& nodes, const em::Table& edges, Level k,
                        sigstore::SignatureStore& store, BuildOptions opts) {
  em::IoCounter& io = ws.io();
  const em::IoSnapshot start_io = io.snapshot();
  BuildResult res;
  res.k = k;

  IterationStats s0;
  auto t = Clock::now();
  const std::uint64_t issued_before = store.counters().issued;
  em::Table nt = iteration_zero(ws, nodes, store);
  s0.partition_count = store.counters().issued - issued_before;
  s0.new_ids = s0.partition_count;
  s0.prepare_seconds = seconds_since(t);
  s0.io = io.snapshot() - start_io;
  res.stats.push_back(s0);

  em::Table et = edges;
  bool own_et = false;
  std::vector<em::Table> columns;
  std::uint64_t prev = s0.partition_count;

  for (Level j = 1; j <= k; ++j) {
    IterationStats s;
    s.iteration = j;
    const em::IoSnapshot it_io = io.snapshot();
    t = Clock::now();

    em::Table shifted = shift_pids(ws, nt);
    em::drop_table(nt);
    nt = shifted;
    if (j == 1) {
      em::SortOptions so;
      so.sort_key = "nId";
      em::Table sorted = em::external_sort<ConstructNodeCodec>(ws, nt, ByNid{}, so);
      em::drop_table(nt);
      nt = sorted;
      so.sort_key = "tId,sId";
      et = em::external_sort<EdgeCodec>(ws, edges, ByTidSid{}, so);
      own_et = true;
    }
    FilledEdges fe = fill_targets(ws, et, nt);
    em::drop_table(et);
    et = fe.edges;
    s.prepare_seconds = seconds_since(t);

    t = Clock::now();
    AssignOutcome ao = assign_signatures(ws, nt, fe.f, j, store);
    em::drop_table(fe.f);
    if (opts.early_stop && early_stop_check(prev, ao.partition_count)) {
      em::drop_table(ao.assignments);
      break;
    }
    AppliedColumn ac = apply_assignments(ws, nt, ao.assignments);
    em::drop_table(ao.assignments);
    em::drop_table(nt);
    nt = ac.nodes;
    columns.push_back(ac.column);
    s.signature_seconds = seconds_since(t);

    s.partition_count = ao.partition_count;
    s.max_signature_pairs = ao.max_signature_pairs;
    s.new_ids = ao.issued;
    s.io = io.snapshot() - it_io;
    res.stats.push_back(s);
    res.k_effective = j;
    prev = ao.partition_count;
  }

  em::SortOptions so;
  if (nt.sort_key != "nId") {
    so.sort_key = "nId";
    em::Table sorted = em::external_sort<ConstructNodeCodec>(ws, nt, ByNid{}, so);
    em::drop_table(nt);
    nt = sorted;
  }
  if (!own_et) {
    so.sort_key = "tId,sId";
    et = em::external_sort<EdgeCodec>(ws, edges, ByTidSid{}, so);
  }
  res.node_table = nt;
  res.history_table = assemble_history(ws, nt, columns, static_cast<std::size_t>(k) + 1);
  for (const auto& c : columns) em::drop_table(c);
  res.edge_table_ts = et;
  so.sort_key = "sId,tId";
  res.edge_table_st = em::external_sort<EdgeCodec>(ws, et, BySidTid{}, so);
  res.total_io = io.snapshot() - start_io;
  return res;
}

void drop(const BuildResult& r) {
  em::drop_table(r.node_table);
  em::drop_table(r.history_table);
  em::drop_table(r.edge_table_st);
  em::drop_table(r.edge_table_ts);
}

}  // namespace embisim::construct
