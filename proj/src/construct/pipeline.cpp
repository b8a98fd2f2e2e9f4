#include "embisim/construct/pipeline.hpp"

#include <functional>
#include <memory>
#include <optional>

#include "embisim/em/external_sort.hpp"
#include "embisim/em/merge_join.hpp"

namespace embisim::construct {

using em::Table;
using em::TableReader;
using em::TableWriter;

Table iteration_zero(em::Workspace& ws, const Table& nodes, sigstore::SignatureStore& store) {
  em::SortOptions so;
  so.sort_key = "nLabel";
  const Table by_label = em::external_sort<ConstructNodeCodec>(ws, nodes, ByLabel{}, so);
  TableWriter<ConstructNodeCodec> out(ws, ws.temp_path("nodes"));
  std::optional<LabelId> label;
  PartitionId id{};
  em::scan<ConstructNodeCodec>(ws, by_label, [&](ConstructNodeRecord r) {
    if (!label || *label != r.label) {
      label = r.label;
      id = store.issue_id();
    }
    r.pid0 = id;
    r.pid_new = id;
    out.push(r);
  });
  em::drop_table(by_label);
  return out.finish("nLabel");
}

Table shift_pids(em::Workspace& ws, const Table& nodes) {
  TableWriter<ConstructNodeCodec> out(ws, ws.temp_path("nodes"));
  em::scan<ConstructNodeCodec>(ws, nodes, [&](ConstructNodeRecord r) {
    r.pid_old = r.pid_new;
    out.push(r);
  });
  return out.finish(nodes.sort_key);
}

FilledEdges fill_targets(em::Workspace& ws, const Table& edges_by_tid, const Table& nodes_by_nid) {
  TableWriter<EdgeCodec> out(ws, ws.temp_path("edges"));
  em::SortOptions so;
  so.dedup = true;
  so.sort_key = "sId,eLabel,pid";
  em::ExternalSorter<SigPairCodec, std::less<SigPairRecord>> f(ws, {}, {}, so);
  em::merge_join<EdgeCodec, ConstructNodeCodec>(
      ws, edges_by_tid, nodes_by_nid, [](const EdgeRecord& e) { return e.tid; },
      [](const ConstructNodeRecord& n) { return n.nid; },
      [&](EdgeRecord e, const ConstructNodeRecord* n) {
        if (!n) {
          throw InputError("edge (" + std::to_string(e.sid.value) + "," + std::to_string(e.tid.value) +
                           ") targets a node missing from the node table");
        }
        e.pid_old_t = n->pid_old;
        out.push(e);
        f.push({e.sid, e.label, e.pid_old_t});
      });
  FilledEdges r;
  r.edges = out.finish(edges_by_tid.sort_key);
  r.f = f.finish();
  return r;
}

AssignOutcome assign_signatures(em::Workspace& ws, const Table& nodes_by_nid, const Table& f, Level level,
                                sigstore::SignatureStore& store) {
  AssignOutcome res;
  auto bulk = store.begin_bulk(level);
  TableReader<SigPairCodec> fr(ws, f);
  SigPairRecord p{};
  bool have = fr.next(p);
  std::vector<SignaturePair> pairs;
  const std::uint64_t limit = store.options().max_signature_bytes;
  em::scan<ConstructNodeCodec>(ws, nodes_by_nid, [&](const ConstructNodeRecord& n) {
    if (have && p.sid < n.nid) {
      throw InputError("edge source " + std::to_string(p.sid.value) + " is missing from the node table");
    }
    pairs.clear();
    while (have && p.sid == n.nid) {
      pairs.push_back({p.label, p.pid});
      if (canonical_size(pairs.size()) > limit) {
        throw InputError("signature of node " + std::to_string(n.nid.value) + " exceeds the limit of " +
                         std::to_string(limit) + " bytes");
      }
      have = fr.next(p);
    }
    res.max_signature_pairs = std::max<std::uint64_t>(res.max_signature_pairs, pairs.size());
    bulk.add(n.nid, Signature::from_sorted(n.pid0, pairs));
  });
  if (have) throw InputError("edge source " + std::to_string(p.sid.value) + " is missing from the node table");
  auto out = bulk.finish();
  res.assignments = out.assignments;
  res.partition_count = out.distinct;
  res.issued = out.issued;
  return res;
}

AppliedColumn apply_assignments(em::Workspace& ws, const Table& nodes_by_nid, const Table& assignments) {
  TableWriter<ConstructNodeCodec> out(ws, ws.temp_path("nodes"));
  TableWriter<U64Codec> col(ws, ws.temp_path("column"));
  TableReader<AssignmentCodec> ar(ws, assignments);
  AssignmentRecord a{};
  em::scan<ConstructNodeCodec>(ws, nodes_by_nid, [&](ConstructNodeRecord n) {
    if (!ar.next(a) || a.nid != n.nid) {
      throw IoError("assignment table out of step with node table at node " + std::to_string(n.nid.value));
    }
    n.pid_new = a.pid;
    out.push(n);
    col.push(a.pid.value);
  });
  AppliedColumn r;
  r.nodes = out.finish(nodes_by_nid.sort_key);
  r.column = col.finish("nId");
  return r;
}

Table assemble_history(em::Workspace& ws, const Table& nodes_by_nid, const std::vector<Table>& columns,
                       std::size_t width) {
  const MaintNodeCodec codec(width);
  TableWriter<MaintNodeCodec> out(ws, ws.temp_path("history"), codec);
  std::vector<std::unique_ptr<TableReader<U64Codec>>> readers;
  for (const auto& c : columns) readers.push_back(std::make_unique<TableReader<U64Codec>>(ws, c));
  MaintNodeRecord m;
  m.pids.resize(width);
  em::scan<ConstructNodeCodec>(ws, nodes_by_nid, [&](const ConstructNodeRecord& n) {
    m.nid = n.nid;
    m.label = n.label;
    m.pids[0] = n.pid0;
    for (std::size_t j = 1; j < width; ++j) {
      if (j <= readers.size()) {
        std::uint64_t v = 0;
        if (!readers[j - 1]->next(v)) throw IoError("history column shorter than node table");
        m.pids[j] = PartitionId{v};
      } else {
        m.pids[j] = m.pids[j - 1];
      }
    }
    out.push(m);
  });
  return out.finish("nId");
}

}  // namespace embisim::construct
