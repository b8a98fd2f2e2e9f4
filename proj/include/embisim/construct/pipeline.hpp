#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "embisim/core/records.hpp"
#include "embisim/core/types.hpp"
#include "embisim/em/table.hpp"
#include "embisim/sigstore/signature_store.hpp"

// Building blocks of the construction pipeline. Every function reads its
// inputs sequentially and writes fresh output tables; inputs are left in
// place for the caller to drop.

namespace embisim::construct {

/// Sorts the node table by label and gives every distinct label a fresh id
/// from the store counter, written to pid0 and pidNew. Labels receive ids
/// in ascending label order. Output is sorted by nLabel.
em::Table iteration_zero(em::Workspace& ws, const em::Table& nodes, sigstore::SignatureStore& store);

/// pidOld := pidNew on every row.
em::Table shift_pids(em::Workspace& ws, const em::Table& nodes);

/// Fills pidOldT of every edge from pidOld of its target. `edges` must be
/// sorted by tId and `nodes` by nId. Also returns F: the distinct
/// (sId, eLabel, pidOldT) triples sorted by that order.
struct FilledEdges {
  em::Table edges;
  em::Table f;
};
FilledEdges fill_targets(em::Workspace& ws, const em::Table& edges_by_tid, const em::Table& nodes_by_nid);

struct AssignOutcome {
  /// (nId, pid) sorted by nId.
  em::Table assignments;
  std::uint64_t partition_count = 0;
  std::uint64_t issued = 0;
  std::uint64_t max_signature_pairs = 0;
};

/// Streams the nodes (by nId) against F, forms each node's signature from
/// its pid0 and its F pairs, and assigns ids through the store at `level`.
AssignOutcome assign_signatures(em::Workspace& ws, const em::Table& nodes_by_nid, const em::Table& f, Level level,
                                sigstore::SignatureStore& store);

/// Writes pidNew from the assignments (both sorted by nId) and emits the
/// same ids as a U64 column file in nId order.
struct AppliedColumn {
  em::Table nodes;
  em::Table column;
};
AppliedColumn apply_assignments(em::Workspace& ws, const em::Table& nodes_by_nid, const em::Table& assignments);

/// Zips nodes (by nId, supplying nId, nLabel, pid0) and per-level U64
/// columns 1..n into a MaintNodeRecord table with `width` pid columns.
/// Levels past the supplied columns repeat the last one.
em::Table assemble_history(em::Workspace& ws, const em::Table& nodes_by_nid, const std::vector<em::Table>& columns,
                           std::size_t width);

}  // namespace embisim::construct
