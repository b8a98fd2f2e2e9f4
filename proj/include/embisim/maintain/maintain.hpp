#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embisim/construct/build.hpp"
#include "embisim/core/types.hpp"
#include "embisim/em/io_counter.hpp"
#include "embisim/em/table.hpp"
#include "embisim/sigstore/signature_store.hpp"

namespace embisim::maintain {

/// Stored partition history plus both edge orders.
///
/// Columns 0..valid of the node table partition the current graph
/// correctly. Columns 0..consistent were moreover produced by the store
/// from the column below them, which maintenance relies on; columns
/// copied by early stopping are valid but not consistent.
struct MaintState {
  /// MaintNodeRecord rows sorted by nId with `width` pid columns.
  em::Table node_table;
  std::size_t width = 1;
  /// EdgeRecord rows sorted by (sId, tId) and by (tId, sId).
  em::Table edge_st;
  em::Table edge_ts;
  Level k = 0;
  Level valid = 0;
  Level consistent = 0;
};

/// State for a fresh build.
MaintState from_build(const construct::BuildResult& r);

struct MaintOptions {
  bool heuristic = true;
  double theta = 0.5;
};

struct LevelStats {
  Level level = 0;
  std::uint64_t checked_nodes = 0;
  std::uint64_t changed_nodes = 0;
  /// Distinct ids among the old and new ids of changed nodes.
  std::uint64_t changed_partitions = 0;
  bool rebuilt = false;
  em::IoSnapshot io;
};

struct UpdateStats {
  std::vector<LevelStats> levels;
  em::IoSnapshot io;
  /// I/O spent bringing early-stopped columns up to date first.
  em::IoSnapshot materialize_io;
};

std::string level_csv_header();
std::string to_csv_row(const LevelStats& s);

/// Outcome of an update. The input state's tables are left untouched; the
/// caller owns both and decides which to keep.
struct Update {
  MaintState state;
  UpdateStats stats;
};

/// True when the queued fraction of nodes exceeds theta.
bool switch_heuristic(std::uint64_t queued, std::uint64_t node_count, double theta);

/// Adds isolated nodes (NodeLabelRecord rows, any order). Labels already in
/// the graph reuse their pid0; new labels get fresh ids.
Update add_nodes(em::Workspace& ws, const MaintState& st, sigstore::SignatureStore& store, const em::Table& nodes);

/// Adds edges (EdgeRecord rows, any order) whose endpoints exist.
Update add_edges(em::Workspace& ws, const MaintState& st, sigstore::SignatureStore& store, const em::Table& edges,
                 MaintOptions opts = {});

/// Removes existing edges (EdgeRecord rows, pidOldT ignored).
Update delete_edges(em::Workspace& ws, const MaintState& st, sigstore::SignatureStore& store,
                    const em::Table& edges, MaintOptions opts = {});

/// Removes nodes with all incident edges.
Update delete_nodes(em::Workspace& ws, const MaintState& st, sigstore::SignatureStore& store,
                    std::vector<NodeId> nodes, MaintOptions opts = {});

/// Lowering k only changes the view. Raising it runs the missing
/// iterations from the highest valid column.
Update change_k(em::Workspace& ws, const MaintState& st, sigstore::SignatureStore& store, Level new_k);

/// Recomputes columns consistent+1..k so that all of 0..k agree with the
/// store. A no-op when they already do.
Update materialize(em::Workspace& ws, const MaintState& st, sigstore::SignatureStore& store);

/// Drops the tables of `s` that are not shared with `keep`.
void drop_unshared(const MaintState& s, const MaintState& keep);

}  // namespace embisim::maintain
