#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embisim/em/io_counter.hpp"
#include "embisim/em/table.hpp"
#include "embisim/sigstore/signature_store.hpp"

namespace embisim::construct {

struct IterationStats {
  Level iteration = 0;
  std::uint64_t partition_count = 0;
  std::uint64_t max_signature_pairs = 0;
  std::uint64_t new_ids = 0;
  em::IoSnapshot io;
  double prepare_seconds = 0;
  double signature_seconds = 0;
};

/// Column names of the per-iteration CSV, in order.
std::string iteration_csv_header();
std::string to_csv_row(const IterationStats& s);

struct BuildOptions {
  bool early_stop = true;
};

struct BuildResult {
  /// ConstructNodeRecord rows sorted by nId; pidNew holds level k.
  em::Table node_table;
  /// MaintNodeRecord rows sorted by nId with k+1 pid columns.
  em::Table history_table;
  /// Edges sorted by (sId, tId) and by (tId, sId).
  em::Table edge_table_st;
  em::Table edge_table_ts;
  /// One row per iteration 0..k_effective.
  std::vector<IterationStats> stats;
  Level k = 0;
  Level k_effective = 0;
  /// I/O of the whole build, including an early-stop detection iteration.
  em::IoSnapshot total_io;
};

/// True when two consecutive iterations have the same number of blocks.
inline bool early_stop_check(std::uint64_t prev_count, std::uint64_t cur_count) {
  return prev_count == cur_count;
}

/// Computes pid columns 0..k for the graph. `nodes` holds
/// ConstructNodeRecord rows (pids unset) and `edges` EdgeRecord rows, in
/// any order. With early stopping, iterations halt once two consecutive
/// levels have equal block counts; the remaining history columns repeat
/// the last computed level.
BuildResult build_bisim(em::Workspace& ws, const em::Table& nodes, const em::Table& edges, Level k,
                        sigstore::SignatureStore& store, BuildOptions opts = {});

/// Drops every table of the result.
void drop(const BuildResult& r);

}  // namespace embisim::construct
