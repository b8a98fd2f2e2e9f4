#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "embisim/em/workspace.hpp"
#include "embisim/sigstore/signature_store.hpp"

// The operations behind the embisim tool. Each returns the process exit
// code for outcomes it reports itself (0, or 1 for a validation mismatch)
// and throws InputError / ConfigError / IoError otherwise.

namespace embisim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIo = 3;

struct RunConfig {
  em::BufferBudget budget;
  sigstore::Scope scope = sigstore::Scope::global_counter;
  sigstore::Backend backend = sigstore::Backend::external_sorted;
  bool early_stop = true;
  bool heuristic = true;
  double theta = 0.5;
  /// Parent of the command's scratch directory; empty means <dir>/scratch.
  std::filesystem::path scratch;
  /// CSV destination; empty means the `out` stream.
  std::filesystem::path stats_out;
};

struct IngestSummary {
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  std::uint64_t duplicates_removed = 0;
  std::uint64_t labels = 0;
};

IngestSummary cmd_ingest(const std::filesystem::path& nodes_file, const std::filesystem::path& edges_file,
                         const std::filesystem::path& dir, bool force, const RunConfig& cfg, std::ostream& err);

int cmd_build(const std::filesystem::path& dir, std::uint32_t k, bool overwrite, const RunConfig& cfg,
              std::ostream& out, std::ostream& err);

enum class UpdateKind { add_nodes, add_edges, del_edges, del_nodes, set_k };

/// `input` is a text file for the first four kinds; set_k uses `new_k`.
int cmd_update(const std::filesystem::path& dir, UpdateKind kind, const std::filesystem::path& input,
               std::uint32_t new_k, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Compares the stored columns 0..k with the oracles.
int cmd_validate(const std::filesystem::path& dir, std::optional<std::uint32_t> k, const RunConfig& cfg,
                 std::ostream& out);

int cmd_stats(const std::filesystem::path& dir, const RunConfig& cfg, std::ostream& out);

struct GenerateSpec {
  std::string kind;  // dbest | dworst | random
  std::uint64_t arity = 2;
  std::uint64_t height = 14;
  std::uint64_t n = 500;
  std::uint64_t m = 0;
  std::uint32_t node_labels = 1;
  std::uint32_t edge_labels = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_elements = 400'000'000;
};

/// Writes <prefix>.nodes, <prefix>.edges and, when defined, <prefix>.insert.
int cmd_generate(const GenerateSpec& spec, const std::filesystem::path& prefix, std::ostream& out);

}  // namespace embisim::cli
