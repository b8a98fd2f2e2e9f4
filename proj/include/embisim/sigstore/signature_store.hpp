#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "embisim/core/signature.hpp"
#include "embisim/core/types.hpp"
#include "embisim/em/paged_reader.hpp"
#include "embisim/em/table.hpp"
#include "embisim/em/var_file.hpp"
#include "embisim/em/workspace.hpp"
#include "json.hpp"

namespace embisim::sigstore {

enum class Backend { in_memory, external_sorted };
enum class Scope { global_counter, per_iteration_counter };

std::string to_string(Backend b);
std::string to_string(Scope s);
Backend parse_backend(const std::string& s);
Scope parse_scope(const std::string& s);

struct StoreOptions {
  Backend backend = Backend::external_sorted;
  Scope scope = Scope::global_counter;
  /// Key on the signature alone instead of (level, signature), so equal
  /// signatures of different iterations share one id.
  bool share_across_levels = false;
  /// per_iteration_counter only: restart ids at 1 after reset_iteration().
  bool restart_counter_on_reset = false;
  std::uint64_t max_signature_bytes = 16 * em::kMiB;
};

struct StoreCounters {
  std::uint64_t lookups = 0;
  std::uint64_t hits = 0;
  std::uint64_t issued = 0;
};

struct BulkResult {
  /// (nId, pid) sorted by nId, AssignmentCodec records.
  em::Table assignments;
  /// Distinct signatures in the batch, i.e. the number of partition blocks.
  std::uint64_t distinct = 0;
  /// Signatures of the batch that were new to the store.
  std::uint64_t issued = 0;
};

class SignatureStore;

/// Collects the signatures of one iteration and assigns ids as if they had
/// been inserted one by one in ascending nId order.
class BulkAssigner {
 public:
  BulkAssigner(BulkAssigner&&) noexcept;
  ~BulkAssigner();

  /// Node ids must be strictly ascending.
  void add(NodeId n, const Signature& sig);
  BulkResult finish();

 private:
  friend class SignatureStore;
  BulkAssigner(SignatureStore& store, Level level);

  SignatureStore* store_;
  Level level_;
  std::optional<NodeId> last_;
  // external backend
  std::unique_ptr<em::VarSorter> sorter_;
  // in-memory backend
  std::unique_ptr<em::TableWriter<AssignmentCodec>> out_;
  std::unordered_map<std::uint64_t, char> seen_;
  std::uint64_t distinct_ = 0;
  std::uint64_t issued_ = 0;
};

/// The signature storage facility: an idempotent map from signatures to
/// partition ids drawn from one counter.
///
/// The external backend keeps sorted runs on disk. A run is a dictionary
/// table of (hash, heap offset, id) records ordered by (hash, key bytes)
/// plus a heap file holding the length-prefixed keys in the same order.
/// New single inserts are staged in memory and flushed as a run when the
/// staging area exceeds half of the store buffer.
class SignatureStore {
 public:
  /// A fresh, empty store whose files live in `dir`.
  SignatureStore(em::Workspace& ws, std::filesystem::path dir, StoreOptions opts);
  ~SignatureStore();
  SignatureStore(const SignatureStore&) = delete;
  SignatureStore& operator=(const SignatureStore&) = delete;

  /// Reopens a store from a state produced by state().
  static std::unique_ptr<SignatureStore> restore(em::Workspace& ws, std::filesystem::path dir,
                                                 const nlohmann::json& state);

  /// Flushes staged entries and describes the persistent state. Files
  /// referenced by the returned state are never deleted by this object.
  nlohmann::json state();

  /// Deletes files in the store directory that the current state does not
  /// reference.
  void gc();

  /// A fresh id from the counter, not bound to any signature (used for
  /// label partitions).
  PartitionId issue_id();

  PartitionId insert(Level level, const Signature& sig);
  std::optional<PartitionId> find(Level level, const Signature& sig);

  BulkAssigner begin_bulk(Level level) { return BulkAssigner(*this, level); }

  /// Clears the mapping. Only valid for per_iteration_counter scope.
  void reset_iteration();

  const StoreOptions& options() const { return opts_; }
  const StoreCounters& counters() const { return counters_; }
  PartitionId next_id() const { return PartitionId{next_id_}; }
  /// Distinct keys held.
  std::uint64_t size() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  friend class BulkAssigner;

  struct Run {
    std::string dict;
    std::string heap;
    std::uint64_t count = 0;
  };
  struct OpenRun;

  std::string key_of(Level level, const Signature& sig) const;
  void check_size(NodeId n, const Signature& sig) const;
  std::optional<std::uint64_t> lookup(const std::string& key, std::uint64_t hash);
  std::optional<std::uint64_t> lookup_run(std::size_t i, const std::string& key, std::uint64_t hash);
  void flush_staging();
  void compact();
  Run merge_runs(const std::vector<Run>& runs);
  void set_runs(std::vector<Run> runs);
  std::string new_run_stem();
  BulkResult bulk_external(Level level, em::VarFile sorted);
  void drop_open_runs();

  em::Workspace* ws_;
  std::filesystem::path dir_;
  StoreOptions opts_;
  std::uint64_t next_id_ = 1;
  StoreCounters counters_;

  std::unordered_map<std::string, std::uint64_t> memory_;

  std::map<std::pair<std::uint64_t, std::string>, std::uint64_t> staged_;
  std::uint64_t staged_bytes_ = 0;
  std::vector<Run> runs_;
  std::uint64_t run_entries_ = 0;
  std::uint64_t run_seq_ = 0;
  std::set<std::string> committed_files_;
  std::vector<std::unique_ptr<OpenRun>> open_;
};

}  // namespace embisim::sigstore
