#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "embisim/em/table.hpp"
#include "embisim/em/var_file.hpp"
#include "json.hpp"

namespace embisim::cli {

inline constexpr int kFormatVersion = 1;

/// A table file in the directory, recorded by name relative to the root.
struct TableRef {
  std::string file;
  std::size_t record_width = 0;
  std::uint64_t record_count = 0;
  std::string sort_key;
};

struct VarRef {
  std::string file;
  std::uint64_t record_count = 0;
  std::uint64_t byte_size = 0;
};

/// Contents of meta.json. Everything else in the directory is reachable
/// from here; files it does not name are garbage.
struct Meta {
  int format_version = kFormatVersion;
  std::uint64_t generation = 0;
  /// Next dense node id; ids are never reused.
  std::uint64_t next_node_id = 0;
  std::uint64_t duplicate_edges_removed = 0;
  std::string labels;  // label dictionary file
  VarRef names;        // external node ids in dense id order; "" marks deleted ids
  TableRef nodes;      // NodeLabelRecord by nId
  TableRef edges_st;   // EdgeRecord by (sId, tId)
  TableRef edges_ts;   // EdgeRecord by (tId, sId)
  std::optional<TableRef> history;  // MaintNodeRecord by nId, once built
  std::uint64_t width = 0;
  std::uint32_t k = 0;
  std::uint32_t valid = 0;
  std::uint32_t consistent = 0;
  std::uint32_t k_effective = 0;
  std::string store_dir;       // relative to the root, under store/
  nlohmann::json store;        // SignatureStore state
  nlohmann::json build_stats;  // per-iteration rows of the last build
  nlohmann::json last_run;     // command, I/O split, seconds

  bool built() const { return history.has_value(); }
};

nlohmann::json to_json(const Meta& m);
Meta meta_from_json(const nlohmann::json& j);

/// Exclusive handle on a graph directory. Holds an flock on `lock` for its
/// lifetime. New files get generation-suffixed names, and commit()
/// publishes them by atomically replacing meta.json, so a crash leaves the
/// previous state intact.
class GraphDirectory {
 public:
  /// Creates (or with `force`, empties) the directory.
  static GraphDirectory create(const std::filesystem::path& root, bool force);
  /// Opens an existing directory; throws InputError on a missing or
  /// incompatible meta.json.
  static GraphDirectory open(const std::filesystem::path& root);

  GraphDirectory(GraphDirectory&&) noexcept;
  GraphDirectory& operator=(GraphDirectory&&) noexcept;
  ~GraphDirectory();

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path store_parent() const { return root_ / "store"; }
  /// Default parent of command workspaces; same file system as the tables.
  std::filesystem::path scratch_root() const { return root_ / "scratch"; }
  const Meta& meta() const { return meta_; }

  /// Name for a file written by the pending generation, e.g. "edges_st.g4.tbl".
  std::string fresh_name(const std::string& stem, const std::string& ext) const;
  std::filesystem::path path(const std::string& name) const { return root_ / name; }

  em::Table table(const TableRef& r) const;
  em::VarFile var(const VarRef& r) const;
  /// Moves `t` into the directory under `name` and describes it.
  TableRef adopt(const em::Table& t, const std::string& name) const;
  TableRef describe(const em::Table& t) const;

  /// Publishes `m` as the next generation and deletes unreferenced files.
  void commit(Meta m);
  /// Deletes files not referenced by the current meta, including store
  /// directories of other builds. Files inside the current store directory
  /// are left to the store.
  void collect_garbage() const;

 private:
  GraphDirectory(std::filesystem::path root, int lock_fd);
  void lock_or_throw();

  std::filesystem::path root_;
  int lock_fd_ = -1;
  Meta meta_;
};

}  // namespace embisim::cli
