#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>

#include "embisim/core/types.hpp"
#include "embisim/em/external_sort.hpp"
#include "embisim/em/table.hpp"

namespace embisim::em {

/// Priority queue of (level, nId) pairs. Each level is a bucket whose
/// entries are staged in memory and spilled as sorted runs once the
/// staging threshold is reached. Draining a level sorts and deduplicates
/// the bucket.
class ChangeQueue {
 public:
  struct Drained {
    Level level = 0;
    /// Distinct node ids, ascending (U64Codec records).
    Table ids;
  };

  explicit ChangeQueue(Workspace& ws, std::uint64_t staging_bytes = 0);
  ~ChangeQueue();
  ChangeQueue(const ChangeQueue&) = delete;
  ChangeQueue& operator=(const ChangeQueue&) = delete;

  /// Throws InputError when level is 0.
  void push(Level level, NodeId n);

  /// Removes and returns the smallest level with all its ids, or nullopt
  /// when the queue is empty. The caller owns the returned table.
  std::optional<Drained> drain_level();

  bool empty() const { return buckets_.empty(); }
  /// Entries pushed (with duplicates) into a level still queued.
  std::uint64_t pending(Level level) const;

 private:
  using Sorter = ExternalSorter<U64Codec, std::less<std::uint64_t>>;

  Workspace* ws_;
  std::uint64_t staging_bytes_;
  std::map<Level, std::unique_ptr<Sorter>> buckets_;
};

}  // namespace embisim::em
