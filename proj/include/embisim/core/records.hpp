#pragma once

// Fixed-width on-disk record schemas. Layout: little-endian, fields in
// declaration order, no padding. Byte offsets are listed in docs/FORMAT.md.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "embisim/core/bytes.hpp"
#include "embisim/core/types.hpp"

namespace embisim {

template <class C>
concept RecordCodec = requires(const C& c, const typename C::value_type& v, std::byte* out,
                               const std::byte* in) {
  typename C::value_type;
  { c.width() } -> std::convertible_to<std::size_t>;
  c.encode(v, out);
  { c.decode(in) } -> std::same_as<typename C::value_type>;
};

/// Node row used by construction: (nId, nLabel, pid0, pidOld, pidNew).
struct ConstructNodeRecord {
  NodeId nid;
  LabelId label;
  PartitionId pid0;
  PartitionId pid_old;
  PartitionId pid_new;

  auto operator<=>(const ConstructNodeRecord&) const = default;
};

/// Edge row: (sId, eLabel, tId, pidOldT). pidOldT = 0 means unset.
struct EdgeRecord {
  NodeId sid;
  LabelId label;
  NodeId tid;
  PartitionId pid_old_t;

  auto operator<=>(const EdgeRecord&) const = default;
};

/// Node row used by maintenance: (nId, nLabel, pid[0..levels-1]).
struct MaintNodeRecord {
  NodeId nid;
  LabelId label;
  std::vector<PartitionId> pids;

  auto operator<=>(const MaintNodeRecord&) const = default;
};

/// Signature element projected from the edge table: (sId, eLabel, child pid).
struct SigPairRecord {
  NodeId sid;
  LabelId label;
  PartitionId pid;

  auto operator<=>(const SigPairRecord&) const = default;
};

/// (nId, pid) pair; one column of the partition history.
struct AssignmentRecord {
  NodeId nid;
  PartitionId pid;

  auto operator<=>(const AssignmentRecord&) const = default;
};

/// Bare (nId, nLabel) node row produced by ingest.
struct NodeLabelRecord {
  NodeId nid;
  LabelId label;

  auto operator<=>(const NodeLabelRecord&) const = default;
};

struct ConstructNodeCodec {
  using value_type = ConstructNodeRecord;
  static constexpr std::size_t kWidth = 36;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.nid.value);
    store_le(out + 8, r.label.value);
    store_le(out + 12, r.pid0.value);
    store_le(out + 20, r.pid_old.value);
    store_le(out + 28, r.pid_new.value);
  }
  value_type decode(const std::byte* in) const {
    return {NodeId{load_le<std::uint64_t>(in)}, LabelId{load_le<std::uint32_t>(in + 8)},
            PartitionId{load_le<std::uint64_t>(in + 12)},
            PartitionId{load_le<std::uint64_t>(in + 20)},
            PartitionId{load_le<std::uint64_t>(in + 28)}};
  }
};

struct EdgeCodec {
  using value_type = EdgeRecord;
  static constexpr std::size_t kWidth = 28;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.sid.value);
    store_le(out + 8, r.label.value);
    store_le(out + 12, r.tid.value);
    store_le(out + 20, r.pid_old_t.value);
  }
  value_type decode(const std::byte* in) const {
    return {NodeId{load_le<std::uint64_t>(in)}, LabelId{load_le<std::uint32_t>(in + 8)},
            NodeId{load_le<std::uint64_t>(in + 12)},
            PartitionId{load_le<std::uint64_t>(in + 20)}};
  }
};

/// Width depends on the number of stored pid columns.
class MaintNodeCodec {
 public:
  using value_type = MaintNodeRecord;

  explicit MaintNodeCodec(std::size_t columns) : columns_(columns) {}

  std::size_t columns() const { return columns_; }
  std::size_t width() const { return 12 + 8 * columns_; }

  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.nid.value);
    store_le(out + 8, r.label.value);
    for (std::size_t j = 0; j < columns_; ++j) {
      const std::uint64_t v = j < r.pids.size() ? r.pids[j].value : 0;
      store_le(out + 12 + 8 * j, v);
    }
  }
  value_type decode(const std::byte* in) const {
    value_type r{NodeId{load_le<std::uint64_t>(in)}, LabelId{load_le<std::uint32_t>(in + 8)}, {}};
    r.pids.resize(columns_);
    for (std::size_t j = 0; j < columns_; ++j) {
      r.pids[j] = PartitionId{load_le<std::uint64_t>(in + 12 + 8 * j)};
    }
    return r;
  }

 private:
  std::size_t columns_;
};

struct SigPairCodec {
  using value_type = SigPairRecord;
  static constexpr std::size_t kWidth = 20;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.sid.value);
    store_le(out + 8, r.label.value);
    store_le(out + 12, r.pid.value);
  }
  value_type decode(const std::byte* in) const {
    return {NodeId{load_le<std::uint64_t>(in)}, LabelId{load_le<std::uint32_t>(in + 8)},
            PartitionId{load_le<std::uint64_t>(in + 12)}};
  }
};

struct AssignmentCodec {
  using value_type = AssignmentRecord;
  static constexpr std::size_t kWidth = 16;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.nid.value);
    store_le(out + 8, r.pid.value);
  }
  value_type decode(const std::byte* in) const {
    return {NodeId{load_le<std::uint64_t>(in)}, PartitionId{load_le<std::uint64_t>(in + 8)}};
  }
};

struct NodeLabelCodec {
  using value_type = NodeLabelRecord;
  static constexpr std::size_t kWidth = 12;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& r, std::byte* out) const {
    store_le(out, r.nid.value);
    store_le(out + 8, r.label.value);
  }
  value_type decode(const std::byte* in) const {
    return {NodeId{load_le<std::uint64_t>(in)}, LabelId{load_le<std::uint32_t>(in + 8)}};
  }
};

/// Single unsigned 64-bit value per record.
struct U64Codec {
  using value_type = std::uint64_t;
  static constexpr std::size_t kWidth = 8;
  constexpr std::size_t width() const { return kWidth; }
  void encode(value_type v, std::byte* out) const { store_le(out, v); }
  value_type decode(const std::byte* in) const { return load_le<std::uint64_t>(in); }
};

/// Pair of unsigned 64-bit values.
struct U64PairCodec {
  struct value_type {
    std::uint64_t first;
    std::uint64_t second;
    auto operator<=>(const value_type&) const = default;
  };
  static constexpr std::size_t kWidth = 16;
  constexpr std::size_t width() const { return kWidth; }
  void encode(const value_type& v, std::byte* out) const {
    store_le(out, v.first);
    store_le(out + 8, v.second);
  }
  value_type decode(const std::byte* in) const {
    return {load_le<std::uint64_t>(in), load_le<std::uint64_t>(in + 8)};
  }
};

// Comparators for the sort orders used across the project.

struct BySid {
  bool operator()(const EdgeRecord& a, const EdgeRecord& b) const { return a.sid < b.sid; }
};
struct BySidTid {
  bool operator()(const EdgeRecord& a, const EdgeRecord& b) const {
    if (a.sid != b.sid) return a.sid < b.sid;
    if (a.tid != b.tid) return a.tid < b.tid;
    return a.label < b.label;
  }
};
struct ByTidSid {
  bool operator()(const EdgeRecord& a, const EdgeRecord& b) const {
    if (a.tid != b.tid) return a.tid < b.tid;
    if (a.sid != b.sid) return a.sid < b.sid;
    return a.label < b.label;
  }
};
struct ByTid {
  bool operator()(const EdgeRecord& a, const EdgeRecord& b) const { return a.tid < b.tid; }
};
struct ByNid {
  template <class R>
  bool operator()(const R& a, const R& b) const {
    return a.nid < b.nid;
  }
};
struct ByLabel {
  template <class R>
  bool operator()(const R& a, const R& b) const {
    return a.label < b.label;
  }
};

}  // namespace embisim
