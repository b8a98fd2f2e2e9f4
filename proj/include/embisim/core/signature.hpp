#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embisim/core/types.hpp"

namespace embisim {

/// One (edge label, child block) element of a signature.
struct SignaturePair {
  LabelId label;
  PartitionId child;

  auto operator<=>(const SignaturePair&) const = default;
};

/// A node's bisimulation signature: its label block plus the set of
/// (edge label, child block) pairs. The pair list is kept strictly
/// ascending, which makes the set representation canonical.
class Signature {
 public:
  Signature() = default;

  PartitionId pid0() const { return pid0_; }
  const std::vector<SignaturePair>& pairs() const { return pairs_; }

  bool operator==(const Signature&) const = default;

  /// Build from pairs that are already strictly ascending. Throws
  /// InputError otherwise.
  static Signature from_sorted(PartitionId pid0, std::vector<SignaturePair> pairs);

 private:
  friend Signature make_signature(PartitionId, std::vector<SignaturePair>);

  PartitionId pid0_{};
  std::vector<SignaturePair> pairs_;
};

/// Sorts and deduplicates `raw_pairs` (any order, duplicates allowed).
Signature make_signature(PartitionId pid0, std::vector<SignaturePair> raw_pairs);

/// Canonical, injective byte form:
///   u64 pid0 | u64 pair_count | pair_count x (u32 label, u64 child)
/// all little-endian.
std::string canonical_bytes(const Signature& sig);

/// Appends canonical_bytes(sig) to `out`.
void append_canonical_bytes(const Signature& sig, std::string& out);

/// Inverse of canonical_bytes. Throws InputError on malformed input.
Signature parse_canonical_bytes(std::span<const std::byte> bytes);

/// Encoded size of a signature with `pairs` elements.
constexpr std::size_t canonical_size(std::size_t pairs) { return 16 + 12 * pairs; }

/// Human-readable form, e.g. "1,{(0,2),(3,1)}".
std::string to_string(const Signature& sig);

}  // namespace embisim
