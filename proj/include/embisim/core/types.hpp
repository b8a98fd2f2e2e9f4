#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace embisim {

/// Strongly typed integral identifier. Tag only distinguishes the types.
template <class Tag, class Rep>
struct StrongId {
  using rep_type = Rep;
  Rep value{};

  constexpr StrongId() = default;
  constexpr explicit StrongId(Rep v) : value(v) {}

  constexpr auto operator<=>(const StrongId&) const = default;
};

template <class Tag, class Rep>
std::ostream& operator<<(std::ostream& os, StrongId<Tag, Rep> id) {
  return os << id.value;
}

struct NodeIdTag {};
struct LabelIdTag {};
struct PartitionIdTag {};

/// Row identifier of a node in the node table.
using NodeId = StrongId<NodeIdTag, std::uint64_t>;
/// Index into the label dictionary (node and edge labels share one dictionary).
using LabelId = StrongId<LabelIdTag, std::uint32_t>;
/// Block identifier. Zero is reserved for "unset"; issued ids start at 1.
using PartitionId = StrongId<PartitionIdTag, std::uint64_t>;

inline constexpr PartitionId kUnsetPartition{0};

/// Iteration / bisimulation depth index.
using Level = std::uint32_t;

// Error hierarchy. The CLI maps these onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or violated operation precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Configuration misuse (bad buffer sizes, wrong store scope, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File system failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace embisim

template <class Tag, class Rep>
struct std::hash<embisim::StrongId<Tag, Rep>> {
  std::size_t operator()(embisim::StrongId<Tag, Rep> id) const noexcept {
    return std::hash<Rep>{}(id.value);
  }
};
