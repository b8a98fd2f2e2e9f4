#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <string>
#include <string_view>

// Line formats shared by ingest and the generators:
//   nodes: nId <TAB> nLabel
//   edges: sId <TAB> eLabel <TAB> tId
// Lines starting with '#' and blank lines are skipped. A trailing '\r' is
// dropped. Fields are opaque byte strings and may not contain tabs.
// A line may omit its label field (nId alone, or sId <TAB> tId); the label
// is then reported empty and callers substitute kDefaultLabel.

namespace embisim::text {

inline constexpr std::string_view kDefaultLabel = "_";

struct NodeLine {
  std::uint64_t line = 0;
  std::string_view id;
  std::string_view label;
};

struct EdgeLine {
  std::uint64_t line = 0;
  std::string_view source;
  std::string_view label;
  std::string_view target;
};

/// Throws InputError("<source>:<line>: ...") on malformed lines.
void read_nodes(std::istream& in, std::string_view source, const std::function<void(const NodeLine&)>& fn);
void read_edges(std::istream& in, std::string_view source, const std::function<void(const EdgeLine&)>& fn);

std::string node_line(std::string_view id, std::string_view label);
std::string edge_line(std::string_view source, std::string_view label, std::string_view target);

}  // namespace embisim::text
