#include "embisim/core/text_format.hpp"

#include <array>

#include "embisim/core/types.hpp"

namespace embisim::text {

namespace {

/// Splits on tabs into at most N non-empty fields; returns the field
/// count, or 0 when there are too many or an empty one.
template <std::size_t N>
std::size_t split(std::string_view s, std::array<std::string_view, N>& out) {
  std::size_t count = 0;
  std::size_t i = 0;
  for (;;) {
    const std::size_t tab = s.find('\t', i);
    if (count == N) return 0;
    out[count] = s.substr(i, tab == std::string_view::npos ? std::string_view::npos : tab - i);
    if (out[count].empty()) return 0;
    ++count;
    if (tab == std::string_view::npos) return count;
    i = tab + 1;
  }
}

template <std::size_t N, class Fn>
void read_lines(std::istream& in, std::string_view source, const char* expect, Fn&& fn) {
  std::string buf;
  std::uint64_t line = 0;
  std::array<std::string_view, N> fields;
  while (std::getline(in, buf)) {
    ++line;
    std::string_view s(buf);
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t n = split(s, fields);
    if (n + 1 < N || n == 0) {
      throw InputError(std::string(source) + ":" + std::to_string(line) + ": expected " + expect);
    }
    fn(line, fields, n);
  }
  if (in.bad()) throw IoError(std::string(source) + ": read failed");
}

}  // namespace

void read_nodes(std::istream& in, std::string_view source, const std::function<void(const NodeLine&)>& fn) {
  read_lines<2>(in, source, "nId<TAB>nLabel", [&](std::uint64_t line, const auto& f, std::size_t n) {
    fn(NodeLine{line, f[0], n == 2 ? f[1] : std::string_view{}});
  });
}

void read_edges(std::istream& in, std::string_view source, const std::function<void(const EdgeLine&)>& fn) {
  read_lines<3>(in, source, "sId<TAB>eLabel<TAB>tId", [&](std::uint64_t line, const auto& f, std::size_t n) {
    if (n == 3) {
      fn(EdgeLine{line, f[0], f[1], f[2]});
    } else {
      fn(EdgeLine{line, f[0], {}, f[1]});
    }
  });
}

std::string node_line(std::string_view id, std::string_view label) {
  std::string s;
  s.reserve(id.size() + label.size() + 2);
  s.append(id).append(1, '\t').append(label).append(1, '\n');
  return s;
}

std::string edge_line(std::string_view source, std::string_view label, std::string_view target) {
  std::string s;
  s.reserve(source.size() + label.size() + target.size() + 3);
  s.append(source).append(1, '\t').append(label).append(1, '\t').append(target).append(1, '\n');
  return s;
}

}  // namespace embisim::text
