#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace embisim::gen {

/// SplitMix64 (Steele, Lea, Flood 2014). Chosen because its output is fully
/// specified, unlike the std distributions, so seeded files match on every
/// platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by rejection of the biased tail. bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Receives generated nodes and edges in emission order. Node ids are
/// 0..n-1 in order.
class GraphSink {
 public:
  virtual ~GraphSink() = default;
  virtual void node(std::uint64_t id, std::string_view label) = 0;
  virtual void edge(std::uint64_t source, std::string_view label, std::uint64_t target) = 0;
};

struct Edge {
  std::uint64_t source = 0;
  std::string label;
  std::uint64_t target = 0;
  bool operator==(const Edge&) const = default;
};

struct Limits {
  /// Upper bound on nodes + edges of one generated graph.
  std::uint64_t max_elements = 400'000'000;
};

/// Full a-ary tree of height h (h levels of nodes, root 0, breadth-first
/// ids), every node labeled "L". Edges out of the root are labeled "x",
/// all deeper edges "y". The insertion edge runs from the second node at
/// depth h-2 to the last child of the first node at depth h-2; it does not
/// change any signature. h = 2 has no such edge.
std::optional<Edge> gen_dbest(std::uint64_t arity, std::uint64_t height, GraphSink& sink, Limits lim = {});

/// Complete directed graph without self-loops on nodes 0..n-1 labeled "L"
/// with edge label "x", plus an isolated node n. The insertion edge is
/// (0, "y", n).
Edge gen_dworst(std::uint64_t n, GraphSink& sink, Limits lim = {});

/// n nodes with labels "n0".."n{node_labels-1}" and m distinct edges
/// (ordered pairs without self-loops) with labels "e0".., all drawn
/// uniformly with SplitMix64(seed).
void gen_random(std::uint64_t n, std::uint64_t m, std::uint32_t node_labels, std::uint32_t edge_labels,
                std::uint64_t seed, GraphSink& sink, Limits lim = {});

/// Number of nodes of the full a-ary tree of height h, or nullopt past
/// `cap`.
std::optional<std::uint64_t> tree_size(std::uint64_t arity, std::uint64_t height, std::uint64_t cap);

/// Writes <prefix>.nodes and <prefix>.edges in the text formats, plus
/// <prefix>.insert (one edge line) when an insertion edge exists.
class TextFileSink : public GraphSink {
 public:
  explicit TextFileSink(const std::filesystem::path& prefix);
  ~TextFileSink() override;
  TextFileSink(const TextFileSink&) = delete;
  TextFileSink& operator=(const TextFileSink&) = delete;

  void node(std::uint64_t id, std::string_view label) override;
  void edge(std::uint64_t source, std::string_view label, std::uint64_t target) override;
  /// Flushes and renames the files into place. Without commit the
  /// destructor removes the partial output.
  void commit(const std::optional<Edge>& insertion);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace embisim::gen
