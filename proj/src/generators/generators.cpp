#include "embisim/generators/generators.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_set>
#include <vector>

#include "embisim/core/text_format.hpp"
#include "embisim/core/types.hpp"

namespace embisim::gen {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw InputError("empty sampling range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % bound;
}

std::optional<std::uint64_t> tree_size(std::uint64_t arity, std::uint64_t height, std::uint64_t cap) {
  std::uint64_t total = 0, level = 1;
  for (std::uint64_t d = 0; d < height; ++d) {
    total += level;
    if (total > cap) return std::nullopt;
    if (d + 1 < height) {
      if (level > cap / arity) return std::nullopt;
      level *= arity;
    }
  }
  return total;
}

std::optional<Edge> gen_dbest(std::uint64_t arity, std::uint64_t height, GraphSink& sink, Limits lim) {
  if (arity < 2 || height < 2) throw InputError("dbest needs arity >= 2 and height >= 2");
  const auto n = tree_size(arity, height, lim.max_elements / 2);
  if (!n) throw InputError("dbest tree exceeds the size limit of " + std::to_string(lim.max_elements) + " elements");
  for (std::uint64_t v = 0; v < *n; ++v) sink.node(v, "L");
  // Children of v are v*a+1 .. v*a+a.
  for (std::uint64_t v = 0; v * arity + 1 < *n; ++v) {
    for (std::uint64_t c = 1; c <= arity; ++c) sink.edge(v, v == 0 ? "x" : "y", v * arity + c);
  }
  if (height == 2) return std::nullopt;
  // First node at depth h-2.
  std::uint64_t first = 0;
  for (std::uint64_t d = 0; d < height - 2; ++d) first = first * arity + 1;
  return Edge{first + 1, "y", first * arity + arity};
}

Edge gen_dworst(std::uint64_t n, GraphSink& sink, Limits lim) {
  if (n < 3) throw InputError("dworst needs n >= 3");
  if (n > lim.max_elements / n) {
    throw InputError("dworst graph exceeds the size limit of " + std::to_string(lim.max_elements) + " elements");
  }
  for (std::uint64_t v = 0; v <= n; ++v) sink.node(v, "L");
  for (std::uint64_t s = 0; s < n; ++s) {
    for (std::uint64_t t = 0; t < n; ++t) {
      if (s != t) sink.edge(s, "x", t);
    }
  }
  return Edge{0, "y", n};
}

void gen_random(std::uint64_t n, std::uint64_t m, std::uint32_t node_labels, std::uint32_t edge_labels,
                std::uint64_t seed, GraphSink& sink, Limits lim) {
  if (node_labels == 0 || edge_labels == 0) throw InputError("label counts must be at least 1");
  if (n == 0 && m > 0) throw InputError("edges need nodes");
  const std::uint64_t pairs = n > lim.max_elements ? lim.max_elements : n * (n - (n > 0 ? 1 : 0));
  if (m > pairs) {
    throw InputError("cannot place " + std::to_string(m) + " distinct edges on " + std::to_string(n) + " nodes");
  }
  if (n + m > lim.max_elements) {
    throw InputError("random graph exceeds the size limit of " + std::to_string(lim.max_elements) + " elements");
  }
  SplitMix64 rng(seed);
  std::vector<std::string> nl(node_labels), el(edge_labels);
  for (std::uint32_t i = 0; i < node_labels; ++i) nl[i] = "n" + std::to_string(i);
  for (std::uint32_t i = 0; i < edge_labels; ++i) el[i] = "e" + std::to_string(i);
  for (std::uint64_t v = 0; v < n; ++v) sink.node(v, nl[rng.below(node_labels)]);
  // Pair index p encodes (p / (n-1), p % (n-1)) with the target skipping the source.
  auto emit = [&](std::uint64_t p) {
    const std::uint64_t s = p / (n - 1);
    std::uint64_t t = p % (n - 1);
    if (t >= s) ++t;
    sink.edge(s, el[rng.below(edge_labels)], t);
  };
  if (m * 2 <= pairs) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(m);
    while (seen.size() < m) {
      const std::uint64_t p = rng.below(pairs);
      if (seen.insert(p).second) emit(p);
    }
  } else {
    std::vector<std::uint64_t> all(pairs);
    for (std::uint64_t p = 0; p < pairs; ++p) all[p] = p;
    for (std::uint64_t i = 0; i < m; ++i) {
      std::swap(all[i], all[i + rng.below(pairs - i)]);
      emit(all[i]);
    }
  }
}

struct TextFileSink::Impl {
  std::filesystem::path prefix;
  std::filesystem::path nodes_tmp, edges_tmp;
  std::ofstream nodes, edges;
  bool committed = false;
};

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& p, const char* s) {
  return std::filesystem::path(p.string() + s);
}

}  // namespace

TextFileSink::TextFileSink(const std::filesystem::path& prefix) : impl_(std::make_unique<Impl>()) {
  impl_->prefix = prefix;
  impl_->nodes_tmp = with_suffix(prefix, ".nodes.tmp");
  impl_->edges_tmp = with_suffix(prefix, ".edges.tmp");
  impl_->nodes.open(impl_->nodes_tmp, std::ios::binary | std::ios::trunc);
  impl_->edges.open(impl_->edges_tmp, std::ios::binary | std::ios::trunc);
  if (!impl_->nodes || !impl_->edges) {
    throw IoError("cannot create output files at " + prefix.string());
  }
}

TextFileSink::~TextFileSink() {
  if (!impl_->committed) {
    impl_->nodes.close();
    impl_->edges.close();
    std::error_code ec;
    std::filesystem::remove(impl_->nodes_tmp, ec);
    std::filesystem::remove(impl_->edges_tmp, ec);
  }
}

void TextFileSink::node(std::uint64_t id, std::string_view label) {
  impl_->nodes << text::node_line(std::to_string(id), label);
}

void TextFileSink::edge(std::uint64_t source, std::string_view label, std::uint64_t target) {
  impl_->edges << text::edge_line(std::to_string(source), label, std::to_string(target));
}

void TextFileSink::commit(const std::optional<Edge>& insertion) {
  impl_->nodes.close();
  impl_->edges.close();
  if (impl_->nodes.fail() || impl_->edges.fail()) throw IoError("write failed under " + impl_->prefix.string());
  std::error_code ec;
  const auto ins = with_suffix(impl_->prefix, ".insert");
  std::filesystem::remove(ins, ec);
  if (insertion) {
    std::ofstream out(ins, std::ios::binary | std::ios::trunc);
    out << text::edge_line(std::to_string(insertion->source), insertion->label, std::to_string(insertion->target));
    if (!out) throw IoError("cannot write " + ins.string());
  }
  std::filesystem::rename(impl_->nodes_tmp, with_suffix(impl_->prefix, ".nodes"), ec);
  if (!ec) std::filesystem::rename(impl_->edges_tmp, with_suffix(impl_->prefix, ".edges"), ec);
  if (ec) throw IoError("cannot move generated files into place under " + impl_->prefix.string() + ": " + ec.message());
  impl_->committed = true;
}

}  // namespace embisim::gen
