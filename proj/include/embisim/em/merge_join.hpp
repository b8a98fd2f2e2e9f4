#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "embisim/core/types.hpp"
#include "embisim/em/paged_reader.hpp"
#include "embisim/em/table.hpp"

namespace embisim::em {

/// True when `probes` binary searches into `t` cost fewer page loads than
/// one scan of it.
inline bool prefer_seeks(const Workspace& ws, std::uint64_t probes, const Table& t) {
  const std::uint64_t pages = t.pages(ws.budget().page_size);
  std::uint64_t log_pages = 1;
  while ((1ull << log_pages) < pages + 1) ++log_pages;
  return probes * log_pages < pages;
}

/// One-pass sort-merge join. `left` must be non-decreasing on lkey and
/// `right` strictly increasing on rkey (the lookup side). For every left
/// record, emit(left, right*) is called with the matching right record or
/// nullptr. Each input is scanned once, except that a left side much
/// smaller than the right one is answered by seeks into the right. A key
/// regression throws InputError naming the table.
template <RecordCodec LC, RecordCodec RC, class LKey, class RKey, class Emit>
void merge_join(Workspace& ws, const Table& left, const Table& right, LKey lkey, RKey rkey, Emit&& emit,
                LC lc = {}, RC rc = {}, Traffic traffic = Traffic::table) {
  TableReader<LC> l(ws, left, std::move(lc), traffic);
  if (left.empty()) return;
  typename LC::value_type lv{};
  typename RC::value_type rv{};
  bool have_prev_l = false;
  decltype(lkey(lv)) prev_l{};
  if (prefer_seeks(ws, left.record_count, right)) {
    PagedTableReader<RC> pr(ws, right, std::move(rc), traffic, 64);
    std::uint64_t from = 0;
    while (l.next(lv)) {
      const auto k = lkey(lv);
      if (have_prev_l && k < prev_l) {
        throw InputError("merge join: table '" + left.path.string() + "' is not sorted on its join key");
      }
      prev_l = k;
      have_prev_l = true;
      from += PagedTableReader<RC>::lower_bound_from(pr, from, k, rkey);
      bool hit = false;
      if (from < pr.size()) {
        rv = pr.at(from);
        hit = rkey(rv) == k;
      }
      emit(lv, hit ? &rv : static_cast<const typename RC::value_type*>(nullptr));
    }
    return;
  }
  TableReader<RC> r(ws, right, std::move(rc), traffic);
  bool have_r = r.next(rv);
  while (l.next(lv)) {
    const auto k = lkey(lv);
    if (have_prev_l && k < prev_l) {
      throw InputError("merge join: table '" + left.path.string() + "' is not sorted on its join key");
    }
    prev_l = k;
    have_prev_l = true;
    while (have_r && rkey(rv) < k) {
      const auto before = rkey(rv);
      have_r = r.next(rv);
      if (have_r && !(before < rkey(rv))) {
        throw InputError("merge join: table '" + right.path.string() +
                         "' is not strictly sorted on its join key");
      }
    }
    emit(lv, (have_r && rkey(rv) == k) ? &rv : static_cast<const typename RC::value_type*>(nullptr));
  }
}

/// Calls fn(record) for every record of `t` (sorted on key_of) whose key
/// appears in `keys` (a sorted U64 table, distinct). Uses binary-search
/// seeks through a page cache when the keys are few relative to the
/// table, otherwise one merge scan. Either way only the needed pages are
/// charged.
template <RecordCodec Codec, class KeyOf, class Fn>
void semijoin(Workspace& ws, const Table& t, const Table& keys, KeyOf key_of, Fn&& fn, Codec codec = {},
              Traffic traffic = Traffic::table) {
  if (t.empty() || keys.empty()) return;
  if (prefer_seeks(ws, keys.record_count, t)) {
    PagedTableReader<Codec> pr(ws, t, codec, traffic, 64);
    TableReader<U64Codec> kr(ws, keys, {}, traffic);
    std::uint64_t k = 0;
    std::uint64_t from = 0;
    while (kr.next(k)) {
      std::uint64_t i = from + PagedTableReader<Codec>::lower_bound_from(pr, from, k, key_of);
      for (; i < pr.size(); ++i) {
        auto v = pr.at(i);
        if (key_of(v) != k) break;
        fn(v);
      }
      from = i;
    }
    return;
  }
  TableReader<Codec> tr(ws, t, std::move(codec), traffic);
  TableReader<U64Codec> kr(ws, keys, {}, traffic);
  std::uint64_t k = 0;
  bool have_k = kr.next(k);
  typename Codec::value_type v{};
  while (have_k && tr.next(v)) {
    const std::uint64_t tk = key_of(v);
    while (have_k && k < tk) have_k = kr.next(k);
    if (have_k && k == tk) fn(v);
  }
}

}  // namespace embisim::em
