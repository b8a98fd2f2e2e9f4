#pragma once

#include <filesystem>
#include <string>

#include "embisim/core/types.hpp"
#include "embisim/em/table.hpp"

namespace embisim::em {

/// Merges two tables sorted under `less` into `out`. Records equal under
/// `less` on both sides throw InputError (via `describe` for the message).
template <RecordCodec Codec, class Less, class Describe>
Table merge_union(Workspace& ws, const Table& a, const Table& b, Less less, Describe describe,
                  const std::filesystem::path& out, Codec codec = {}) {
  TableReader<Codec> ra(ws, a, codec), rb(ws, b, codec);
  TableWriter<Codec> w(ws, out, codec);
  typename Codec::value_type va{}, vb{};
  bool ha = ra.next(va), hb = rb.next(vb);
  while (ha || hb) {
    if (ha && hb && !less(va, vb) && !less(vb, va)) {
      throw InputError(describe(vb) + " is already present");
    }
    if (hb && (!ha || less(vb, va))) {
      w.push(vb);
      hb = rb.next(vb);
    } else {
      w.push(va);
      ha = ra.next(va);
    }
  }
  return w.finish(a.sort_key);
}

/// Writes `a` minus the records of `b` (both sorted and strictly
/// increasing under `less`). Every record of `b` must occur in `a`.
template <RecordCodec Codec, class Less, class Describe>
Table merge_subtract(Workspace& ws, const Table& a, const Table& b, Less less, Describe describe,
                     const std::filesystem::path& out, Codec codec = {}) {
  TableReader<Codec> ra(ws, a, codec), rb(ws, b, codec);
  TableWriter<Codec> w(ws, out, codec);
  typename Codec::value_type va{}, vb{};
  bool ha = ra.next(va), hb = rb.next(vb);
  while (ha) {
    if (hb && less(vb, va)) throw InputError(describe(vb) + " does not exist");
    if (hb && !less(va, vb)) {
      hb = rb.next(vb);
    } else {
      w.push(va);
    }
    ha = ra.next(va);
  }
  if (hb) throw InputError(describe(vb) + " does not exist");
  return w.finish(a.sort_key);
}

}  // namespace embisim::em
