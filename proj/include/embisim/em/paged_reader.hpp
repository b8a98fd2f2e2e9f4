#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <unordered_map>
#include <utility>
#include <vector>

#include "embisim/em/file.hpp"
#include "embisim/em/table.hpp"
#include "embisim/em/io_counter.hpp"
#include "embisim/em/workspace.hpp"

namespace embisim::em {

/// Random access to a file through an LRU cache of whole pages. Every page
/// loaded from the file is charged to the I/O counter; cache hits are free.
class PagedFile {
 public:
  PagedFile(Workspace& ws, const std::filesystem::path& path, Traffic traffic, std::size_t cache_pages);

  /// Copies `n` bytes at `offset` into `out`. Throws IoError past EOF.
  void read(std::uint64_t offset, std::size_t n, std::byte* out);

  std::uint64_t size() const { return size_; }
  std::uint64_t pages_loaded() const { return loads_; }

 private:
  const std::vector<std::byte>& page(std::uint64_t index);

  Workspace* ws_;
  File file_;
  Traffic traffic_;
  std::uint32_t page_size_;
  std::size_t capacity_;
  std::uint64_t size_;
  std::uint64_t loads_ = 0;
  std::list<std::pair<std::uint64_t, std::vector<std::byte>>> lru_;
  std::unordered_map<std::uint64_t, decltype(lru_)::iterator> index_;
};

/// Record-level random access over a fixed-width table.
template <RecordCodec Codec>
class PagedTableReader {
 public:
  using value_type = typename Codec::value_type;

  PagedTableReader(Workspace& ws, const Table& t, Codec codec = {}, Traffic traffic = Traffic::table,
                   std::size_t cache_pages = 64)
      : codec_(std::move(codec)), count_(t.record_count), file_(ws, t.path, traffic, cache_pages) {
    if (t.record_width != codec_.width()) {
      throw InputError("table '" + t.path.string() + "' width mismatch for paged reader");
    }
    scratch_.resize(codec_.width());
  }

  std::uint64_t size() const { return count_; }

  value_type at(std::uint64_t i) {
    file_.read(i * codec_.width(), codec_.width(), scratch_.data());
    return codec_.decode(scratch_.data());
  }

  /// First index whose key is not less than `key`, for a table sorted by
  /// key_of. Costs O(log n) page loads (fewer with cache hits).
  template <class Key, class KeyOf>
  std::uint64_t lower_bound(const Key& key, KeyOf key_of) {
    std::uint64_t lo = 0, hi = count_;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (key_of(at(mid)) < key) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  /// lower_bound restricted to [from, size), returned relative to `from`.
  template <class Key, class KeyOf>
  static std::uint64_t lower_bound_from(PagedTableReader& r, std::uint64_t from, const Key& key, KeyOf key_of) {
    std::uint64_t lo = from, hi = r.count_;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (key_of(r.at(mid)) < key) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo - from;
  }

  std::uint64_t pages_loaded() const { return file_.pages_loaded(); }

 private:
  Codec codec_;
  std::uint64_t count_;
  PagedFile file_;
  std::vector<std::byte> scratch_;
};

}  // namespace embisim::em
