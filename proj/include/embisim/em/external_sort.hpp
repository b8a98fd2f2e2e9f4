#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "embisim/em/file.hpp"
#include "embisim/em/table.hpp"
#include "embisim/em/workspace.hpp"

namespace embisim::em {

struct SortOptions {
  /// Drop exact duplicate records. Ties under the key are then broken by
  /// full record order so that duplicates become adjacent.
  bool dedup = false;
  /// Recorded as the output table's sort_key.
  std::string sort_key;
  /// Output location; a scratch path when empty.
  std::filesystem::path output;
  Traffic traffic = Traffic::table;
  /// In-memory run size in bytes; 0 means the full table buffer.
  std::uint64_t memory_bytes = 0;
};

struct SortStats {
  std::uint64_t initial_runs = 0;
  std::uint32_t merge_passes = 0;
};

/// Multiway external merge sort with a memory budget of B pages (the
/// workspace's table buffer).
///
/// Run formation loads consecutive input records until the run holds at
/// least B pages worth of bytes, so an input of |X| pages yields
/// ceil(|X|/B) runs. Each merge pass combines up to B-1 runs (at least 2).
/// Without dedup the sort is stable.
template <RecordCodec Codec, class Less>
class ExternalSorter {
 public:
  using value_type = typename Codec::value_type;

  ExternalSorter(Workspace& ws, Codec codec, Less less, SortOptions opts = {})
      : ws_(&ws), codec_(std::move(codec)), less_(std::move(less)), opts_(std::move(opts)) {
    run_cap_bytes_ = opts_.memory_bytes ? opts_.memory_bytes : ws.budget().table_pages() * ws.budget().page_size;
    fan_in_ = std::max<std::uint64_t>(2, ws.budget().table_pages() - 1);
    if (opts_.output.empty()) opts_.output = ws.temp_path("sorted");
  }

  void push(const value_type& r) {
    if (run_bytes_ >= run_cap_bytes_) spill();
    run_.push_back(r);
    run_bytes_ += codec_.width();
    ++pushed_;
  }

  void push(value_type&& r) {
    if (run_bytes_ >= run_cap_bytes_) spill();
    run_.push_back(std::move(r));
    run_bytes_ += codec_.width();
    ++pushed_;
  }

  Table finish() {
    if (runs_.empty()) {
      // Everything fits in one run: sort in memory, write the output once.
      sort_run();
      TableWriter<Codec> out(*ws_, opts_.output, codec_, opts_.traffic);
      emit_run(out);
      stats_.initial_runs = run_.empty() ? 0 : 1;
      release_run();
      return out.finish(opts_.sort_key);
    }
    spill();
    release_run();
    stats_.initial_runs = runs_.size();
    while (runs_.size() > 1) merge_pass();
    return result_;
  }

  const SortStats& stats() const { return stats_; }
  /// Records pushed so far.
  std::uint64_t pushed() const { return pushed_; }

 private:
  struct Span {
    std::uint64_t first;
    std::uint64_t count;
  };

  bool before(const value_type& a, const value_type& b) const {
    if (less_(a, b)) return true;
    if (less_(b, a)) return false;
    if (opts_.dedup) return a < b;
    return false;
  }

  void sort_run() {
    std::stable_sort(run_.begin(), run_.end(),
                     [this](const value_type& a, const value_type& b) { return before(a, b); });
  }

  void emit_run(TableWriter<Codec>& out) {
    const value_type* last = nullptr;
    for (const auto& r : run_) {
      if (opts_.dedup && last && *last == r) continue;
      out.push(r);
      last = &r;
    }
  }

  void release_run() {
    run_.clear();
    run_.shrink_to_fit();
    run_bytes_ = 0;
  }

  void spill() {
    if (run_.empty()) return;
    sort_run();
    if (!runs_writer_) {
      runs_path_ = ws_->temp_path("runs");
      runs_writer_ = std::make_unique<TableWriter<Codec>>(*ws_, runs_path_, codec_, opts_.traffic);
    }
    const std::uint64_t first = runs_writer_->count();
    emit_run(*runs_writer_);
    runs_.push_back({first, runs_writer_->count() - first});
    run_.clear();
    run_bytes_ = 0;
  }

  /// Sequential cursor over one run inside a shared file.
  struct Cursor {
    std::uint64_t next;
    std::uint64_t end;
    std::vector<std::byte> buf;
    std::uint64_t buf_first = 0;
    std::uint64_t buf_count = 0;
    value_type head{};
  };

  bool advance(Cursor& c, const File& f, std::size_t buf_records) {
    if (c.next >= c.end) return false;
    const std::size_t w = codec_.width();
    if (c.next >= c.buf_first + c.buf_count) {
      c.buf_first = c.next;
      c.buf_count = std::min<std::uint64_t>(buf_records, c.end - c.next);
      const std::size_t bytes = c.buf_count * w;
      if (f.read_at(c.buf.data(), bytes, c.buf_first * w) != bytes) {
        throw IoError("sort run file '" + f.path().string() + "' truncated");
      }
      ws_->io().charge_read(opts_.traffic, bytes);
    }
    c.head = codec_.decode(c.buf.data() + (c.next - c.buf_first) * w);
    ++c.next;
    return true;
  }

  void merge_pass() {
    runs_writer_table_ = runs_writer_->finish();
    runs_writer_.reset();
    const Table input = runs_writer_table_;
    const std::vector<Span> spans = std::move(runs_);
    runs_.clear();
    const bool final_pass = spans.size() <= fan_in_;

    std::unique_ptr<TableWriter<Codec>> out;
    std::filesystem::path out_path = final_pass ? opts_.output : ws_->temp_path("runs");
    out = std::make_unique<TableWriter<Codec>>(*ws_, out_path, codec_, opts_.traffic,
                                               ws_->budget().page_size);
    File in(input.path, File::Mode::read);

    for (std::size_t g = 0; g < spans.size(); g += fan_in_) {
      const std::size_t group = std::min<std::size_t>(fan_in_, spans.size() - g);
      // One input buffer per run plus one output buffer share the budget.
      const std::uint64_t per_run_bytes =
          std::max<std::uint64_t>(ws_->budget().page_size,
                                  ws_->budget().table_pages() / (group + 1) * ws_->budget().page_size);
      const std::size_t buf_records =
          static_cast<std::size_t>(std::max<std::uint64_t>(1, per_run_bytes / codec_.width()));
      std::vector<Cursor> cursors(group);
      std::vector<std::size_t> heap;
      for (std::size_t i = 0; i < group; ++i) {
        cursors[i].next = spans[g + i].first;
        cursors[i].end = spans[g + i].first + spans[g + i].count;
        cursors[i].buf.resize(buf_records * codec_.width());
        if (advance(cursors[i], in, buf_records)) heap.push_back(i);
      }
      // Min-heap on (head, run index): earlier runs win ties, keeping stability.
      auto heap_less = [&](std::size_t a, std::size_t b) {
        if (before(cursors[b].head, cursors[a].head)) return true;
        if (before(cursors[a].head, cursors[b].head)) return false;
        return b < a;
      };
      std::make_heap(heap.begin(), heap.end(), heap_less);
      const std::uint64_t first = out->count();
      bool have_last = false;
      value_type last{};
      while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        const std::size_t i = heap.back();
        if (!(opts_.dedup && have_last && last == cursors[i].head)) {
          out->push(cursors[i].head);
          if (opts_.dedup) {
            last = cursors[i].head;
            have_last = true;
          }
        }
        if (advance(cursors[i], in, buf_records)) {
          std::push_heap(heap.begin(), heap.end(), heap_less);
        } else {
          heap.pop_back();
        }
      }
      runs_.push_back({first, out->count() - first});
    }
    in.close();
    drop_table(input);
    ++stats_.merge_passes;
    if (final_pass) {
      result_ = out->finish(opts_.sort_key);
    } else {
      runs_writer_ = std::move(out);
      runs_path_ = out_path;
    }
  }

  Workspace* ws_;
  Codec codec_;
  Less less_;
  SortOptions opts_;
  std::uint64_t run_cap_bytes_ = 0;
  std::uint64_t fan_in_ = 2;
  std::vector<value_type> run_;
  std::uint64_t run_bytes_ = 0;
  std::uint64_t pushed_ = 0;
  std::vector<Span> runs_;
  std::filesystem::path runs_path_;
  std::unique_ptr<TableWriter<Codec>> runs_writer_;
  Table runs_writer_table_;
  Table result_;
  SortStats stats_;
};

/// Sorts a table into a new table; the input is left untouched.
template <RecordCodec Codec, class Less>
Table external_sort(Workspace& ws, const Table& input, Less less, SortOptions opts = {}, Codec codec = {},
                    SortStats* stats = nullptr) {
  ExternalSorter<Codec, Less> sorter(ws, codec, std::move(less), std::move(opts));
  {
    TableReader<Codec> in(ws, input, codec, Traffic::table);
    typename Codec::value_type r{};
    while (in.next(r)) sorter.push(std::move(r));
  }
  Table out = sorter.finish();
  if (stats) *stats = sorter.stats();
  return out;
}

/// Closed-form page I/O of a standard external merge sort of |X| pages with
/// B buffer pages: 2|X|(1 + ceil(log_{B-1} ceil(|X|/B))).
std::uint64_t merge_sort_io_pages(std::uint64_t table_pages, std::uint64_t buffer_pages);

}  // namespace embisim::em
