#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "embisim/core/records.hpp"
#include "embisim/core/types.hpp"
#include "embisim/em/file.hpp"
#include "embisim/em/io_counter.hpp"
#include "embisim/em/workspace.hpp"

namespace embisim::em {

/// A file of fixed-width records. `sort_key` names the order the records
/// satisfy, if any (e.g. "tId,sId"); it is informational and can be
/// checked with one scan.
struct Table {
  std::filesystem::path path;
  std::size_t record_width = 0;
  std::uint64_t record_count = 0;
  std::string sort_key;

  std::uint64_t byte_size() const { return record_width * record_count; }
  std::uint64_t pages(std::uint32_t page_size) const { return pages_of(byte_size(), page_size); }
  bool empty() const { return record_count == 0; }
};

/// Opens an existing table file of the given width; throws IoError when
/// the file length is not a multiple of the width.
Table open_table(const std::filesystem::path& path, std::size_t record_width, std::string sort_key = {});

/// Creates an empty table file.
Table create_empty_table(const std::filesystem::path& path, std::size_t record_width,
                         std::string sort_key = {});

/// Deletes the table's file.
void drop_table(const Table& t) noexcept;

/// Moves the table's file to `dest` (same file system) and returns the
/// relocated table.
Table move_table(const Table& t, const std::filesystem::path& dest);

/// Sequential buffered writer. Each buffer flush charges the I/O counter.
/// A writer destroyed without finish() deletes its file.
template <RecordCodec Codec>
class TableWriter {
 public:
  using value_type = typename Codec::value_type;

  TableWriter(Workspace& ws, std::filesystem::path path, Codec codec = {},
              Traffic traffic = Traffic::table, std::size_t buffer_bytes = 0)
      : ws_(&ws),
        codec_(std::move(codec)),
        traffic_(traffic),
        width_(codec_.width()),
        file_(std::move(path), File::Mode::write_truncate) {
    if (buffer_bytes == 0) buffer_bytes = ws.stream_buffer_bytes();
    capacity_ = std::max<std::size_t>(1, buffer_bytes / width_) * width_;
    buffer_.resize(capacity_);
  }

  ~TableWriter() {
    if (!finished_ && file_.is_open()) {
      auto p = file_.path();
      try {
        file_.close();
      } catch (...) {
      }
      remove_quietly(p);
    }
  }

  TableWriter(TableWriter&&) noexcept = default;
  TableWriter& operator=(TableWriter&&) noexcept = default;

  void push(const value_type& r) {
    if (fill_ == capacity_) flush();
    codec_.encode(r, buffer_.data() + fill_);
    fill_ += width_;
    ++count_;
  }

  /// Appends an already-encoded record of the codec's width.
  void push_raw(const std::byte* rec) {
    if (fill_ == capacity_) flush();
    std::copy(rec, rec + width_, buffer_.data() + fill_);
    fill_ += width_;
    ++count_;
  }

  std::uint64_t count() const { return count_; }
  const std::filesystem::path& path() const { return file_.path(); }
  const Codec& codec() const { return codec_; }

  Table finish(std::string sort_key = {}) {
    flush();
    Table t{file_.path(), width_, count_, std::move(sort_key)};
    file_.close();
    finished_ = true;
    return t;
  }

 private:
  void flush() {
    if (fill_ == 0) return;
    file_.write_at(buffer_.data(), fill_, offset_);
    ws_->io().charge_write(traffic_, fill_);
    offset_ += fill_;
    fill_ = 0;
  }

  Workspace* ws_;
  Codec codec_;
  Traffic traffic_;
  std::size_t width_;
  File file_;
  std::vector<std::byte> buffer_;
  std::size_t capacity_ = 0;
  std::size_t fill_ = 0;
  std::uint64_t offset_ = 0;
  std::uint64_t count_ = 0;
  bool finished_ = false;
};

/// Sequential buffered reader over records [first, first+count).
template <RecordCodec Codec>
class TableReader {
 public:
  using value_type = typename Codec::value_type;

  TableReader(Workspace& ws, const Table& table, Codec codec = {}, Traffic traffic = Traffic::table,
              std::size_t buffer_bytes = 0, std::uint64_t first = 0,
              std::optional<std::uint64_t> count = std::nullopt)
      : ws_(&ws), codec_(std::move(codec)), traffic_(traffic), width_(codec_.width()) {
    if (table.record_width != width_) {
      throw InputError("table '" + table.path.string() + "' has record width " +
                       std::to_string(table.record_width) + ", expected " + std::to_string(width_));
    }
    end_ = count ? std::min(table.record_count, first + *count) : table.record_count;
    next_ = std::min(first, end_);
    if (next_ < end_) file_ = File(table.path, File::Mode::read);
    if (buffer_bytes == 0) buffer_bytes = ws.stream_buffer_bytes();
    capacity_records_ = std::max<std::size_t>(1, buffer_bytes / width_);
    buffer_.resize(capacity_records_ * width_);
    buffered_first_ = next_;
  }

  /// Next record, or false at end.
  bool next(value_type& out) {
    if (peeked_) {
      out = std::move(peek_value_);
      peeked_ = false;
      return true;
    }
    const std::byte* raw = next_raw();
    if (!raw) return false;
    out = codec_.decode(raw);
    return true;
  }

  /// Pointer to the next encoded record (valid until the following call),
  /// or nullptr at end. Must not be mixed with peek().
  const std::byte* next_raw() {
    if (next_ >= end_) return nullptr;
    if (next_ >= buffered_first_ + buffered_count_) refill();
    const std::byte* p = buffer_.data() + (next_ - buffered_first_) * width_;
    ++next_;
    return p;
  }

  /// Decoded lookahead without consuming.
  const value_type* peek() {
    if (!peeked_) {
      if (next_ >= end_) return nullptr;
      peek_value_ = codec_.decode(next_raw());
      peeked_ = true;
    }
    return &peek_value_;
  }

  /// Same as next(); reads naturally after peek().
  bool pop(value_type& out) { return next(out); }

  bool done() const { return !peeked_ && next_ >= end_; }
  const Codec& codec() const { return codec_; }

 private:
  void refill() {
    buffered_first_ = next_;
    buffered_count_ = std::min<std::uint64_t>(capacity_records_, end_ - next_);
    const std::size_t bytes = buffered_count_ * width_;
    const std::size_t got = file_.read_at(buffer_.data(), bytes, buffered_first_ * width_);
    if (got != bytes) {
      throw IoError("table '" + file_.path().string() + "' is shorter than its record count");
    }
    ws_->io().charge_read(traffic_, bytes);
  }

  Workspace* ws_;
  Codec codec_;
  Traffic traffic_;
  std::size_t width_;
  File file_;
  std::vector<std::byte> buffer_;
  std::size_t capacity_records_ = 0;
  std::uint64_t next_ = 0;
  std::uint64_t end_ = 0;
  std::uint64_t buffered_first_ = 0;
  std::uint64_t buffered_count_ = 0;
  value_type peek_value_{};
  bool peeked_ = false;
};

/// Calls fn(record) for each record in file order.
template <RecordCodec Codec, class Fn>
void scan(Workspace& ws, const Table& t, Fn&& fn, Codec codec = {}, Traffic traffic = Traffic::table) {
  TableReader<Codec> r(ws, t, std::move(codec), traffic);
  typename Codec::value_type v{};
  while (r.next(v)) fn(v);
}

/// Loads a (small) table into memory.
template <RecordCodec Codec>
std::vector<typename Codec::value_type> read_all(Workspace& ws, const Table& t, Codec codec = {},
                                                 Traffic traffic = Traffic::table) {
  std::vector<typename Codec::value_type> out;
  out.reserve(t.record_count);
  scan<Codec>(ws, t, [&](const auto& v) { out.push_back(v); }, std::move(codec), traffic);
  return out;
}

/// Writes records from a range to a new table.
template <RecordCodec Codec, class Range>
Table write_all(Workspace& ws, const std::filesystem::path& path, const Range& records, Codec codec = {},
                std::string sort_key = {}, Traffic traffic = Traffic::table) {
  TableWriter<Codec> w(ws, path, std::move(codec), traffic);
  for (const auto& r : records) w.push(r);
  return w.finish(std::move(sort_key));
}

/// True if the table is non-decreasing under `less` (one scan).
template <RecordCodec Codec, class Less>
bool is_sorted_table(Workspace& ws, const Table& t, Less less, Codec codec = {},
                     Traffic traffic = Traffic::table) {
  TableReader<Codec> r(ws, t, std::move(codec), traffic);
  typename Codec::value_type prev{}, cur{};
  if (!r.next(prev)) return true;
  while (r.next(cur)) {
    if (less(cur, prev)) return false;
    prev = std::move(cur);
  }
  return true;
}

}  // namespace embisim::em
