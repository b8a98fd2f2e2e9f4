#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "embisim/em/file.hpp"
#include "embisim/em/io_counter.hpp"
#include "embisim/em/workspace.hpp"

namespace embisim::em {

/// A file of variable-length records, each stored as [u32 len][len bytes].
struct VarFile {
  std::filesystem::path path;
  std::uint64_t record_count = 0;
  std::uint64_t byte_size = 0;
};

class VarWriter {
 public:
  VarWriter(Workspace& ws, std::filesystem::path path, Traffic traffic, std::size_t buffer_bytes = 0);
  ~VarWriter();
  VarWriter(const VarWriter&) = delete;
  VarWriter& operator=(const VarWriter&) = delete;

  /// Appends a record; returns its byte offset in the file.
  std::uint64_t push(std::string_view rec);
  std::uint64_t count() const { return count_; }
  std::uint64_t offset() const { return offset_ + fill_; }
  VarFile finish();

 private:
  void flush();
  void put(const std::byte* p, std::size_t n);

  Workspace* ws_;
  Traffic traffic_;
  File file_;
  std::vector<std::byte> buffer_;
  std::size_t fill_ = 0;
  std::uint64_t offset_ = 0;
  std::uint64_t count_ = 0;
  bool finished_ = false;
};

/// Sequential reader over a byte range of a VarFile.
class VarReader {
 public:
  VarReader(Workspace& ws, const VarFile& f, Traffic traffic, std::size_t buffer_bytes = 0,
            std::uint64_t begin = 0, std::uint64_t end = UINT64_MAX);
  /// Reads into a caller-owned file handle (used for runs that share one file).
  VarReader(Workspace& ws, const File& shared, Traffic traffic, std::size_t buffer_bytes, std::uint64_t begin,
            std::uint64_t end);

  bool next(std::string& out);
  std::uint64_t position() const { return pos_; }

 private:
  void take(std::byte* dst, std::size_t n);

  Workspace* ws_;
  Traffic traffic_;
  std::unique_ptr<File> own_;
  const File* file_;
  std::vector<std::byte> buffer_;
  std::size_t buf_pos_ = 0;
  std::size_t buf_len_ = 0;
  std::uint64_t pos_;
  std::uint64_t file_pos_;
  std::uint64_t end_;
};

/// External merge sort of variable-length records. Runs are formed from
/// `memory_bytes` of payload; merges combine up to `fan_in` runs.
/// Records equal under `less` keep input order.
class VarSorter {
 public:
  using Less = bool (*)(std::string_view, std::string_view);

  struct Options {
    std::uint64_t memory_bytes = 0;
    std::uint64_t fan_in = 0;
    Traffic traffic = Traffic::table;
    std::filesystem::path output;
  };

  VarSorter(Workspace& ws, Less less, Options opts);
  ~VarSorter();
  VarSorter(const VarSorter&) = delete;
  VarSorter& operator=(const VarSorter&) = delete;

  void push(std::string rec);
  VarFile finish();
  std::uint64_t pushed() const { return pushed_; }

 private:
  struct Span {
    std::uint64_t begin;
    std::uint64_t end;
  };

  void spill();
  void merge_pass();

  Workspace* ws_;
  Less less_;
  Options opts_;
  std::vector<std::string> run_;
  std::uint64_t run_bytes_ = 0;
  std::uint64_t pushed_ = 0;
  std::vector<Span> runs_;
  std::unique_ptr<VarWriter> writer_;
  VarFile result_;
};

}  // namespace embisim::em
