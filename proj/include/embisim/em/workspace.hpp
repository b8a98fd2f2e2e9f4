#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "embisim/em/io_counter.hpp"

namespace embisim::em {

inline constexpr std::uint64_t kMiB = 1024 * 1024;

/// Internal-memory budget. The table buffer bounds sorts (B pages); the
/// store buffer bounds the signature store. Both must hold at least two
/// pages.
struct BufferBudget {
  std::uint64_t table_buffer_bytes = 128 * kMiB;
  std::uint64_t store_buffer_bytes = 128 * kMiB;
  std::uint32_t page_size = 4096;

  std::uint64_t table_pages() const { return table_buffer_bytes / page_size; }
  std::uint64_t store_pages() const { return store_buffer_bytes / page_size; }

  /// Throws ConfigError when a buffer is smaller than two pages.
  void validate() const;
};

/// Number of pages occupied by `bytes`.
inline std::uint64_t pages_of(std::uint64_t bytes, std::uint32_t page_size) {
  return (bytes + page_size - 1) / page_size;
}

/// Execution context shared by external-memory operations: the memory
/// budget, the I/O counter, and a private scratch directory for
/// intermediate files. The scratch directory is removed on destruction.
class Workspace {
 public:
  Workspace(const std::filesystem::path& scratch_root, BufferBudget budget, IoCounter& io);
  ~Workspace();

  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const BufferBudget& budget() const { return budget_; }
  IoCounter& io() { return io_; }
  const std::filesystem::path& scratch_dir() const { return dir_; }

  /// Fresh, unused path inside the scratch directory.
  std::filesystem::path temp_path(std::string_view stem);

  /// Buffer size for sequential readers/writers: a page multiple, capped by
  /// the table buffer.
  std::size_t stream_buffer_bytes() const;

 private:
  BufferBudget budget_;
  IoCounter& io_;
  std::filesystem::path dir_;
  std::uint64_t next_temp_ = 0;
};

}  // namespace embisim::em
