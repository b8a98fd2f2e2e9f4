#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

namespace embisim::em {

/// Owning POSIX file descriptor. All failures throw IoError naming the path.
class File {
 public:
  enum class Mode { read, write_truncate, read_write };

  File() = default;
  File(std::filesystem::path path, Mode mode);
  ~File();

  File(File&& other) noexcept;
  File& operator=(File&& other) noexcept;
  File(const File&) = delete;
  File& operator=(const File&) = delete;

  bool is_open() const { return fd_ >= 0; }
  const std::filesystem::path& path() const { return path_; }

  /// Reads up to n bytes at offset; returns the count actually read
  /// (short only at end of file).
  std::size_t read_at(void* buf, std::size_t n, std::uint64_t offset) const;
  void write_at(const void* buf, std::size_t n, std::uint64_t offset);
  std::uint64_t size() const;
  void truncate(std::uint64_t size);
  void sync();
  void close();

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

/// Deletes the file if it exists; errors are ignored.
void remove_quietly(const std::filesystem::path& p) noexcept;

/// Writes `data` to `path` through a temporary sibling and rename().
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace embisim::em
