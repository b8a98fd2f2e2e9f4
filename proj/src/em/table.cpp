#include "embisim/em/table.hpp"

namespace embisim::em {

Table open_table(const std::filesystem::path& path, std::size_t record_width, std::string sort_key) {
  if (record_width == 0) throw InputError("record width must be positive");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat table '" + path.string() + "': " + ec.message());
  if (size % record_width != 0) {
    throw IoError("table '" + path.string() + "' length " + std::to_string(size) +
                  " is not a multiple of record width " + std::to_string(record_width));
  }
  return Table{path, record_width, size / record_width, std::move(sort_key)};
}

Table create_empty_table(const std::filesystem::path& path, std::size_t record_width, std::string sort_key) {
  File f(path, File::Mode::write_truncate);
  f.close();
  return Table{path, record_width, 0, std::move(sort_key)};
}

void drop_table(const Table& t) noexcept {
  if (!t.path.empty()) remove_quietly(t.path);
}

Table move_table(const Table& t, const std::filesystem::path& dest) {
  std::error_code ec;
  std::filesystem::rename(t.path, dest, ec);
  if (ec) {
    // Different file systems: copy then delete.
    std::filesystem::copy_file(t.path, dest, std::filesystem::copy_options::overwrite_existing, ec);
    if (ec) {
      throw IoError("cannot move table '" + t.path.string() + "' to '" + dest.string() + "': " + ec.message());
    }
    remove_quietly(t.path);
  }
  Table out = t;
  out.path = dest;
  return out;
}

}  // namespace embisim::em
