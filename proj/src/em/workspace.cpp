#include "embisim/em/workspace.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <string>

#include "embisim/core/types.hpp"

namespace embisim::em {

void BufferBudget::validate() const {
  if (page_size == 0) throw ConfigError("page size must be positive");
  if (table_buffer_bytes < 2ull * page_size) {
    throw ConfigError("table buffer must hold at least two pages");
  }
  if (store_buffer_bytes < 2ull * page_size) {
    throw ConfigError("store buffer must hold at least two pages");
  }
}

namespace {
std::atomic<std::uint64_t> g_workspace_seq{0};
}

Workspace::Workspace(const std::filesystem::path& scratch_root, BufferBudget budget, IoCounter& io)
    : budget_(budget), io_(io) {
  budget_.validate();
  std::error_code ec;
  std::filesystem::create_directories(scratch_root, ec);
  if (ec) throw IoError("cannot create scratch root '" + scratch_root.string() + "': " + ec.message());
  for (;;) {
    dir_ = scratch_root / ("ws-" + std::to_string(::getpid()) + "-" + std::to_string(g_workspace_seq++));
    if (std::filesystem::create_directory(dir_, ec)) break;
    if (ec) throw IoError("cannot create scratch dir '" + dir_.string() + "': " + ec.message());
  }
}

Workspace::~Workspace() {
  std::error_code ec;
  std::filesystem::remove_all(dir_, ec);
}

std::filesystem::path Workspace::temp_path(std::string_view stem) {
  return dir_ / (std::string(stem) + "." + std::to_string(next_temp_++) + ".tmp");
}

std::size_t Workspace::stream_buffer_bytes() const {
  const std::uint64_t want = 16ull * budget_.page_size;
  return static_cast<std::size_t>(std::min<std::uint64_t>(want, budget_.table_buffer_bytes));
}

}  // namespace embisim::em
