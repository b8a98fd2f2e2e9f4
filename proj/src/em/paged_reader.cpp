#include "embisim/em/paged_reader.hpp"

#include <algorithm>
#include <cstring>

namespace embisim::em {

PagedFile::PagedFile(Workspace& ws, const std::filesystem::path& path, Traffic traffic,
                     std::size_t cache_pages)
    : ws_(&ws),
      file_(path, File::Mode::read),
      traffic_(traffic),
      page_size_(ws.budget().page_size),
      capacity_(std::max<std::size_t>(1, cache_pages)),
      size_(file_.size()) {}

const std::vector<std::byte>& PagedFile::page(std::uint64_t index) {
  if (auto it = index_.find(index); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  std::vector<std::byte> buf;
  if (lru_.size() >= capacity_) {
    buf = std::move(lru_.back().second);
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  buf.resize(page_size_);
  const std::uint64_t offset = index * page_size_;
  const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(page_size_, size_ - offset));
  const std::size_t got = file_.read_at(buf.data(), want, offset);
  if (got != want) throw IoError("short page read on '" + file_.path().string() + "'");
  ws_->io().charge_read(traffic_, got);
  ++loads_;
  lru_.emplace_front(index, std::move(buf));
  index_[index] = lru_.begin();
  return lru_.front().second;
}

void PagedFile::read(std::uint64_t offset, std::size_t n, std::byte* out) {
  if (offset + n > size_) {
    throw IoError("read past end of '" + file_.path().string() + "'");
  }
  while (n > 0) {
    const std::uint64_t pi = offset / page_size_;
    const std::size_t in_page = static_cast<std::size_t>(offset - pi * page_size_);
    const std::size_t take = std::min<std::size_t>(n, page_size_ - in_page);
    const auto& p = page(pi);
    std::memcpy(out, p.data() + in_page, take);
    out += take;
    offset += take;
    n -= take;
  }
}

}  // namespace embisim::em
