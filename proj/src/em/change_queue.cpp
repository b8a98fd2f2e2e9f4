#include "embisim/em/change_queue.hpp"

#include <algorithm>

namespace embisim::em {

ChangeQueue::ChangeQueue(Workspace& ws, std::uint64_t staging_bytes) : ws_(&ws) {
  if (staging_bytes == 0) {
    staging_bytes = std::max<std::uint64_t>(2ull * ws.budget().page_size, ws.budget().table_buffer_bytes / 8);
  }
  staging_bytes_ = staging_bytes;
}

ChangeQueue::~ChangeQueue() = default;

void ChangeQueue::push(Level level, NodeId n) {
  if (level == 0) throw InputError("change queue levels start at 1");
  auto& b = buckets_[level];
  if (!b) {
    SortOptions opts;
    opts.dedup = true;
    opts.sort_key = "nId";
    opts.memory_bytes = staging_bytes_;
    b = std::make_unique<Sorter>(*ws_, U64Codec{}, std::less<std::uint64_t>{}, opts);
  }
  b->push(n.value);
}

std::optional<ChangeQueue::Drained> ChangeQueue::drain_level() {
  if (buckets_.empty()) return std::nullopt;
  auto it = buckets_.begin();
  Drained d;
  d.level = it->first;
  d.ids = it->second->finish();
  buckets_.erase(it);
  return d;
}

std::uint64_t ChangeQueue::pending(Level level) const {
  auto it = buckets_.find(level);
  return it == buckets_.end() ? 0 : it->second->pushed();
}

}  // namespace embisim::em
