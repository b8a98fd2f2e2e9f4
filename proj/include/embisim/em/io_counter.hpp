#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace embisim::em {

/// Which byte counters a transfer is charged to. Table traffic covers
/// sorts, scans and joins over node/edge tables; store traffic covers the
/// signature storage facility.
enum class Traffic { table, store };

struct IoSnapshot {
  std::uint64_t table_read = 0;
  std::uint64_t table_write = 0;
  std::uint64_t store_read = 0;
  std::uint64_t store_write = 0;

  std::uint64_t table_total() const { return table_read + table_write; }
  std::uint64_t store_total() const { return store_read + store_write; }
  std::uint64_t total() const { return table_total() + store_total(); }

  IoSnapshot operator-(const IoSnapshot& o) const {
    return {table_read - o.table_read, table_write - o.table_write, store_read - o.store_read,
            store_write - o.store_write};
  }
  IoSnapshot& operator+=(const IoSnapshot& o) {
    table_read += o.table_read;
    table_write += o.table_write;
    store_read += o.store_read;
    store_write += o.store_write;
    return *this;
  }
  bool operator==(const IoSnapshot&) const = default;
};

/// Cumulative bytes moved between in-memory buffers and files.
/// Counters only grow until reset() is called.
class IoCounter {
 public:
  void charge_read(Traffic t, std::uint64_t bytes) {
    (t == Traffic::table ? now_.table_read : now_.store_read) += bytes;
  }
  void charge_write(Traffic t, std::uint64_t bytes) {
    (t == Traffic::table ? now_.table_write : now_.store_write) += bytes;
  }

  IoSnapshot snapshot() const { return now_; }
  void reset() { now_ = {}; }

  /// Flat key/value export, e.g. for the stats command.
  static std::vector<std::pair<std::string, std::uint64_t>> report(const IoSnapshot& s) {
    return {{"table_read_bytes", s.table_read},
            {"table_write_bytes", s.table_write},
            {"store_read_bytes", s.store_read},
            {"store_write_bytes", s.store_write}};
  }

 private:
  IoSnapshot now_;
};

}  // namespace embisim::em
