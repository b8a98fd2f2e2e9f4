#include "embisim/em/external_sort.hpp"

namespace embisim::em {

std::uint64_t merge_sort_io_pages(std::uint64_t table_pages, std::uint64_t buffer_pages) {
  if (table_pages == 0) return 0;
  const std::uint64_t fan_in = std::max<std::uint64_t>(2, buffer_pages - 1);
  std::uint64_t runs = (table_pages + buffer_pages - 1) / buffer_pages;
  // ceil(log_fan_in(runs)) by repeated multiplication, exact for integers.
  std::uint64_t passes = 0;
  std::uint64_t reach = 1;
  while (reach < runs) {
    reach *= fan_in;
    ++passes;
  }
  return 2 * table_pages * (1 + passes);
}

}  // namespace embisim::em
