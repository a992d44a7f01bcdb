#include "slicesim/store_buffer.hpp"

#include <stdexcept>

namespace slicesim {

namespace {
bool ranges_overlap(uint64_t a, uint32_t an, uint64_t b, uint32_t bn) {
  return a < b + bn && b < a + an;
}
}  // namespace

void StoreBuffer::allocate(uint64_t uop_id, uint64_t true_addr,
                           uint32_t true_size) {
  if (full()) throw std::logic_error("store buffer: allocate past capacity");
  if (!entries_.empty() && entries_.back().uop_id >= uop_id)
    throw std::logic_error("store buffer: allocate out of order");
  entries_.push_back({uop_id, false, 0, 0, true_addr, true_size});
}

void StoreBuffer::resolve(uint64_t uop_id, uint64_t addr, uint32_t size) {
  for (Entry& e : entries_) {
    if (e.uop_id != uop_id) continue;
    if (e.resolved) throw std::logic_error("store buffer: double resolve");
    e.resolved = true;
    e.addr = addr;
    e.size = size;
    return;
  }
  throw std::logic_error("store buffer: resolve of unknown entry");
}

void StoreBuffer::release(uint64_t uop_id) {
  if (entries_.empty() || entries_.front().uop_id != uop_id)
    throw std::logic_error("store buffer: release out of order");
  if (!entries_.front().resolved)
    throw std::logic_error("store buffer: release of unresolved store");
  entries_.pop_front();
}

StoreBuffer::CheckResult StoreBuffer::load_check(uint64_t load_uop_id,
                                                 uint64_t addr, uint32_t size,
                                                 bool oracle) const {
  for (const Entry& e : entries_) {
    if (e.uop_id > load_uop_id) break;  // younger than the load
    if (!e.resolved) {
      if (!oracle) return {LoadCheck::StallUnresolved, e.uop_id};
      if (ranges_overlap(e.true_addr, e.true_size, addr, size))
        return {LoadCheck::StallAlias, e.uop_id};
      continue;
    }
    if (ranges_overlap(e.addr, e.size, addr, size))
      return {LoadCheck::StallAlias, e.uop_id};
  }
  return {LoadCheck::Proceed, 0};
}

}  // namespace slicesim
