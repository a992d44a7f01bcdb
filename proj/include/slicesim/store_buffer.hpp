#pragma once

#include <cstdint>
#include <deque>

namespace slicesim {

enum class LoadCheck : uint8_t { Proceed, StallUnresolved, StallAlias };

// Tracks stores between dispatch and their write to memory.  Entries are
// ordered by micro-op id; stores leave in program order.
class StoreBuffer {
 public:
  explicit StoreBuffer(size_t capacity) : capacity_(capacity) {}

  bool full() const { return entries_.size() >= capacity_; }
  size_t size() const { return entries_.size(); }
  size_t capacity() const { return capacity_; }

  // Dispatch of the store micro-op.  The true address is kept aside so the
  // oracle check can consult it before the address computation finishes.
  void allocate(uint64_t uop_id, uint64_t true_addr, uint32_t true_size);

  // The address micro-op finished executing.
  void resolve(uint64_t uop_id, uint64_t addr, uint32_t size);

  // The store issued its write.  Must be the oldest entry.
  void release(uint64_t uop_id);

  struct CheckResult {
    LoadCheck status = LoadCheck::Proceed;
    uint64_t blocking_uop = 0;  // valid unless status == Proceed
  };

  // May a load to [addr, addr+size) issue?  Scans stores older than the load,
  // oldest first, and reports the first blocker.  With `oracle` set,
  // unresolved stores are checked against their true address instead of
  // conservatively blocking.
  CheckResult load_check(uint64_t load_uop_id, uint64_t addr, uint32_t size,
                         bool oracle) const;

 private:
  struct Entry {
    uint64_t uop_id;
    bool resolved;
    uint64_t addr;
    uint32_t size;
    uint64_t true_addr;
    uint32_t true_size;
  };
  std::deque<Entry> entries_;
  size_t capacity_;
};

}  // namespace slicesim
