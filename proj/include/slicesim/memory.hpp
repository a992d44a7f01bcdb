#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "slicesim/trace.hpp"

namespace slicesim {

enum class HitLevel : uint8_t { L1, Llc, Mem };

struct CacheConfig {
  uint32_t size_kb;
  uint32_t assoc;
  uint32_t latency;  // cycles added on a hit at this level
};

struct MemConfig {
  CacheConfig l1{32, 8, 4};
  CacheConfig llc{512, 16, 30};
  uint32_t l1_mshrs = 8;
  uint32_t dram_latency = 90;   // cycles beyond an LLC hit
  double dram_bw_gbps = 0.0;    // 0 = unlimited
  double clock_ghz = 2.0;       // converts bandwidth to bytes/cycle
  bool prefetch = true;         // stride prefetcher filling the LLC
  uint32_t prefetch_degree = 1;
  bool warm = false;            // pre-touch all lines before timing
};

// Set-associative tag array with true LRU.
class CacheArray {
 public:
  CacheArray(uint32_t size_kb, uint32_t assoc);
  bool access(uint64_t line);        // touch; true on hit
  bool contains(uint64_t line) const;
  void install(uint64_t line);       // insert as MRU, evicting LRU if needed
 private:
  uint32_t sets_, assoc_;
  std::vector<std::vector<uint64_t>> data_;  // per set, MRU first
};

// PC-indexed stride detector.  A stream fires once the same stride repeats
// (confidence threshold 2) and re-learns from scratch when it changes.
class StridePrefetcher {
 public:
  explicit StridePrefetcher(uint32_t streams = 16) : max_streams_(streams) {}
  // Returns prefetch target lines for this access, if any.
  std::vector<uint64_t> train(uint64_t pc, uint64_t line, uint32_t degree);
 private:
  struct Stream {
    uint64_t pc;
    uint64_t last_line;
    int64_t stride;
    uint32_t confidence;
  };
  uint32_t max_streams_;
  std::vector<Stream> streams_;  // LRU order, most recent first
};

struct MemResult {
  bool accepted = true;       // false: no MSHR free, retry later
  HitLevel level = HitLevel::L1;  // where this access found the line
  HitLevel site = HitLevel::L1;   // effective service site (merge -> parent's)
  uint64_t complete_cycle = 0;
};

// L1 + shared LLC + DRAM, with L1 miss handling through MSHRs and an
// LLC stride prefetcher.  Loads are timed; stores write instantly.
class MemoryHierarchy {
 public:
  explicit MemoryHierarchy(const MemConfig& cfg);

  // Apply all fills due at or before `now`.  Call once per cycle, first.
  void begin_cycle(uint64_t now);

  MemResult load_access(uint64_t addr, uint32_t size, uint64_t pc,
                        uint64_t now);
  void store_write(uint64_t addr, uint32_t size, uint64_t pc, uint64_t now);

  void warm_line(uint64_t addr);  // install in LLC and L1, no counters

  uint32_t mshrs_in_use() const { return (uint32_t)mshrs_.size(); }
  uint32_t mshr_capacity() const { return cfg_.l1_mshrs; }

  // Counters.
  uint64_t llc_accesses = 0;   // demand lookups (L1 misses)
  uint64_t llc_misses = 0;     // demand lookups needing DRAM
  uint64_t prefetches_issued = 0;
  uint64_t prefetch_covered = 0;  // demand hits on in-flight prefetches

 private:
  uint64_t dram_fill_cycle(uint64_t now);
  void issue_prefetches(uint64_t pc, uint64_t line, uint64_t now);

  MemConfig cfg_;
  CacheArray l1_, llc_;
  StridePrefetcher pf_;

  struct Mshr {
    uint64_t line;
    uint64_t fill_cycle;
    HitLevel site;
  };
  std::vector<Mshr> mshrs_;

  struct Fill {
    uint64_t line;
    bool into_l1;  // demand fills reach L1; prefetches stop at the LLC
  };
  std::multimap<uint64_t, Fill> fills_;          // keyed by fill cycle
  std::map<uint64_t, uint64_t> llc_inflight_;    // line -> LLC fill cycle
  uint64_t next_dram_slot_ = 0;
};

}  // namespace slicesim
