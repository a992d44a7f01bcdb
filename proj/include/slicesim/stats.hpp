#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slicesim/core.hpp"
#include "slicesim/memory.hpp"
#include "slicesim/trace.hpp"

namespace slicesim {

// Why no micro-op issued in a zero-issue cycle.
enum class StallCategory : uint8_t {
  SliceDep,   // oldest waiting slice depends on an unfinished slice
  EmptyBiq,   // no slices queued at all
  LsAlias,    // oldest waiting slice is a load blocked by an older store
  Other,      // anything else (non-slice stalls, FU conflicts, drain)
};
constexpr size_t kNumStallCategories = 4;
const char* stall_category_name(StallCategory c);

struct LoadRecord {
  uint64_t trace_seq;
  uint64_t uop_id;
  uint64_t issue_cycle;
  uint64_t complete_cycle;
  uint64_t addr;
  uint32_t size;
  HitLevel site;
};

struct StoreRecord {
  uint64_t trace_seq;
  uint64_t uop_id;     // store micro-op (the one that writes)
  uint64_t write_cycle;
  uint64_t addr;
  uint32_t size;
};

struct RunStats {
  std::string trace_name;
  Variant variant = Variant::Freeway;

  uint64_t cycles = 0;
  uint64_t retired_uops = 0;
  uint64_t retired_instrs = 0;

  uint64_t zero_issue_cycles = 0;
  std::array<uint64_t, kNumStallCategories> issue_stalls{};
  uint64_t dispatch_stall_cycles = 0;  // cycles where structure space blocked dispatch

  // Dynamic slices by dependence depth (0 = independent).
  std::map<uint32_t, uint64_t> depth_histogram;
  // Producer slices (depth 0, with consumers) by where their load hit.
  std::array<uint64_t, 3> producer_hit_site{};  // L1, LLC, MEM

  uint64_t llc_accesses = 0;
  uint64_t llc_misses = 0;
  uint64_t prefetches_issued = 0;
  uint64_t prefetch_covered = 0;

  // Memory-level parallelism: mean L1 MSHRs in use over cycles with >= 1.
  double mlp_avg = 0.0;
  uint64_t mlp_cycles = 0;

  // Largest set of demand loads in flight at once (trace seqs, first time
  // the maximum was reached).  Empty when the maximum never exceeded one.
  uint32_t peak_inflight_loads = 0;
  std::vector<uint64_t> peak_inflight_set;

  std::vector<LoadRecord> loads;
  std::vector<StoreRecord> stores;
  // (cycle, uop id) per issue, in issue order; filled when detail is on.
  std::vector<std::pair<uint64_t, uint64_t>> issue_log;

  double ipc() const;
  double mpki() const;
};

double speedup(const RunStats& baseline, const RunStats& other);
double gmean(const std::vector<double>& xs);

// Stall shares: per category, as a fraction of all cycles and of zero-issue
// cycles.  All-zero input gives all-zero output.
std::array<double, kNumStallCategories> stall_fraction_of_cycles(
    const RunStats& s);
std::array<double, kNumStallCategories> stall_fraction_of_zero_issue(
    const RunStats& s);

struct MemOrderViolation {
  uint64_t load_seq;
  uint64_t store_seq;
};

// Checks that every load overlapping an older store issued no earlier than
// that store's write.  Needs the load/store records from a detailed run.
std::vector<MemOrderViolation> audit_memory_order(const RunStats& s);

}  // namespace slicesim
