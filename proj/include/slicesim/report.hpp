#pragma once

#include <string>
#include <vector>

#include "slicesim/core.hpp"
#include "slicesim/memory.hpp"
#include "slicesim/stats.hpp"

namespace slicesim {

// One simulated configuration in a report.  Metrics are empty when the run
// failed; speedup_vs_ino is filled at serialization time from a matching
// in-order row in the same report, when present.
struct ReportRow {
  std::string trace;
  Variant variant = Variant::Freeway;
  uint32_t width = 2, window = 64;
  uint32_t q_a = 64, q_b = 32, q_y = 32;
  uint32_t l1_lat = 4;
  bool prefetch = true;

  bool failed = false;
  uint64_t cycles = 0;
  double ipc = 0.0;
  double mpki = 0.0;
  double mlp_avg = 0.0;
  std::array<double, kNumStallCategories> stall_frac{};  // of all cycles
};

ReportRow make_row(const CoreConfig& core, const MemConfig& mem,
                   const RunStats& stats);
ReportRow make_failed_row(const std::string& trace_name,
                          const CoreConfig& core, const MemConfig& mem);

// schema=1: stable column set, no timestamps, fixed float formatting.
std::string to_csv(const std::vector<ReportRow>& rows);
std::string to_json(const std::vector<ReportRow>& rows);

}  // namespace slicesim
