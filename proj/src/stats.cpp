#include "slicesim/stats.hpp"

#include <cassert>
#include <cmath>

namespace slicesim {

const char* stall_category_name(StallCategory c) {
  switch (c) {
    case StallCategory::SliceDep: return "slice_dep";
    case StallCategory::EmptyBiq: return "empty_biq";
    case StallCategory::LsAlias: return "ls_alias";
    case StallCategory::Other: return "other";
  }
  return "?";
}

double RunStats::ipc() const {
  return cycles ? (double)retired_instrs / (double)cycles : 0.0;
}

double RunStats::mpki() const {
  return retired_instrs ? 1000.0 * (double)llc_misses / (double)retired_instrs
                        : 0.0;
}

double speedup(const RunStats& baseline, const RunStats& other) {
  assert(other.cycles > 0);
  return (double)baseline.cycles / (double)other.cycles;
}

double gmean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double log_sum = 0.0;
  for (double x : xs) {
    assert(x > 0.0);
    log_sum += std::log(x);
  }
  return std::exp(log_sum / (double)xs.size());
}

static std::array<double, kNumStallCategories> fractions(
    const std::array<uint64_t, kNumStallCategories>& counts, uint64_t denom) {
  std::array<double, kNumStallCategories> out{};
  if (!denom) return out;
  for (size_t i = 0; i < counts.size(); ++i)
    out[i] = (double)counts[i] / (double)denom;
  return out;
}

std::array<double, kNumStallCategories> stall_fraction_of_cycles(
    const RunStats& s) {
  return fractions(s.issue_stalls, s.cycles);
}

std::array<double, kNumStallCategories> stall_fraction_of_zero_issue(
    const RunStats& s) {
  return fractions(s.issue_stalls, s.zero_issue_cycles);
}

std::vector<MemOrderViolation> audit_memory_order(const RunStats& s) {
  std::vector<MemOrderViolation> bad;
  for (const LoadRecord& ld : s.loads) {
    for (const StoreRecord& st : s.stores) {
      if (st.trace_seq > ld.trace_seq) continue;  // younger store
      bool overlap = st.addr < ld.addr + ld.size && ld.addr < st.addr + st.size;
      if (!overlap) continue;
      if (ld.issue_cycle < st.write_cycle)
        bad.push_back({ld.trace_seq, st.trace_seq});
    }
  }
  return bad;
}

}  // namespace slicesim
