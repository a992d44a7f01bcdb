#pragma once

#include <string>
#include <vector>

#include "slicesim/trace.hpp"

namespace slicesim {

enum class Pattern : uint8_t {
  IndepLoads,   // independent loads, no register reuse between them
  DepChain,     // per iteration: a chain of depth+1 loads, each addressed by the last
  MixedSlices,  // per iteration: 8 single-load slices, a fraction of them dependent
  AliasMix,     // per iteration: store + paired load (aliasing with probability p)
                // followed by two independent payload loads
  Stream,       // one strided load per iteration, single pc
};

const char* pattern_name(Pattern p);

struct WorkloadSpec {
  Pattern pattern = Pattern::IndepLoads;
  uint32_t depth = 1;        // DepChain
  double fraction = 0.5;     // MixedSlices: dependent share
  double alias_p = 1.0;      // AliasMix
  uint32_t stride = 64;      // Stream, bytes
  uint64_t footprint = 1 << 14;  // bytes, must cover at least one line
  uint32_t iterations = 100;
  uint64_t seed = 1;
  double mispred_rate = 0.0; // share of emitted branches flagged mispredicted
};

// Deterministic: equal specs produce byte-identical traces.
Trace generate(const WorkloadSpec& spec);

// "pattern=dep-chain depth=2 iters=100 footprint=4096 seed=7" (comma or
// space separated); used by the CLI and by sweep plan files.
WorkloadSpec parse_workload_spec(const std::string& text);
std::string workload_name(const WorkloadSpec& spec);

struct SuiteEntry {
  std::string name;
  Trace trace;
};

// Fixed microbenchmark set covering every pattern; fig1 plus generated
// kernels. Used by the regression and acceptance tests.
std::vector<SuiteEntry> bundled_suite();

}  // namespace slicesim
