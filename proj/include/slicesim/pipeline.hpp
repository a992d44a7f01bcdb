#pragma once

#include "slicesim/core.hpp"
#include "slicesim/memory.hpp"
#include "slicesim/stats.hpp"
#include "slicesim/trace.hpp"

namespace slicesim {

// Runs the trace through one core configuration and memory hierarchy.
// With `detail` set, the per-issue log is recorded as well.
RunStats simulate(const Trace& trace, const CoreConfig& core,
                  const MemConfig& mem, bool detail = false);

}  // namespace slicesim
