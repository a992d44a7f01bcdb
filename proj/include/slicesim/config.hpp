#pragma once

#include <map>
#include <string>
#include <vector>

#include "slicesim/core.hpp"
#include "slicesim/memory.hpp"
#include "slicesim/report.hpp"

namespace slicesim {

struct SimConfig {
  CoreConfig core;
  MemConfig mem;
};

// key=value pairs, '#' comments, blank lines ignored.  Duplicate keys are an
// error; so are unknown keys (the message lists the valid ones).
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_config_text(const std::string& text,
                            const std::string& origin);
KeyValues parse_config_file(const std::string& path);

// Settings win by layer: later maps override earlier ones.  The variant is
// fixed first so its per-variant defaults (queue sizes, branch penalty)
// apply before explicit keys.
SimConfig build_sim_config(const std::vector<KeyValues>& layers);

const std::vector<std::string>& valid_config_keys();

// A sweep: one trace (unless swept as an axis), a base config, and the cross
// product of the axes in declaration order (last axis fastest).
struct PlanAxis {
  std::vector<std::string> keys;                 // compound axes move together
  std::vector<std::vector<std::string>> values;  // one vector per point
};

struct Plan {
  std::string base_path;   // optional config file
  std::string trace_spec;  // path or "gen: pattern=..."
  std::string out_path;    // optional; CLI may override
  std::vector<PlanAxis> axes;
};

Plan parse_plan_file(const std::string& path);

struct PlanOutcome {
  std::vector<ReportRow> rows;  // one per configuration, in plan order
  int failures = 0;
};

// Runs every configuration of the plan, `jobs` at a time (capped by the
// SLICESIM_THREADS environment variable when set).  Row order and content
// do not depend on the job count.
PlanOutcome run_plan(const Plan& plan, const KeyValues& overrides, int jobs);

// Loads a trace from a path, or generates one from a "gen: ..." spec.
Trace load_trace_spec(const std::string& spec);

}  // namespace slicesim
