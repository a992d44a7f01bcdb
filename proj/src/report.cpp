#include "slicesim/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace slicesim {

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// The in-order row this row is compared against, if the report has one.
const ReportRow* ino_baseline(const std::vector<ReportRow>& rows,
                              const ReportRow& r) {
  for (const ReportRow& b : rows) {
    if (b.failed || b.variant != Variant::Ino) continue;
    if (b.trace == r.trace && b.width == r.width && b.window == r.window &&
        b.l1_lat == r.l1_lat && b.prefetch == r.prefetch)
      return &b;
  }
  return nullptr;
}

}  // namespace

ReportRow make_row(const CoreConfig& core, const MemConfig& mem,
                   const RunStats& stats) {
  ReportRow r;
  r.trace = stats.trace_name;
  r.variant = core.variant;
  r.width = core.width;
  r.window = core.window;
  r.q_a = core.q_a;
  r.q_b = core.q_b;
  r.q_y = core.q_y;
  r.l1_lat = mem.l1.latency;
  r.prefetch = mem.prefetch;
  r.cycles = stats.cycles;
  r.ipc = stats.ipc();
  r.mpki = stats.mpki();
  r.mlp_avg = stats.mlp_avg;
  r.stall_frac = stall_fraction_of_cycles(stats);
  return r;
}

ReportRow make_failed_row(const std::string& trace_name,
                          const CoreConfig& core, const MemConfig& mem) {
  ReportRow r;
  r.trace = trace_name;
  r.variant = core.variant;
  r.width = core.width;
  r.window = core.window;
  r.q_a = core.q_a;
  r.q_b = core.q_b;
  r.q_y = core.q_y;
  r.l1_lat = mem.l1.latency;
  r.prefetch = mem.prefetch;
  r.failed = true;
  return r;
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "# schema=1\n";
  out +=
      "trace,variant,width,window,q_a,q_b,q_y,l1_lat,prefetch,cycles,ipc,"
      "speedup_vs_ino,stall_slice_dep,stall_empty_biq,stall_alias,"
      "stall_other,mpki,mlp_avg\n";
  for (const ReportRow& r : rows) {
    out += r.trace;
    out += ',';
    out += variant_name(r.variant);
    out += ',' + std::to_string(r.width) + ',' + std::to_string(r.window) +
           ',' + std::to_string(r.q_a) + ',' + std::to_string(r.q_b) + ',' +
           std::to_string(r.q_y) + ',' + std::to_string(r.l1_lat) + ',' +
           (r.prefetch ? std::string("1") : std::string("0")) + ',';
    if (r.failed) {
      out += ",,,,,,,,\n";
      continue;
    }
    out += std::to_string(r.cycles) + ',' + fmt(r.ipc, 4) + ',';
    if (const ReportRow* b = ino_baseline(rows, r))
      out += fmt((double)b->cycles / (double)r.cycles, 4);
    out += ',';
    out += fmt(r.stall_frac[0], 4) + ',' + fmt(r.stall_frac[1], 4) + ',' +
           fmt(r.stall_frac[2], 4) + ',' + fmt(r.stall_frac[3], 4) + ',';
    out += fmt(r.mpki, 3) + ',' + fmt(r.mlp_avg, 3) + '\n';
  }
  return out;
}

std::string to_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json j;
    j["trace"] = r.trace;
    j["variant"] = variant_name(r.variant);
    j["width"] = r.width;
    j["window"] = r.window;
    j["q_a"] = r.q_a;
    j["q_b"] = r.q_b;
    j["q_y"] = r.q_y;
    j["l1_lat"] = r.l1_lat;
    j["prefetch"] = r.prefetch;
    j["failed"] = r.failed;
    if (!r.failed) {
      j["cycles"] = r.cycles;
      j["ipc"] = r.ipc;
      if (const ReportRow* b = ino_baseline(rows, r))
        j["speedup_vs_ino"] = (double)b->cycles / (double)r.cycles;
      else
        j["speedup_vs_ino"] = nullptr;
      j["stall_slice_dep"] = r.stall_frac[0];
      j["stall_empty_biq"] = r.stall_frac[1];
      j["stall_alias"] = r.stall_frac[2];
      j["stall_other"] = r.stall_frac[3];
      j["mpki"] = r.mpki;
      j["mlp_avg"] = r.mlp_avg;
    }
    doc["rows"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace slicesim
