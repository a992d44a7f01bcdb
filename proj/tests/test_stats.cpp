#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "slicesim/pipeline.hpp"
#include "slicesim/report.hpp"
#include "slicesim/stats.hpp"
#include "slicesim/workload.hpp"

using namespace slicesim;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("speedup and geometric mean") {
  RunStats base, other;
  base.cycles = 200;
  other.cycles = 100;
  CHECK(speedup(base, other) == doctest::Approx(2.0));
  CHECK(speedup(base, base) == doctest::Approx(1.0));

  CHECK(gmean({2.0, 8.0}) == doctest::Approx(4.0));
  CHECK(gmean({5.0}) == doctest::Approx(5.0));
  CHECK(gmean({}) == 0.0);
}

TEST_CASE("stall fractions and rate guards") {
  RunStats s;
  CHECK(s.ipc() == 0.0);
  CHECK(s.mpki() == 0.0);
  CHECK(stall_fraction_of_cycles(s) == std::array<double, 4>{});
  CHECK(stall_fraction_of_zero_issue(s) == std::array<double, 4>{});

  s.cycles = 100;
  s.retired_instrs = 50;
  s.llc_misses = 5;
  s.zero_issue_cycles = 50;
  s.issue_stalls = {10, 20, 5, 15};
  CHECK(s.ipc() == doctest::Approx(0.5));
  CHECK(s.mpki() == doctest::Approx(100.0));
  auto fc = stall_fraction_of_cycles(s);
  CHECK(fc[0] == doctest::Approx(0.10));
  CHECK(fc[1] == doctest::Approx(0.20));
  CHECK(fc[2] == doctest::Approx(0.05));
  CHECK(fc[3] == doctest::Approx(0.15));
  auto fz = stall_fraction_of_zero_issue(s);
  CHECK(fz[0] == doctest::Approx(0.2));
  CHECK(fz[1] == doctest::Approx(0.4));
  CHECK(fz[2] == doctest::Approx(0.1));
  CHECK(fz[3] == doctest::Approx(0.3));
}

TEST_CASE("memory order audit flags early loads only") {
  RunStats s;
  s.stores.push_back({1, 2, 50, 0x100, 8});

  s.loads.push_back({2, 4, 49, 170, 0x104, 4, HitLevel::L1});  // too early
  s.loads.push_back({3, 5, 50, 171, 0x104, 4, HitLevel::L1});  // same cycle: fine
  s.loads.push_back({4, 6, 10, 134, 0x200, 8, HitLevel::L1});  // no overlap
  s.loads.push_back({0, 1, 10, 134, 0x100, 8, HitLevel::L1});  // older than store

  auto bad = audit_memory_order(s);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].load_seq == 2);
  CHECK(bad[0].store_seq == 1);
}

TEST_CASE("dependence depth histogram counts every dynamic slice") {
  Trace t = generate({Pattern::DepChain, 2, 0.5, 1.0, 64, 1 << 13, 50, 5, 0.0});
  CoreConfig core = CoreConfig::defaults(Variant::Freeway);
  MemConfig mem;
  mem.warm = true;
  RunStats s = simulate(t, core, mem);
  CHECK(s.depth_histogram ==
        std::map<uint32_t, uint64_t>{{0, 50}, {1, 50}, {2, 50}});
}

TEST_CASE("a serialized pointer chase has parallelism exactly one") {
  Trace t = generate({Pattern::DepChain, 39, 0.5, 1.0, 64, 1 << 13, 1, 6, 0.0});
  CoreConfig core = CoreConfig::defaults(Variant::Freeway);
  MemConfig mem;
  mem.prefetch = false;
  RunStats s = simulate(t, core, mem);
  CHECK(s.mlp_avg == 1.0);
  CHECK(s.peak_inflight_loads == 1);
  CHECK(s.mlp_cycles >= 40 * 124);
}

TEST_CASE("csv report carries the full schema") {
  Trace t = canonical_fig1();
  MemConfig mem;
  CoreConfig ino = CoreConfig::defaults(Variant::Ino);
  CoreConfig fw = CoreConfig::defaults(Variant::Freeway);
  std::vector<ReportRow> rows;
  rows.push_back(make_row(ino, mem, simulate(t, ino, mem)));
  rows.push_back(make_row(fw, mem, simulate(t, fw, mem)));
  ReportRow lost = make_failed_row(t.name, fw, mem);
  rows.push_back(lost);
  ReportRow foreign = rows[1];
  foreign.trace = "elsewhere";  // no in-order baseline in this report
  rows.push_back(foreign);

  std::string csv = to_csv(rows);
  auto ls = lines(csv);
  REQUIRE(ls.size() == 6);
  CHECK(ls[0] == "# schema=1");
  CHECK(ls[1] ==
        "trace,variant,width,window,q_a,q_b,q_y,l1_lat,prefetch,cycles,ipc,"
        "speedup_vs_ino,stall_slice_dep,stall_empty_biq,stall_alias,"
        "stall_other,mpki,mlp_avg");

  auto ino_row = split(ls[2]);
  auto fw_row = split(ls[3]);
  auto failed = split(ls[4]);
  auto orphan = split(ls[5]);
  for (auto* row : {&ino_row, &fw_row, &failed, &orphan})
    REQUIRE(row->size() == 18);

  CHECK(ino_row[0] == "fig1");
  CHECK(ino_row[1] == "ino");
  CHECK(ino_row[9] == "624");
  CHECK(ino_row[11] == "1.0000");  // its own baseline
  CHECK(fw_row[1] == "freeway");
  CHECK(fw_row[9] == "255");
  CHECK(fw_row[11] == "2.4471");  // 624 / 255
  for (size_t i = 9; i < 18; i++) CHECK(failed[i] == "");
  CHECK(orphan[11] == "");  // metrics present, baseline column empty
  CHECK(orphan[9] == "255");
}

TEST_CASE("json report mirrors the csv and marks missing baselines") {
  Trace t = canonical_fig1();
  MemConfig mem;
  CoreConfig ino = CoreConfig::defaults(Variant::Ino);
  CoreConfig fw = CoreConfig::defaults(Variant::Freeway);
  std::vector<ReportRow> rows;
  rows.push_back(make_row(ino, mem, simulate(t, ino, mem)));
  rows.push_back(make_row(fw, mem, simulate(t, fw, mem)));
  ReportRow foreign = rows[1];
  foreign.trace = "elsewhere";
  rows.push_back(foreign);
  rows.push_back(make_failed_row(t.name, fw, mem));

  auto doc = nlohmann::json::parse(to_json(rows));
  CHECK(doc["schema"] == 1);
  REQUIRE(doc["rows"].size() == 4);
  CHECK(doc["rows"][0]["variant"] == "ino");
  CHECK(doc["rows"][0]["cycles"] == 624);
  CHECK(doc["rows"][1]["cycles"] == 255);
  CHECK(doc["rows"][1]["speedup_vs_ino"].get<double>() ==
        doctest::Approx(624.0 / 255.0));
  CHECK(doc["rows"][2]["speedup_vs_ino"].is_null());
  CHECK(doc["rows"][3]["failed"] == true);
  CHECK(!doc["rows"][3].contains("cycles"));
}
