#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "slicesim/config.hpp"
#include "slicesim/report.hpp"

using namespace slicesim;

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/slicesim_test_XXXXXX";
    path = mkdtemp(tmpl);
  }
  std::string file(const std::string& name, const std::string& content) const {
    std::string p = path + "/" + name;
    std::ofstream(p) << content;
    return p;
  }
};

}  // namespace

TEST_CASE("per-variant defaults") {
  CHECK(CoreConfig::defaults(Variant::Lsc).q_b == 64);
  CHECK(CoreConfig::defaults(Variant::IdealSooo).q_b == 64);
  CHECK(CoreConfig::defaults(Variant::Freeway).q_b == 32);
  CHECK(CoreConfig::defaults(Variant::Ino).q_b == 32);
  CHECK(CoreConfig::defaults(Variant::Ino).branch_penalty == 7);
  CHECK(CoreConfig::defaults(Variant::Lsc).branch_penalty == 9);
  CHECK(CoreConfig::defaults(Variant::Freeway).width == 2);
  CHECK(CoreConfig::defaults(Variant::Freeway).window == 64);
}

TEST_CASE("layers merge with later keys winning") {
  SimConfig plain = build_sim_config({});
  CHECK(plain.core.variant == Variant::Freeway);
  CHECK(plain.core.q_b == 32);
  CHECK(plain.mem.l1.latency == 4);

  SimConfig cfg = build_sim_config(
      {{{"core.width", "4"}, {"l1.lat", "2"}}, {{"core.width", "8"}}});
  CHECK(cfg.core.width == 8);
  CHECK(cfg.mem.l1.latency == 2);

  // The variant's defaults apply before explicit keys, wherever the variant
  // key itself sits in the stack.
  SimConfig lsc = build_sim_config({{{"core.variant", "lsc"}}});
  CHECK(lsc.core.q_b == 64);
  SimConfig a = build_sim_config({{{"core.variant", "lsc"}}, {{"core.q_b", "8"}}});
  SimConfig b = build_sim_config({{{"core.q_b", "8"}}, {{"core.variant", "lsc"}}});
  CHECK(a.core.q_b == 8);
  CHECK(b.core.q_b == 8);
}

TEST_CASE("config text accepts comments and rejects noise") {
  KeyValues kv = parse_config_text(
      "# a comment\n"
      "\n"
      "core.width = 4   # trailing comment\n"
      "  mem.warm=on\n",
      "test");
  CHECK(kv == KeyValues{{"core.width", "4"}, {"mem.warm", "on"}});

  CHECK_THROWS_WITH_AS(parse_config_text("core.width\n", "f"),
                       doctest::Contains("f:1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text("core.width = 2\ncore.width = 4\n", "f"),
      doctest::Contains("duplicate key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("core.width =\n", "f"),
                       doctest::Contains("f:1"), std::invalid_argument);
}

TEST_CASE("bad values are rejected with the offending key") {
  CHECK_THROWS_WITH_AS(build_sim_config({{{"core.widht", "4"}}}),
                       doctest::Contains("valid keys:"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_sim_config({{{"core.width", "fast"}}}),
                       doctest::Contains("unsigned integer"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_sim_config({{{"mem.warm", "maybe"}}}),
                       doctest::Contains("boolean"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_sim_config({{{"core.variant", "oooo"}}}),
                       doctest::Contains("unknown variant"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_sim_config({{{"core.width", "0"}}}),
                       doctest::Contains("must be positive"),
                       std::invalid_argument);
  // 1 KB direct-mapped at 32 ways: 16 lines cannot form whole sets.
  CHECK_THROWS_WITH_AS(
      build_sim_config({{{"l1.size_kb", "1"}, {"l1.assoc", "32"}}}),
      doctest::Contains("whole number of sets"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_sim_config({{{"clock.ghz", "0"}}}),
                       doctest::Contains("clock.ghz"), std::invalid_argument);
}

TEST_CASE("every advertised key applies cleanly") {
  KeyValues all = {
      {"core.variant", "lsc"},     {"core.width", "3"},
      {"core.window", "48"},       {"core.q_a", "12"},
      {"core.q_b", "13"},          {"core.q_y", "14"},
      {"core.q_y2", "15"},         {"core.branch_penalty", "5"},
      {"core.store_buffer", "9"},  {"core.fu_int", "4"},
      {"core.fu_fp", "2"},         {"core.fu_branch", "2"},
      {"core.fu_load", "2"},       {"core.fu_store", "2"},
      {"core.skip_aliased_loads", "true"},
      {"core.second_yiq", "1"},    {"core.oracle_load_spec", "on"},
      {"core.perfect_frontend", "off"},
      {"ist.capacity", "128"},     {"ist.pretrain", "false"},
      {"l1.size_kb", "64"},        {"l1.assoc", "4"},
      {"l1.lat", "3"},             {"l1.mshrs", "12"},
      {"llc.size_kb", "1024"},     {"llc.assoc", "8"},
      {"llc.lat", "20"},           {"dram.lat", "80"},
      {"dram.bw_gbps", "25.6"},    {"clock.ghz", "3.0"},
      {"prefetch.llc", "0"},       {"prefetch.degree", "2"},
      {"mem.warm", "1"},
  };
  CHECK(all.size() == valid_config_keys().size());
  for (const auto& [k, v] : all)
    CHECK(std::find(valid_config_keys().begin(), valid_config_keys().end(),
                    k) != valid_config_keys().end());

  SimConfig c = build_sim_config({all});
  CHECK(c.core.variant == Variant::Lsc);
  CHECK(c.core.width == 3);
  CHECK(c.core.q_y2 == 15);
  CHECK(c.core.skip_aliased_loads);
  CHECK(c.core.second_yiq);
  CHECK(c.core.oracle_load_spec);
  CHECK(!c.core.perfect_frontend);
  CHECK(c.core.ist_capacity == 128);
  CHECK(!c.core.ist_pretrain);
  CHECK(c.mem.l1.size_kb == 64);
  CHECK(c.mem.llc.latency == 20);
  CHECK(c.mem.dram_bw_gbps == doctest::Approx(25.6));
  CHECK(!c.mem.prefetch);
  CHECK(c.mem.prefetch_degree == 2);
  CHECK(c.mem.warm);
}

TEST_CASE("plan files parse directives and axes") {
  TempDir tmp;
  std::string plan_path = tmp.file("sweep.plan",
                                   "# demo sweep\n"
                                   "base = base.cfg\n"
                                   "trace = gen: pattern=mixed iters=50 seed=18\n"
                                   "out = result.csv\n"
                                   "axis core.variant = ino, freeway\n"
                                   "axis core.q_b, core.q_y = 64:32, 32:16\n");
  Plan plan = parse_plan_file(plan_path);
  CHECK(plan.base_path == "base.cfg");
  CHECK(plan.trace_spec == "gen: pattern=mixed iters=50 seed=18");
  CHECK(plan.out_path == "result.csv");
  REQUIRE(plan.axes.size() == 2);
  CHECK(plan.axes[0].keys == std::vector<std::string>{"core.variant"});
  CHECK(plan.axes[0].values ==
        std::vector<std::vector<std::string>>{{"ino"}, {"freeway"}});
  CHECK(plan.axes[1].keys ==
        std::vector<std::string>{"core.q_b", "core.q_y"});
  CHECK(plan.axes[1].values ==
        std::vector<std::vector<std::string>>{{"64", "32"}, {"32", "16"}});

  CHECK_THROWS_WITH_AS(
      parse_plan_file(tmp.file("a.plan", "axis core.q_b,core.q_y = 64, 32\n")),
      doctest::Contains("has 1 values for 2 keys"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_plan_file(tmp.file("b.plan", "axis core.nope = 1\n")),
      doctest::Contains("unknown axis key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_plan_file(tmp.file("c.plan", "trace = x\ntrace = y\n")),
      doctest::Contains("duplicate trace"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_plan_file(tmp.file("d.plan", "speed = 11\n")),
      doctest::Contains("unknown directive"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_plan_file(tmp.path + "/missing.plan"),
                       doctest::Contains("cannot open"), std::invalid_argument);
}

TEST_CASE("plan execution is independent of the job count") {
  TempDir tmp;
  tmp.file("warm.cfg", "mem.warm = on\n");
  Plan plan = parse_plan_file(tmp.file(
      "sweep.plan",
      "base = " + tmp.path + "/warm.cfg\n" +
          "trace = gen: pattern=mixed fraction=0.5 iters=40 seed=18\n"
          "axis core.variant = ino, lsc, freeway\n"
          "axis core.q_b, core.q_y = 32:32, 16:16\n"));

  PlanOutcome serial = run_plan(plan, {}, 1);
  PlanOutcome parallel = run_plan(plan, {}, 4);
  CHECK(serial.failures == 0);
  CHECK(parallel.failures == 0);
  REQUIRE(serial.rows.size() == 6);
  CHECK(to_csv(serial.rows) == to_csv(parallel.rows));

  // Row order: first axis slow, second fast.
  CHECK(serial.rows[0].variant == Variant::Ino);
  CHECK(serial.rows[0].q_b == 32);
  CHECK(serial.rows[1].variant == Variant::Ino);
  CHECK(serial.rows[1].q_b == 16);
  CHECK(serial.rows[2].variant == Variant::Lsc);
  CHECK(serial.rows[5].variant == Variant::Freeway);
  CHECK(serial.rows[5].q_y == 16);

  // Overrides slot in between the base file and the axes.  Width cannot
  // speed up the in-order variant (the zero-overlap rule binds first), so
  // the behavioral evidence comes from the out-of-order-slice row.
  PlanOutcome wider = run_plan(plan, {{"core.width", "4"}}, 2);
  for (const ReportRow& r : wider.rows) CHECK(r.width == 4);
  CHECK(wider.rows[4].variant == Variant::Freeway);
  CHECK(wider.rows[4].cycles < serial.rows[4].cycles);
}

TEST_CASE("traces can be swept as an axis") {
  TempDir tmp;
  Plan plan = parse_plan_file(
      tmp.file("t.plan",
               "axis trace = gen: pattern=stream stride=64 iters=30 seed=2, "
               "gen: pattern=indep iters=30 seed=3\n"));
  PlanOutcome out = run_plan(plan, {}, 2);
  CHECK(out.failures == 0);
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0].trace != out.rows[1].trace);

  Plan empty;
  CHECK_THROWS_WITH_AS(run_plan(empty, {}, 1),
                       doctest::Contains("plan has no trace"),
                       std::invalid_argument);
}

TEST_CASE("a configuration that cannot run yields a failed row") {
  TempDir tmp;
  Plan plan = parse_plan_file(tmp.file(
      "bad.plan",
      "trace = gen: pattern=alias p=1.0 iters=10 seed=3\n"
      "axis core.window = 64, 1\n"));  // stores need two slots at once
  PlanOutcome out = run_plan(plan, {}, 2);
  CHECK(out.failures == 1);
  REQUIRE(out.rows.size() == 2);
  CHECK(!out.rows[0].failed);
  CHECK(out.rows[1].failed);
  CHECK(out.rows[1].window == 1);
  CHECK(out.rows[1].trace == out.rows[0].trace);
}

TEST_CASE("trace specs load generated and file traces alike") {
  Trace g = load_trace_spec("gen: pattern=dep-chain depth=2 iters=5 seed=4");
  CHECK(g.ops.size() == 15);
  CHECK_THROWS(load_trace_spec("/nonexistent/path.trace"));
  CHECK_THROWS_WITH_AS(load_trace_spec("gen: pattern=warp"),
                       doctest::Contains("unknown"), std::runtime_error);
}
