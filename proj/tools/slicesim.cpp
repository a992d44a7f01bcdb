#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "slicesim/config.hpp"
#include "slicesim/pipeline.hpp"
#include "slicesim/slicer.hpp"
#include "slicesim/workload.hpp"

namespace {

using namespace slicesim;

KeyValues kv_from_sets(const std::vector<std::string>& sets) {
  KeyValues kv;
  for (const std::string& s : sets) {
    size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
      throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write: " + out_path);
  out << text;
}

Trace trace_from_options(const std::string& trace_path,
                         const std::string& gen_spec) {
  if (trace_path.empty() == gen_spec.empty())
    throw std::invalid_argument("give exactly one of --trace and --gen");
  if (!trace_path.empty()) return load_trace_file(trace_path);
  return generate(parse_workload_spec(gen_spec));
}

int cmd_simulate(const std::string& trace_path, const std::string& gen_spec,
                 const std::string& config_path,
                 const std::vector<std::string>& sets,
                 const std::string& variant, const std::string& format,
                 const std::string& out_path) {
  KeyValues file_kv;
  if (!config_path.empty()) file_kv = parse_config_file(config_path);
  KeyValues flag_kv = kv_from_sets(sets);
  if (!variant.empty()) flag_kv["core.variant"] = variant;

  SimConfig cfg = build_sim_config({file_kv, flag_kv});
  Trace trace = trace_from_options(trace_path, gen_spec);
  RunStats stats = simulate(trace, cfg.core, cfg.mem);
  std::vector<ReportRow> rows{make_row(cfg.core, cfg.mem, stats)};
  emit(format == "json" ? to_json(rows) : to_csv(rows), out_path);
  return 0;
}

int cmd_sweep(const std::string& plan_path,
              const std::vector<std::string>& sets, int jobs,
              const std::string& format, const std::string& out_path) {
  Plan plan = parse_plan_file(plan_path);
  PlanOutcome outcome = run_plan(plan, kv_from_sets(sets), jobs);
  std::string path = out_path.empty() ? plan.out_path : out_path;
  emit(format == "json" ? to_json(outcome.rows) : to_csv(outcome.rows), path);
  if (outcome.failures) {
    std::cerr << outcome.failures << " of " << outcome.rows.size()
              << " runs failed\n";
    return 2;
  }
  return 0;
}

int cmd_gen(const std::string& spec, const std::string& out_path) {
  Trace trace = generate(parse_workload_spec(spec));
  write_trace_file(trace, out_path);
  return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& gen_spec) {
  Trace trace = trace_from_options(trace_path, gen_spec);
  SliceGraph g = oracle_slice_graph(trace);

  size_t slice_uops = 0, dependent_uops = 0;
  for (const UopOracle& u : g.per_uop) {
    slice_uops += u.is_slice;
    dependent_uops += u.is_dependent;
  }
  std::map<uint32_t, uint64_t> by_depth;
  for (const SliceNode& n : g.nodes) by_depth[n.depth]++;

  std::cout << "trace " << trace.name << "\n"
            << "ops " << trace.ops.size() << "\n"
            << "slice_uops " << slice_uops << "\n"
            << "dependent_uops " << dependent_uops << "\n"
            << "slices " << g.nodes.size() << "\n"
            << "slice_edges " << g.edge_count << "\n";
  for (const auto& [depth, count] : by_depth)
    std::cout << "slices_depth_" << depth << " " << count << "\n";
  std::cout << "ist_warmup_error " << ist_warmup_error(trace) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slice-out-of-order core simulator"};
  app.require_subcommand(1);

  std::string trace_path, gen_spec, config_path, variant, plan_path, out_path;
  std::string format = "csv";
  std::string gen_out;
  std::vector<std::string> sets;
  int jobs = 1;

  CLI::App* sim = app.add_subcommand("simulate", "run one configuration");
  sim->add_option("--trace", trace_path, "trace file to run");
  sim->add_option("--gen", gen_spec, "generate the workload: 'pattern=... key=value ...'");
  sim->add_option("--config", config_path, "key=value config file");
  sim->add_option("--set", sets, "override one config key, e.g. core.width=4");
  sim->add_option("--variant", variant, "shorthand for --set core.variant=...");
  sim->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sim->add_option("--out", out_path, "write the report here (default stdout)");

  CLI::App* sw = app.add_subcommand("sweep", "run every configuration of a plan");
  sw->add_option("--plan", plan_path, "plan file")->required();
  sw->add_option("--set", sets, "override one config key in every run");
  sw->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sw->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sw->add_option("--out", out_path, "report path (overrides the plan's out)");

  CLI::App* gen = app.add_subcommand("gen", "write a generated trace to a file");
  gen->add_option("--spec", gen_spec, "'pattern=... key=value ...'")->required();
  gen->add_option("--out", gen_out, "trace file to write")->required();

  CLI::App* an = app.add_subcommand("analyze", "slice structure of a trace");
  an->add_option("--trace", trace_path, "trace file");
  an->add_option("--gen", gen_spec, "generate the workload instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(trace_path, gen_spec, config_path, sets, variant,
                          format, out_path);
    if (sw->parsed()) return cmd_sweep(plan_path, sets, jobs, format, out_path);
    if (gen->parsed()) return cmd_gen(gen_spec, gen_out);
    if (an->parsed()) return cmd_analyze(trace_path, gen_spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
