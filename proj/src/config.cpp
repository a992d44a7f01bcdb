#include "slicesim/config.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "slicesim/pipeline.hpp"
#include "slicesim/workload.hpp"

namespace slicesim {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Ino: return "ino";
    case Variant::Lsc: return "lsc";
    case Variant::Freeway: return "freeway";
    case Variant::IdealSooo: return "ideal_sooo";
    case Variant::Ooo: return "ooo";
  }
  return "?";
}

bool parse_variant(const std::string& s, Variant& out) {
  if (s == "ino") out = Variant::Ino;
  else if (s == "lsc") out = Variant::Lsc;
  else if (s == "freeway") out = Variant::Freeway;
  else if (s == "ideal_sooo") out = Variant::IdealSooo;
  else if (s == "ooo") out = Variant::Ooo;
  else return false;
  return true;
}

CoreConfig CoreConfig::defaults(Variant v) {
  CoreConfig c;
  c.variant = v;
  c.q_b = (v == Variant::Lsc || v == Variant::IdealSooo) ? 64 : 32;
  c.branch_penalty = v == Variant::Ino ? 7 : 9;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  size_t pos = 0;
  uint64_t out;
  try {
    out = std::stoull(v, &pos, 10);
  } catch (const std::exception&) {
    bad(key, "expected an unsigned integer, got '" + v + "'");
  }
  if (pos != v.size()) bad(key, "expected an unsigned integer, got '" + v + "'");
  return out;
}

uint32_t to_u32(const std::string& key, const std::string& v) {
  uint64_t x = to_u64(key, v);
  if (x > UINT32_MAX) bad(key, "value out of range: '" + v + "'");
  return (uint32_t)x;
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) bad(key, "expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  bad(key, "expected a boolean (true/false/1/0/on/off), got '" + v + "'");
}

void apply_key(SimConfig& c, const std::string& k, const std::string& v) {
  if (k == "core.variant") {
    Variant var;
    if (!parse_variant(v, var))
      bad(k, "unknown variant '" + v + "' (ino, lsc, freeway, ideal_sooo, ooo)");
    c.core.variant = var;
  } else if (k == "core.width") c.core.width = to_u32(k, v);
  else if (k == "core.window") c.core.window = to_u32(k, v);
  else if (k == "core.q_a") c.core.q_a = to_u32(k, v);
  else if (k == "core.q_b") c.core.q_b = to_u32(k, v);
  else if (k == "core.q_y") c.core.q_y = to_u32(k, v);
  else if (k == "core.q_y2") c.core.q_y2 = to_u32(k, v);
  else if (k == "core.branch_penalty") c.core.branch_penalty = to_u32(k, v);
  else if (k == "core.store_buffer") c.core.store_buffer = to_u32(k, v);
  else if (k == "core.fu_int") c.core.fu_int = to_u32(k, v);
  else if (k == "core.fu_fp") c.core.fu_fp = to_u32(k, v);
  else if (k == "core.fu_branch") c.core.fu_branch = to_u32(k, v);
  else if (k == "core.fu_load") c.core.fu_load = to_u32(k, v);
  else if (k == "core.fu_store") c.core.fu_store = to_u32(k, v);
  else if (k == "core.skip_aliased_loads")
    c.core.skip_aliased_loads = to_bool(k, v);
  else if (k == "core.second_yiq") c.core.second_yiq = to_bool(k, v);
  else if (k == "core.oracle_load_spec") c.core.oracle_load_spec = to_bool(k, v);
  else if (k == "core.perfect_frontend") c.core.perfect_frontend = to_bool(k, v);
  else if (k == "ist.capacity") c.core.ist_capacity = to_u64(k, v);
  else if (k == "ist.pretrain") c.core.ist_pretrain = to_bool(k, v);
  else if (k == "l1.size_kb") c.mem.l1.size_kb = to_u32(k, v);
  else if (k == "l1.assoc") c.mem.l1.assoc = to_u32(k, v);
  else if (k == "l1.lat") c.mem.l1.latency = to_u32(k, v);
  else if (k == "l1.mshrs") c.mem.l1_mshrs = to_u32(k, v);
  else if (k == "llc.size_kb") c.mem.llc.size_kb = to_u32(k, v);
  else if (k == "llc.assoc") c.mem.llc.assoc = to_u32(k, v);
  else if (k == "llc.lat") c.mem.llc.latency = to_u32(k, v);
  else if (k == "dram.lat") c.mem.dram_latency = to_u32(k, v);
  else if (k == "dram.bw_gbps") c.mem.dram_bw_gbps = to_double(k, v);
  else if (k == "clock.ghz") c.mem.clock_ghz = to_double(k, v);
  else if (k == "prefetch.llc") c.mem.prefetch = to_bool(k, v);
  else if (k == "prefetch.degree") c.mem.prefetch_degree = to_u32(k, v);
  else if (k == "mem.warm") c.mem.warm = to_bool(k, v);
  else {
    std::string msg = "unknown key '" + k + "'; valid keys:";
    for (const std::string& s : valid_config_keys()) msg += " " + s;
    throw std::invalid_argument(msg);
  }
}

void check_positive(const std::string& key, uint64_t v) {
  if (v == 0) bad(key, "must be positive");
}

void validate(const SimConfig& c) {
  check_positive("core.width", c.core.width);
  check_positive("core.window", c.core.window);
  check_positive("core.q_a", c.core.q_a);
  check_positive("core.q_b", c.core.q_b);
  check_positive("core.q_y", c.core.q_y);
  check_positive("core.q_y2", c.core.q_y2);
  check_positive("core.store_buffer", c.core.store_buffer);
  check_positive("core.fu_int", c.core.fu_int);
  check_positive("core.fu_fp", c.core.fu_fp);
  check_positive("core.fu_branch", c.core.fu_branch);
  check_positive("core.fu_load", c.core.fu_load);
  check_positive("core.fu_store", c.core.fu_store);
  check_positive("l1.lat", c.mem.l1.latency);
  check_positive("l1.mshrs", c.mem.l1_mshrs);
  check_positive("llc.lat", c.mem.llc.latency);
  check_positive("dram.lat", c.mem.dram_latency);
  check_positive("prefetch.degree", c.mem.prefetch_degree);
  if (c.mem.clock_ghz <= 0.0) bad("clock.ghz", "must be positive");
  if (c.mem.dram_bw_gbps < 0.0) bad("dram.bw_gbps", "must be >= 0");
  for (auto [name, cache] : {std::pair<const char*, CacheConfig>{"l1", c.mem.l1},
                             {"llc", c.mem.llc}}) {
    check_positive(std::string(name) + ".size_kb", cache.size_kb);
    check_positive(std::string(name) + ".assoc", cache.assoc);
    uint64_t lines = uint64_t(cache.size_kb) * 1024 / kLineBytes;
    if (lines < cache.assoc || lines % cache.assoc != 0)
      bad(name, "size/associativity do not give a whole number of sets");
  }
}

}  // namespace

const std::vector<std::string>& valid_config_keys() {
  static const std::vector<std::string> keys = {
      "core.variant", "core.width", "core.window", "core.q_a", "core.q_b",
      "core.q_y", "core.q_y2", "core.branch_penalty", "core.store_buffer",
      "core.fu_int", "core.fu_fp", "core.fu_branch", "core.fu_load",
      "core.fu_store", "core.skip_aliased_loads", "core.second_yiq",
      "core.oracle_load_spec", "core.perfect_frontend", "ist.capacity",
      "ist.pretrain", "l1.size_kb", "l1.assoc", "l1.lat", "l1.mshrs",
      "llc.size_kb", "llc.assoc", "llc.lat", "dram.lat", "dram.bw_gbps",
      "clock.ghz", "prefetch.llc", "prefetch.degree", "mem.warm"};
  return keys;
}

KeyValues parse_config_text(const std::string& text,
                            const std::string& origin) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (size_t h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad(origin + ":" + std::to_string(lineno), "expected key = value");
    std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    if (k.empty() || v.empty())
      bad(origin + ":" + std::to_string(lineno), "expected key = value");
    if (out.count(k))
      bad(origin + ":" + std::to_string(lineno), "duplicate key '" + k + "'");
    out[k] = v;
  }
  return out;
}

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

SimConfig build_sim_config(const std::vector<KeyValues>& layers) {
  KeyValues merged;
  for (const KeyValues& layer : layers)
    for (const auto& [k, v] : layer) merged[k] = v;

  Variant v = Variant::Freeway;
  if (auto it = merged.find("core.variant"); it != merged.end()) {
    if (!parse_variant(it->second, v))
      bad("core.variant", "unknown variant '" + it->second + "'");
  }
  SimConfig cfg{CoreConfig::defaults(v), MemConfig{}};
  for (const auto& [key, val] : merged) apply_key(cfg, key, val);
  validate(cfg);
  return cfg;
}

Trace load_trace_spec(const std::string& spec) {
  if (spec.rfind("gen:", 0) == 0) {
    WorkloadSpec ws = parse_workload_spec(trim(spec.substr(4)));
    return generate(ws);
  }
  return load_trace_file(spec);
}

Plan parse_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open plan file: " + path);
  Plan plan;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::string where = path + ":" + std::to_string(lineno);
    if (size_t h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("axis ", 0) == 0) {
      std::string rest = trim(line.substr(5));
      size_t eq = rest.find('=');
      if (eq == std::string::npos) bad(where, "expected axis keys = values");
      PlanAxis axis;
      std::istringstream ks(trim(rest.substr(0, eq)));
      std::string key;
      while (std::getline(ks, key, ',')) {
        key = trim(key);
        if (key.empty()) bad(where, "empty axis key");
        const auto& valid = valid_config_keys();
        if (key != "trace" &&
            std::find(valid.begin(), valid.end(), key) == valid.end())
          bad(where, "unknown axis key '" + key + "'");
        axis.keys.push_back(key);
      }
      if (axis.keys.empty()) bad(where, "axis needs at least one key");
      std::istringstream vs(trim(rest.substr(eq + 1)));
      std::string point;
      while (std::getline(vs, point, ',')) {
        point = trim(point);
        if (point.empty()) bad(where, "empty axis value");
        std::vector<std::string> vals;
        if (axis.keys.size() == 1) {
          vals.push_back(point);  // verbatim: values may contain ':'
        } else {
          std::istringstream ps(point);
          std::string piece;
          while (std::getline(ps, piece, ':')) vals.push_back(trim(piece));
          if (vals.size() != axis.keys.size())
            bad(where, "axis point '" + point + "' has " +
                           std::to_string(vals.size()) + " values for " +
                           std::to_string(axis.keys.size()) + " keys");
        }
        axis.values.push_back(std::move(vals));
      }
      if (axis.values.empty()) bad(where, "axis needs at least one value");
      plan.axes.push_back(std::move(axis));
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) bad(where, "expected key = value");
    std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    if (k == "base") {
      if (!plan.base_path.empty()) bad(where, "duplicate base");
      plan.base_path = v;
    } else if (k == "trace") {
      if (!plan.trace_spec.empty()) bad(where, "duplicate trace");
      plan.trace_spec = v;
    } else if (k == "out") {
      if (!plan.out_path.empty()) bad(where, "duplicate out");
      plan.out_path = v;
    } else {
      bad(where, "unknown directive '" + k + "' (base, trace, out, axis)");
    }
  }
  return plan;
}

PlanOutcome run_plan(const Plan& plan, const KeyValues& overrides, int jobs) {
  bool axis_has_trace = false;
  for (const PlanAxis& a : plan.axes)
    for (const std::string& k : a.keys)
      if (k == "trace") axis_has_trace = true;
  if (plan.trace_spec.empty() && !axis_has_trace)
    throw std::invalid_argument("plan has no trace");

  KeyValues base_kv;
  if (!plan.base_path.empty()) base_kv = parse_config_file(plan.base_path);

  size_t n = 1;
  for (const PlanAxis& a : plan.axes) n *= a.values.size();

  // Materialize every configuration up front; config errors abort the sweep.
  struct Job {
    SimConfig cfg;
    std::string trace_spec;
  };
  std::vector<Job> jobs_list;
  jobs_list.reserve(n);
  for (size_t idx = 0; idx < n; ++idx) {
    KeyValues axis_kv;
    size_t rem = idx;
    for (size_t a = plan.axes.size(); a-- > 0;) {  // last axis fastest
      const PlanAxis& ax = plan.axes[a];
      size_t j = rem % ax.values.size();
      rem /= ax.values.size();
      for (size_t k = 0; k < ax.keys.size(); ++k)
        axis_kv[ax.keys[k]] = ax.values[j][k];
    }
    std::string spec = plan.trace_spec;
    if (auto it = axis_kv.find("trace"); it != axis_kv.end()) {
      spec = it->second;
      axis_kv.erase(it);
    }
    jobs_list.push_back({build_sim_config({base_kv, overrides, axis_kv}), spec});
  }

  // Load each distinct trace once, before the parallel phase.
  std::map<std::string, Trace> traces;
  for (const Job& j : jobs_list)
    if (!traces.count(j.trace_spec))
      traces.emplace(j.trace_spec, load_trace_spec(j.trace_spec));

  int cap = jobs;
  if (const char* env = std::getenv("SLICESIM_THREADS")) {
    int lim = std::atoi(env);
    if (lim >= 1 && lim < cap) cap = lim;
  }
  if (cap < 1) cap = 1;
  if ((size_t)cap > n) cap = (int)(n ? n : 1);

  PlanOutcome out;
  out.rows.resize(n);
  std::atomic<size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      const Job& j = jobs_list[i];
      const Trace& tr = traces.at(j.trace_spec);
      try {
        RunStats st = simulate(tr, j.cfg.core, j.cfg.mem, false);
        out.rows[i] = make_row(j.cfg.core, j.cfg.mem, st);
      } catch (const std::exception&) {
        out.rows[i] = make_failed_row(tr.name, j.cfg.core, j.cfg.mem);
        failures.fetch_add(1);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < cap; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  out.failures = failures.load();
  return out;
}

}  // namespace slicesim
