#include "slicesim/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <deque>
#include <queue>
#include <set>
#include <stdexcept>

#include "slicesim/slicer.hpp"
#include "slicesim/store_buffer.hpp"

namespace slicesim {

namespace {

constexpr uint32_t kNone = UINT32_MAX;
constexpr uint64_t kCycleLimit = 1000000000;

enum class Fu : uint8_t { Int, Fp, Branch, Load, Store, None };
constexpr size_t kNumFu = 6;

enum class Role : uint8_t { Plain, LoadOp, StoreAddr, StoreOp };

// Post-crack issue structures.  Every micro-op lives in exactly one.
enum class Q : uint8_t { A, B, Y, Y2, Window };

struct Slot {
  uint32_t trace_idx;
  Role role;
  Fu fu;
  Q q;
  uint32_t lat;      // execute latency; loads get theirs from memory
  bool counts_instr; // retiring this slot retires one trace instruction
  bool mispred;      // mispredicted branch: dispatch stops behind it
  SliceInfo si;
  std::vector<uint32_t> producers;  // slot ids whose results this one reads
};

Q steer_slice(const CoreConfig& core, const SliceInfo& si) {
  switch (core.variant) {
    case Variant::Ino: return Q::A;
    case Variant::Ooo: return Q::Window;
    case Variant::Lsc:
    case Variant::IdealSooo: return Q::B;
    case Variant::Freeway:
      if (!si.is_dependent) return Q::B;
      if (core.second_yiq && si.depth >= 2) return Q::Y2;
      return Q::Y;
  }
  return Q::A;
}

Q steer_plain(const CoreConfig& core) {
  return core.variant == Variant::Ooo ? Q::Window : Q::A;
}

// Cracks the trace into micro-ops, classifying slices in program order with
// the online learner, exactly as the frontend would see them.
std::vector<Slot> build_slots(const Trace& trace, const CoreConfig& core) {
  IbdaSlicer slicer(core.ist_capacity);
  if (core.ist_pretrain) slicer.pretrain(trace);

  std::array<uint32_t, kNumRegs> last_writer;
  last_writer.fill(kNone);

  std::vector<Slot> slots;
  slots.reserve(trace.ops.size() + trace.ops.size() / 4);

  auto writers_of = [&](const std::vector<Reg>& regs) {
    std::vector<uint32_t> out;
    for (Reg r : regs)
      if (last_writer[r] != kNone) out.push_back(last_writer[r]);
    return out;
  };

  for (size_t i = 0; i < trace.ops.size(); ++i) {
    const MicroOp& op = trace.ops[i];
    slicer.observe(op);
    SliceInfo si = slicer.classify(op);

    switch (op.kind) {
      case Kind::Load: {
        Slot s{(uint32_t)i, Role::LoadOp, Fu::Load, steer_slice(core, si),
               0,    true,  false, si, writers_of(op.src)};
        slots.push_back(std::move(s));
        if (op.dst) last_writer[*op.dst] = (uint32_t)slots.size() - 1;
        break;
      }
      case Kind::Store: {
        std::vector<Reg> data_src;
        for (Reg r : op.src)
          if (std::find(op.addr_src.begin(), op.addr_src.end(), r) ==
              op.addr_src.end())
            data_src.push_back(r);
        Slot addr{(uint32_t)i, Role::StoreAddr, Fu::Int,
                  steer_slice(core, si), 1, false, false, si,
                  writers_of(op.addr_src)};
        Slot data{(uint32_t)i, Role::StoreOp, Fu::Store, steer_plain(core),
                  1, true, false, si, writers_of(data_src)};
        slots.push_back(std::move(addr));
        slots.push_back(std::move(data));
        break;
      }
      case Kind::AluInt:
      case Kind::AluFp: {
        Fu fu = op.kind == Kind::AluInt ? Fu::Int : Fu::Fp;
        Q q = si.is_slice ? steer_slice(core, si) : steer_plain(core);
        Slot s{(uint32_t)i, Role::Plain, fu, q, op.exec_latency, true, false,
               si, writers_of(op.src)};
        slots.push_back(std::move(s));
        if (op.dst) last_writer[*op.dst] = (uint32_t)slots.size() - 1;
        break;
      }
      case Kind::Branch: {
        Slot s{(uint32_t)i, Role::Plain, Fu::Branch, steer_plain(core),
               op.exec_latency, true,
               op.mispred && !core.perfect_frontend, si, writers_of(op.src)};
        slots.push_back(std::move(s));
        break;
      }
      case Kind::Nop: {
        Slot s{(uint32_t)i, Role::Plain, Fu::None, steer_plain(core),
               1, true, false, si, {}};
        slots.push_back(std::move(s));
        break;
      }
    }
  }
  return slots;
}

}  // namespace

RunStats simulate(const Trace& trace, const CoreConfig& core,
                  const MemConfig& mem_cfg, bool detail) {
  if (core.width == 0 || core.window == 0)
    throw std::invalid_argument("core width and window must be positive");

  std::vector<Slot> slots = build_slots(trace, core);
  const uint32_t total = (uint32_t)slots.size();

  MemoryHierarchy mem(mem_cfg);
  if (mem_cfg.warm) {
    for (const MicroOp& op : trace.ops) {
      if (!op.is_mem()) continue;
      mem.warm_line(op.mem_addr);
      mem.warm_line(op.mem_addr + op.mem_size - 1);
    }
  }

  StoreBuffer sb(core.store_buffer);

  std::vector<uint8_t> issued(total, 0), completed(total, 0);
  std::deque<uint32_t> qa, qb, qy, qy2;
  std::set<uint32_t> qb_pool;  // IDEAL_SOOO: age-ordered, any entry may issue
  uint32_t retire_head = 0, dispatch_next = 0;

  using Event = std::pair<uint64_t, uint32_t>;  // (complete cycle, slot)
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;

  std::set<uint32_t> inflight_loads;
  std::vector<HitLevel> site_of_load(trace.ops.size(), HitLevel::L1);

  bool fetch_blocked = false;
  uint64_t fetch_resume = 0;
  uint32_t pending_branch = kNone;

  RunStats st;
  st.trace_name = trace.name;
  st.variant = core.variant;
  double mlp_sum = 0.0;

  const bool has_slice_queues = core.variant == Variant::Lsc ||
                                core.variant == Variant::Freeway ||
                                core.variant == Variant::IdealSooo;

  auto ready = [&](uint32_t u) {
    for (uint32_t p : slots[u].producers)
      if (!completed[p]) return false;
    return true;
  };
  auto load_check = [&](uint32_t u) {
    const MicroOp& op = trace.ops[slots[u].trace_idx];
    return sb.load_check(u, op.mem_addr, op.mem_size, core.oracle_load_spec)
        .status;
  };

  uint64_t t = 0;
  for (;; ++t) {
    if (t > kCycleLimit)
      throw std::runtime_error("cycle limit hit; oldest waiting micro-op " +
                               std::to_string(retire_head) + " of " +
                               std::to_string(total));

    // -- complete --
    mem.begin_cycle(t);
    bool any_complete = false;
    while (!events.empty() && events.top().first <= t) {
      any_complete = true;
      uint32_t u = events.top().second;
      events.pop();
      completed[u] = 1;
      const Slot& s = slots[u];
      if (s.role == Role::LoadOp) inflight_loads.erase(u);
      if (s.role == Role::StoreAddr) {
        const MicroOp& op = trace.ops[s.trace_idx];
        sb.resolve(u + 1, op.mem_addr, op.mem_size);  // data slot follows
      }
      if (u == pending_branch) {
        fetch_resume = t + core.branch_penalty;
        pending_branch = kNone;
      }
    }

    // -- retire --
    uint32_t retired_n = 0;
    {
      while (retired_n < core.width && retire_head < dispatch_next &&
             completed[retire_head]) {
        st.retired_uops++;
        if (slots[retire_head].counts_instr) st.retired_instrs++;
        retire_head++;
        retired_n++;
      }
      if (retire_head == total) {
        st.cycles = t + 1;
        break;
      }
    }

    // -- issue --
    std::array<uint32_t, kNumFu> fu_left{};
    fu_left[(size_t)Fu::Int] = core.fu_int;
    fu_left[(size_t)Fu::Fp] = core.fu_fp;
    fu_left[(size_t)Fu::Branch] = core.fu_branch;
    fu_left[(size_t)Fu::Load] = core.fu_load;
    fu_left[(size_t)Fu::Store] = core.fu_store;
    fu_left[(size_t)Fu::None] = kNone;

    std::set<uint32_t> mem_rejected;  // denied an MSHR this cycle

    auto eligible = [&](uint32_t u) {
      const Slot& s = slots[u];
      if (fu_left[(size_t)s.fu] == 0) return false;
      if (mem_rejected.count(u)) return false;
      if (!ready(u)) return false;
      if (s.role == Role::StoreOp && u != retire_head) return false;
      if (s.role == Role::LoadOp) {
        if (core.variant == Variant::Ino && !inflight_loads.empty())
          return false;
        if (load_check(u) != LoadCheck::Proceed) return false;
      }
      return true;
    };
    // Alias-blocked loads may be stepped over in slice queues when enabled.
    auto skippable = [&](uint32_t u) {
      const Slot& s = slots[u];
      return s.role == Role::LoadOp && ready(u) &&
             load_check(u) == LoadCheck::StallAlias;
    };
    auto fifo_candidate = [&](const std::deque<uint32_t>& q, bool slice_q) {
      for (uint32_t u : q) {
        if (eligible(u)) return u;
        if (slice_q && core.skip_aliased_loads && skippable(u)) continue;
        break;
      }
      return kNone;
    };
    auto pool_candidate = [&]() {
      for (uint32_t u : qb_pool)
        if (eligible(u)) return u;
      return kNone;
    };
    auto window_candidate = [&]() {
      for (uint32_t u = retire_head; u < dispatch_next; ++u)
        if (!issued[u] && eligible(u)) return u;
      return kNone;
    };

    uint32_t issued_n = 0;
    while (issued_n < core.width) {
      uint32_t best = kNone;
      if (core.variant == Variant::Ooo) {
        best = window_candidate();
      } else {
        best = std::min(best, fifo_candidate(qa, false));
        if (core.variant == Variant::Lsc || core.variant == Variant::Freeway)
          best = std::min(best, fifo_candidate(qb, true));
        if (core.variant == Variant::IdealSooo)
          best = std::min(best, pool_candidate());
        if (core.variant == Variant::Freeway) {
          best = std::min(best, fifo_candidate(qy, true));
          if (core.second_yiq) best = std::min(best, fifo_candidate(qy2, true));
        }
      }
      if (best == kNone) break;

      Slot& s = slots[best];
      uint64_t done = 0;
      if (s.role == Role::LoadOp) {
        const MicroOp& op = trace.ops[s.trace_idx];
        MemResult r = mem.load_access(op.mem_addr, op.mem_size, op.pc, t);
        if (!r.accepted) {
          mem_rejected.insert(best);
          continue;
        }
        done = r.complete_cycle;
        site_of_load[s.trace_idx] = r.site;
        inflight_loads.insert(best);
        if (inflight_loads.size() > st.peak_inflight_loads) {
          st.peak_inflight_loads = (uint32_t)inflight_loads.size();
          st.peak_inflight_set.clear();
          if (st.peak_inflight_loads >= 2)
            for (uint32_t u : inflight_loads)
              st.peak_inflight_set.push_back(trace.ops[slots[u].trace_idx].seq);
        }
        st.loads.push_back({op.seq, best, t, done, op.mem_addr, op.mem_size,
                            r.site});
      } else if (s.role == Role::StoreOp) {
        const MicroOp& op = trace.ops[s.trace_idx];
        mem.store_write(op.mem_addr, op.mem_size, op.pc, t);
        sb.release(best);
        done = t + 1;
        st.stores.push_back({op.seq, best, t, op.mem_addr, op.mem_size});
      } else {
        done = t + s.lat;
      }
      assert(done > t);
      events.emplace(done, best);
      issued[best] = 1;
      fu_left[(size_t)s.fu]--;
      issued_n++;
      if (detail) st.issue_log.emplace_back(t, best);

      switch (s.q) {
        case Q::A: qa.erase(std::find(qa.begin(), qa.end(), best)); break;
        case Q::B:
          if (core.variant == Variant::IdealSooo)
            qb_pool.erase(best);
          else
            qb.erase(std::find(qb.begin(), qb.end(), best));
          break;
        case Q::Y: qy.erase(std::find(qy.begin(), qy.end(), best)); break;
        case Q::Y2: qy2.erase(std::find(qy2.begin(), qy2.end(), best)); break;
        case Q::Window: break;
      }
    }

    if (issued_n == 0) {
      st.zero_issue_cycles++;
      StallCategory cat;
      if (has_slice_queues) {
        uint32_t h = kNone;
        if (!qb.empty()) h = std::min(h, qb.front());
        if (!qb_pool.empty()) h = std::min(h, *qb_pool.begin());
        if (!qy.empty()) h = std::min(h, qy.front());
        if (!qy2.empty()) h = std::min(h, qy2.front());
        if (h == kNone) {
          cat = StallCategory::EmptyBiq;
        } else if (slots[h].si.is_dependent && !ready(h)) {
          cat = StallCategory::SliceDep;
        } else if (slots[h].role == Role::LoadOp && ready(h) &&
                   load_check(h) == LoadCheck::StallAlias) {
          cat = StallCategory::LsAlias;
        } else {
          cat = StallCategory::Other;
        }
      } else {
        bool empty;
        if (core.variant == Variant::Ooo) {
          empty = true;
          for (uint32_t u = retire_head; u < dispatch_next; ++u)
            if (!issued[u]) { empty = false; break; }
        } else {
          empty = qa.empty();
        }
        cat = empty ? StallCategory::EmptyBiq : StallCategory::Other;
      }
      st.issue_stalls[(size_t)cat]++;
    }

    {
      uint32_t m = mem.mshrs_in_use();
      if (m > 0) {
        mlp_sum += m;
        st.mlp_cycles++;
      }
    }

    // -- dispatch --
    {
      uint32_t disp = 0;
      bool blocked_by_space = false;
      while (disp < core.width && dispatch_next < total) {
        if (fetch_blocked) {
          if (t >= fetch_resume)
            fetch_blocked = false;
          else
            break;
        }
        const Slot& first = slots[dispatch_next];
        uint32_t n_parts =
            trace.ops[first.trace_idx].kind == Kind::Store ? 2 : 1;
        // A cracked pair enters together; at width 1 it takes the whole cycle.
        if (disp + n_parts > core.width && disp > 0) break;
        if (dispatch_next - retire_head + n_parts > core.window) {
          blocked_by_space = true;
          break;
        }
        // Queue space for every part, counted together.
        uint32_t need_a = 0, need_b = 0, need_y = 0, need_y2 = 0;
        bool need_sb = false;
        for (uint32_t u = dispatch_next; u < dispatch_next + n_parts; ++u) {
          switch (slots[u].q) {
            case Q::A: need_a++; break;
            case Q::B: need_b++; break;
            case Q::Y: need_y++; break;
            case Q::Y2: need_y2++; break;
            case Q::Window: break;
          }
          if (slots[u].role == Role::StoreOp) need_sb = true;
        }
        size_t b_size =
            core.variant == Variant::IdealSooo ? qb_pool.size() : qb.size();
        if (qa.size() + need_a > core.q_a || b_size + need_b > core.q_b ||
            qy.size() + need_y > core.q_y || qy2.size() + need_y2 > core.q_y2 ||
            (need_sb && sb.full())) {
          blocked_by_space = true;
          break;
        }
        for (uint32_t u = dispatch_next; u < dispatch_next + n_parts; ++u) {
          switch (slots[u].q) {
            case Q::A: qa.push_back(u); break;
            case Q::B:
              if (core.variant == Variant::IdealSooo)
                qb_pool.insert(u);
              else
                qb.push_back(u);
              break;
            case Q::Y: qy.push_back(u); break;
            case Q::Y2: qy2.push_back(u); break;
            case Q::Window: break;
          }
          if (slots[u].role == Role::StoreOp) {
            const MicroOp& op = trace.ops[slots[u].trace_idx];
            sb.allocate(u, op.mem_addr, op.mem_size);
          }
          if (slots[u].mispred) {
            assert(!fetch_blocked);
            fetch_blocked = true;
            pending_branch = u;
            fetch_resume = UINT64_MAX;
          }
        }
        dispatch_next += n_parts;
        disp += n_parts;
        assert(dispatch_next - retire_head <= core.window);
      }
      if (blocked_by_space) st.dispatch_stall_cycles++;

      // No event in flight and nothing moved: the state can never change.
      if (!any_complete && retired_n == 0 && issued_n == 0 && disp == 0 &&
          events.empty() && !fetch_blocked)
        throw std::runtime_error(
            "pipeline deadlock: no progress possible at micro-op " +
            std::to_string(retire_head) + " of " + std::to_string(total) +
            " (structure too small for the instruction mix?)");
    }
  }

  // -- bookkeeping over the whole run --
  SliceGraph graph = oracle_slice_graph(trace);
  std::vector<uint32_t> consumers(graph.nodes.size(), 0);
  for (const SliceNode& n : graph.nodes)
    for (uint32_t p : n.producer_slices) consumers[p]++;
  for (const SliceNode& n : graph.nodes) {
    st.depth_histogram[n.depth]++;
    if (n.depth == 0 && consumers[n.id] > 0 && !n.is_store_addr)
      st.producer_hit_site[(size_t)site_of_load[n.terminator_seq]]++;
  }

  st.llc_accesses = mem.llc_accesses;
  st.llc_misses = mem.llc_misses;
  st.prefetches_issued = mem.prefetches_issued;
  st.prefetch_covered = mem.prefetch_covered;
  st.mlp_avg = st.mlp_cycles ? mlp_sum / (double)st.mlp_cycles : 0.0;
  if (st.peak_inflight_loads <= 1) st.peak_inflight_set.clear();

  uint64_t stall_sum = 0;
  for (uint64_t c : st.issue_stalls) stall_sum += c;
  assert(stall_sum == st.zero_issue_cycles);
  (void)stall_sum;

  return st;
}

}  // namespace slicesim
