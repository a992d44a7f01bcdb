#include "slicesim/slicer.hpp"

#include <algorithm>
#include <cassert>

namespace slicesim {

void Ist::insert(uint64_t pc) {
  auto it = map_.find(pc);
  if (it != map_.end()) {
    if (capacity_) lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  if (capacity_ == 0) {
    map_.emplace(pc, lru_.end());
    return;
  }
  if (map_.size() >= capacity_) {
    map_.erase(lru_.back());
    lru_.pop_back();
  }
  lru_.push_front(pc);
  map_.emplace(pc, lru_.begin());
}

void Ist::clear() {
  lru_.clear();
  map_.clear();
}

void IbdaSlicer::observe(const MicroOp& op) {
  bool slice_member = op.is_mem() || ist_.contains(op.pc);
  if (!slice_member) return;
  // Memory ops pull in their address producers; a learned member pulls in all
  // of its producers (everything it reads feeds the address downstream).
  const std::vector<Reg>& srcs = op.is_mem() ? op.addr_src : op.src;
  for (Reg r : srcs) {
    const RdtEntry& e = rdt_.regs[r];
    if (e.has_writer) ist_.insert(e.writer_pc);
  }
}

SliceInfo IbdaSlicer::classify(const MicroOp& op) {
  SliceInfo info;
  info.is_slice = op.is_mem() || ist_.contains(op.pc);
  info.slice_id = op.seq;

  // Taint depth: memory ops look at address sources only (store data never
  // makes the address dependent); everything else propagates over all sources.
  const std::vector<Reg>& srcs = op.is_mem() ? op.addr_src : op.src;
  uint8_t depth = 0;
  for (Reg r : srcs) {
    const RdtEntry& e = rdt_.regs[r];
    if (e.depth > depth) {
      depth = e.depth;
      info.producer_load_seq = e.tainting_load;
    }
  }
  info.depth = depth;
  info.is_dependent = info.is_slice && depth > 0;

  if (op.dst) {
    RdtEntry& d = rdt_.regs[*op.dst];
    d.writer_pc = op.pc;
    d.writer_seq = op.seq;
    d.has_writer = true;
    if (op.kind == Kind::Load) {
      d.depth = (uint8_t)std::min<int>(depth + 1, 255);
      d.tainting_load = op.seq;
    } else {
      d.depth = depth;
      d.tainting_load = depth ? info.producer_load_seq : 0;
    }
  }
  return info;
}

void IbdaSlicer::pretrain(const Trace& t) {
  for (const MicroOp& op : t.ops) {
    observe(op);
    classify(op);
  }
  rdt_.clear();
}

SliceGraph oracle_slice_graph(const Trace& t) {
  SliceGraph g;
  g.per_uop.resize(t.ops.size());

  // Exact last-writer and taint state, same recurrence the online classifier
  // runs, but used here with full knowledge (no table training lag).
  std::array<int64_t, kNumRegs> last_writer;
  last_writer.fill(-1);
  std::array<uint8_t, kNumRegs> taint_depth{};
  std::array<uint64_t, kNumRegs> taint_load{};

  // Register producers per already-seen op, for the backward closure walks.
  std::vector<std::vector<uint64_t>> op_sources;
  op_sources.reserve(t.ops.size());

  std::unordered_map<uint64_t, uint64_t> node_of_terminator;

  for (const MicroOp& op : t.ops) {
    const std::vector<Reg>& dep_srcs = op.is_mem() ? op.addr_src : op.src;
    uint8_t depth = 0;
    uint64_t tload = 0;
    for (Reg r : dep_srcs) {
      if (taint_depth[r] > depth) {
        depth = taint_depth[r];
        tload = taint_load[r];
      }
    }
    g.per_uop[op.seq].depth = depth;

    if (op.is_mem()) {
      SliceNode node;
      node.id = g.nodes.size();
      node.terminator_seq = op.seq;
      node.is_store_addr = op.kind == Kind::Store;

      // Backward closure over address producers; stops at loads, which form
      // the inter-slice edges.
      std::vector<uint64_t> stack;
      std::vector<uint64_t> seen;
      for (Reg r : op.addr_src)
        if (last_writer[r] >= 0) stack.push_back((uint64_t)last_writer[r]);
      std::vector<uint64_t> producer_terms;
      while (!stack.empty()) {
        uint64_t p = stack.back();
        stack.pop_back();
        if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
        seen.push_back(p);
        const MicroOp& prod = t.ops[p];
        if (prod.kind == Kind::Load) {
          producer_terms.push_back(p);
          continue;  // the load's own slice covers its address chain
        }
        node.members.push_back(p);
        for (uint64_t q : op_sources[p]) stack.push_back(q);
      }
      std::sort(node.members.begin(), node.members.end());
      std::sort(producer_terms.begin(), producer_terms.end());
      producer_terms.erase(std::unique(producer_terms.begin(), producer_terms.end()),
                           producer_terms.end());
      uint32_t d = 0;
      for (uint64_t pt : producer_terms) {
        uint64_t pn = node_of_terminator.at(pt);
        node.producer_slices.push_back(pn);
        d = std::max(d, g.nodes[pn].depth + 1);
      }
      node.depth = d;
      g.edge_count += node.producer_slices.size();
      node_of_terminator[op.seq] = node.id;

      for (uint64_t m : node.members) {
        UopOracle& u = g.per_uop[m];
        if (!u.is_slice) u.slice_id = op.seq;
        u.is_slice = true;
      }
      UopOracle& u = g.per_uop[op.seq];
      u.is_slice = true;
      u.slice_id = op.seq;
      g.nodes.push_back(std::move(node));
    }

    // Record this op's register producers for later closure walks.
    std::vector<uint64_t> prods;
    for (Reg r : op.src)
      if (last_writer[r] >= 0) prods.push_back((uint64_t)last_writer[r]);
    op_sources.push_back(std::move(prods));

    if (op.dst) {
      last_writer[*op.dst] = (int64_t)op.seq;
      if (op.kind == Kind::Load) {
        taint_depth[*op.dst] = (uint8_t)std::min<int>(depth + 1, 255);
        taint_load[*op.dst] = op.seq;
      } else {
        taint_depth[*op.dst] = depth;
        taint_load[*op.dst] = depth ? tload : 0;
      }
    }
  }

  for (auto& u : g.per_uop) u.is_dependent = u.is_slice && u.depth > 0;
  return g;
}

double ist_warmup_error(const Trace& t, size_t ist_capacity) {
  SliceGraph oracle = oracle_slice_graph(t);
  IbdaSlicer slicer(ist_capacity);
  uint64_t slice_ops = 0, mismatches = 0;
  for (const MicroOp& op : t.ops) {
    slicer.observe(op);
    SliceInfo got = slicer.classify(op);
    const UopOracle& want = oracle.per_uop[op.seq];
    if (want.is_slice) slice_ops++;
    if (got.is_slice != want.is_slice || got.is_dependent != want.is_dependent) mismatches++;
  }
  if (slice_ops == 0) return 0.0;
  return (double)mismatches / (double)slice_ops;
}

}  // namespace slicesim
