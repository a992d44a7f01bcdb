#pragma once

#include <array>
#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

#include "slicesim/trace.hpp"

namespace slicesim {

// Instruction slice table: set of pcs known to feed address generation.
// Unbounded by default; a nonzero capacity turns on LRU replacement.
class Ist {
 public:
  explicit Ist(size_t capacity = 0) : capacity_(capacity) {}

  bool contains(uint64_t pc) const { return map_.count(pc) != 0; }
  void insert(uint64_t pc);
  size_t size() const { return map_.size(); }
  void clear();

 private:
  size_t capacity_;
  std::list<uint64_t> lru_;  // front = most recent, used only when bounded
  std::unordered_map<uint64_t, std::list<uint64_t>::iterator> map_;
};

// Per-register last-writer record. depth counts how many loads the value
// has passed through: 0 = untainted, 1 = read straight out of a load, ...
struct RdtEntry {
  uint64_t writer_pc = 0;
  uint64_t writer_seq = 0;
  bool has_writer = false;
  uint8_t depth = 0;
  uint64_t tainting_load = 0;  // seq of the load behind `depth`, when depth > 0
};

struct Rdt {
  std::array<RdtEntry, kNumRegs> regs;
  void clear() { regs.fill(RdtEntry{}); }
};

struct SliceInfo {
  bool is_slice = false;
  bool is_dependent = false;   // implies is_slice
  uint8_t depth = 0;           // distance from an untainted producer chain
  uint64_t slice_id = 0;       // terminating memory op's seq (terminators only)
  uint64_t producer_load_seq = 0;  // valid when is_dependent
};

// Backward dependency analysis: marks the pcs that wrote a memory op's (or a
// known slice member's) sources, one level deeper per encounter, so slices
// are learned over loop iterations.
class IbdaSlicer {
 public:
  explicit IbdaSlicer(size_t ist_capacity = 0) : ist_(ist_capacity) {}

  // Decode stage. Call once per op in program order, before classify().
  void observe(const MicroOp& op);
  // Rename stage. Updates the RDT and returns the op's steering info.
  SliceInfo classify(const MicroOp& op);

  // Learn the whole trace once without touching rename state afterwards.
  void pretrain(const Trace& t);

  const Ist& ist() const { return ist_; }
  void reset_rdt() { rdt_.clear(); }

 private:
  Ist ist_;
  Rdt rdt_;
};

// Ground-truth slice structure, computed offline with full dataflow and no
// training lag.
struct SliceNode {
  uint64_t id = 0;              // dense index, terminator order
  uint64_t terminator_seq = 0;  // the load or store ending the slice
  bool is_store_addr = false;
  std::vector<uint64_t> members;          // non-memory ops feeding the address
  std::vector<uint64_t> producer_slices;  // node ids of slices whose load feeds this one
  uint32_t depth = 0;
};

struct UopOracle {
  bool is_slice = false;
  bool is_dependent = false;
  uint8_t depth = 0;
  uint64_t slice_id = 0;  // first containing node's terminator seq
};

struct SliceGraph {
  std::vector<SliceNode> nodes;
  std::vector<UopOracle> per_uop;  // indexed by trace seq
  size_t edge_count = 0;
};

SliceGraph oracle_slice_graph(const Trace& t);

// Fraction of the oracle's slice ops that online training misclassifies when
// run cold over the trace with the given table capacity (0 = unbounded).
double ist_warmup_error(const Trace& t, size_t ist_capacity = 0);

}  // namespace slicesim
