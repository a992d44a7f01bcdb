#pragma once

#include <cstdint>
#include <string>

namespace slicesim {

// INO     single in-order queue, stall-on-use, no memory-level parallelism
// LSC     in-order A (non-slice) + in-order B (slice) queues
// FREEWAY LSC plus a separate in-order queue for dependent slices
// IDEAL_SOOO  LSC with the slice queue picking any ready entry, oldest first
// OOO     single out-of-order window, oldest ready first
enum class Variant : uint8_t { Ino, Lsc, Freeway, IdealSooo, Ooo };

const char* variant_name(Variant v);
bool parse_variant(const std::string& s, Variant& out);

struct CoreConfig {
  Variant variant = Variant::Freeway;
  uint32_t width = 2;       // issue width; retire width matches
  uint32_t window = 64;     // in-flight micro-ops
  uint32_t q_a = 64;
  uint32_t q_b = 32;        // 64 for LSC/IDEAL_SOOO defaults
  uint32_t q_y = 32;
  uint32_t q_y2 = 32;
  uint32_t branch_penalty = 9;  // 7 for the in-order core
  uint32_t store_buffer = 16;

  // Per-cycle functional unit slots.
  uint32_t fu_int = 2, fu_fp = 1, fu_branch = 1, fu_load = 1, fu_store = 1;

  // Optional mechanisms.
  bool skip_aliased_loads = false;  // alias-blocked loads stop blocking their queue
  bool second_yiq = false;          // dependence depth >= 2 goes to a second queue
  bool oracle_load_spec = false;    // perfect memory dependence for unresolved stores
  bool perfect_frontend = false;    // ignore branch mispredict flags

  size_t ist_capacity = 0;          // 0 = unbounded slice table
  bool ist_pretrain = true;         // learn the trace once before timing

  static CoreConfig defaults(Variant v);
};

}  // namespace slicesim
