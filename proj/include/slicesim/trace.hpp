#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicesim {

// Architectural register ids. Renaming is implicit: dependences are resolved
// through last-writer tracking, so 64 ids are plenty for generated kernels.
using Reg = uint8_t;
constexpr unsigned kNumRegs = 64;

constexpr unsigned kLineBytes = 64;
inline uint64_t line_of(uint64_t addr) { return addr & ~uint64_t(kLineBytes - 1); }

enum class Kind : uint8_t { Load, Store, AluInt, AluFp, Branch, Nop };

const char* kind_name(Kind k);

// One micro-op. Loads carry address sources only; stores carry both address
// and data sources (kept separable because only the address side belongs to
// an address-generating slice).
struct MicroOp {
  uint64_t seq = 0;   // position in the trace, assigned by the container
  uint64_t pc = 0;
  Kind kind = Kind::Nop;

  std::optional<Reg> dst;
  std::vector<Reg> src;       // all register sources, addr_src included
  std::vector<Reg> addr_src;  // subset of src feeding address generation

  uint64_t mem_addr = 0;      // loads/stores
  uint8_t mem_size = 0;       // 1, 2, 4 or 8 bytes
  uint8_t exec_latency = 1;   // non-memory execute latency
  bool mispred = false;       // branches: charge the front-end penalty

  bool is_mem() const { return kind == Kind::Load || kind == Kind::Store; }
};

struct Trace {
  std::string name;
  // Loop shape, when the trace is iterations x a fixed body. Zero means
  // "not a loop" (e.g. hand-written kernels).
  uint32_t loop_body_len = 0;
  uint32_t iterations = 0;
  std::vector<MicroOp> ops;

  size_t size() const { return ops.size(); }
};

struct TraceParseError : std::runtime_error {
  int line;
  TraceParseError(int line_no, const std::string& msg);
};

// Text form, one micro-op per line, '#' starts a comment:
//   L pc=<hex> dst=r<n> asrc=<regs> addr=<hex> sz=<n>
//   S pc=<hex> asrc=<regs> dsrc=<regs> addr=<hex> sz=<n>
//   A pc=<hex> dst=r<n> src=<regs> lat=<n> [fp]
//   B pc=<hex> src=<regs> [mispred]
//   N pc=<hex>
// <regs> is a comma-separated register list, empty allowed (asrc=).
Trace parse_trace(const std::string& text, const std::string& name = "trace");
Trace load_trace_file(const std::string& path);
std::string format_trace(const Trace& t);
void write_trace_file(const Trace& t, const std::string& path);

// Sanity checks shared by the parser and the generators: register ids in
// range, loads have addresses, sizes are powers of two up to 8.
void validate(const Trace& t);

// Eleven-op kernel with one stalled consumer in front of two chained slice
// pairs and a trailing dependent load; exercises every steering case.
//   I0 load (own slice)            I6  addr-gen for I7
//   I1 consumer of I0 (non-slice)  I7  load, independent slice
//   I2 addr-gen for I3             I8  filler alu
//   I3 load, independent slice     I9  filler alu (chained off I8)
//   I4 addr-gen for I5, reads I3   I10 load, address from I7
//   I5 load, dependent slice
Trace canonical_fig1();

}  // namespace slicesim
