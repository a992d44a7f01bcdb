#include "slicesim/trace.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <set>
#include <sstream>

namespace slicesim {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Load: return "L";
    case Kind::Store: return "S";
    case Kind::AluInt: return "A";
    case Kind::AluFp: return "A";
    case Kind::Branch: return "B";
    case Kind::Nop: return "N";
  }
  return "?";
}

TraceParseError::TraceParseError(int line_no, const std::string& msg)
    : std::runtime_error("trace line " + std::to_string(line_no) + ": " + msg),
      line(line_no) {}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

Reg parse_reg(const std::string& s, int line) {
  if (s.size() < 2 || s[0] != 'r') throw TraceParseError(line, "bad register '" + s + "'");
  char* end = nullptr;
  long v = std::strtol(s.c_str() + 1, &end, 10);
  if (*end != '\0' || v < 0 || v >= (long)kNumRegs)
    throw TraceParseError(line, "register out of range '" + s + "'");
  return (Reg)v;
}

std::vector<Reg> parse_reg_list(const std::string& s, int line) {
  std::vector<Reg> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_reg(item, line));
  return out;
}

uint64_t parse_u64(const std::string& s, int line, int base) {
  char* end = nullptr;
  uint64_t v = std::strtoull(s.c_str(), &end, base);
  if (end == s.c_str() || *end != '\0')
    throw TraceParseError(line, "bad number '" + s + "'");
  return v;
}

// key=value tokens plus bare flags; duplicate keys are an error.
struct Fields {
  std::vector<std::pair<std::string, std::string>> kv;
  std::set<std::string> flags;
  int line;

  bool has(const std::string& k) const {
    for (auto& p : kv)
      if (p.first == k) return true;
    return false;
  }
  std::string get(const std::string& k) const {
    for (auto& p : kv)
      if (p.first == k) return p.second;
    throw TraceParseError(line, "missing " + k + "=");
  }
};

Fields parse_fields(const std::vector<std::string>& toks, int line) {
  Fields f;
  f.line = line;
  for (size_t i = 1; i < toks.size(); i++) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      if (!f.flags.insert(toks[i]).second)
        throw TraceParseError(line, "duplicate flag '" + toks[i] + "'");
      continue;
    }
    std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
    if (f.has(k)) throw TraceParseError(line, "duplicate field '" + k + "'");
    f.kv.emplace_back(k, v);
  }
  return f;
}

void check_known(const Fields& f, std::initializer_list<const char*> keys,
                 std::initializer_list<const char*> flags) {
  for (auto& p : f.kv) {
    bool ok = false;
    for (auto* k : keys) ok |= (p.first == k);
    if (!ok) throw TraceParseError(f.line, "unknown field '" + p.first + "'");
  }
  for (auto& fl : f.flags) {
    bool ok = false;
    for (auto* k : flags) ok |= (fl == k);
    if (!ok) throw TraceParseError(f.line, "unknown flag '" + fl + "'");
  }
}

}  // namespace

Trace parse_trace(const std::string& text, const std::string& name) {
  Trace t;
  t.name = name;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    line_no++;
    auto hash = raw.find('#');
    std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    if (hash != std::string::npos) {
      // Loop shape annotation emitted by the generators.
      std::istringstream cs(raw.substr(hash + 1));
      std::string key;
      if (cs >> key && key == "loop") {
        std::string a, b;
        if (cs >> a >> b) {
          if (a.rfind("body=", 0) == 0) t.loop_body_len = (uint32_t)std::stoul(a.substr(5));
          if (b.rfind("iters=", 0) == 0) t.iterations = (uint32_t)std::stoul(b.substr(6));
        }
      }
    }
    auto toks = split_ws(body);
    if (toks.empty()) continue;

    MicroOp op;
    op.seq = t.ops.size();
    const std::string& mnem = toks[0];
    Fields f = parse_fields(toks, line_no);
    op.pc = parse_u64(f.get("pc"), line_no, 16);

    if (mnem == "L") {
      check_known(f, {"pc", "dst", "asrc", "addr", "sz"}, {});
      op.kind = Kind::Load;
      op.dst = parse_reg(f.get("dst"), line_no);
      op.addr_src = parse_reg_list(f.get("asrc"), line_no);
      op.src = op.addr_src;
      op.mem_addr = parse_u64(f.get("addr"), line_no, 16);
      op.mem_size = (uint8_t)parse_u64(f.get("sz"), line_no, 10);
    } else if (mnem == "S") {
      check_known(f, {"pc", "asrc", "dsrc", "addr", "sz"}, {});
      op.kind = Kind::Store;
      op.addr_src = parse_reg_list(f.get("asrc"), line_no);
      op.src = op.addr_src;
      for (Reg r : parse_reg_list(f.get("dsrc"), line_no))
        if (std::find(op.src.begin(), op.src.end(), r) == op.src.end()) op.src.push_back(r);
      op.mem_addr = parse_u64(f.get("addr"), line_no, 16);
      op.mem_size = (uint8_t)parse_u64(f.get("sz"), line_no, 10);
    } else if (mnem == "A") {
      check_known(f, {"pc", "dst", "src", "lat"}, {"fp"});
      op.kind = f.flags.count("fp") ? Kind::AluFp : Kind::AluInt;
      op.dst = parse_reg(f.get("dst"), line_no);
      op.src = parse_reg_list(f.get("src"), line_no);
      op.exec_latency = f.has("lat") ? (uint8_t)parse_u64(f.get("lat"), line_no, 10)
                                     : (op.kind == Kind::AluFp ? 3 : 1);
    } else if (mnem == "B") {
      check_known(f, {"pc", "src"}, {"mispred"});
      op.kind = Kind::Branch;
      op.src = parse_reg_list(f.get("src"), line_no);
      op.mispred = f.flags.count("mispred") > 0;
    } else if (mnem == "N") {
      check_known(f, {"pc"}, {});
      op.kind = Kind::Nop;
    } else {
      throw TraceParseError(line_no, "unknown mnemonic '" + mnem + "'");
    }
    if (op.kind == Kind::Load && !f.has("addr"))
      throw TraceParseError(line_no, "load without addr=");
    t.ops.push_back(std::move(op));
  }
  validate(t);
  return t;
}

Trace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string name = path;
  auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parse_trace(ss.str(), name);
}

namespace {

void append_hex(std::string& out, uint64_t v) {
  char buf[20];
  snprintf(buf, sizeof buf, "0x%llx", (unsigned long long)v);
  out += buf;
}

void append_regs(std::string& out, const std::vector<Reg>& regs) {
  for (size_t i = 0; i < regs.size(); i++) {
    if (i) out += ',';
    out += 'r';
    out += std::to_string(regs[i]);
  }
}

}  // namespace

std::string format_trace(const Trace& t) {
  std::string out;
  if (t.loop_body_len)
    out += "# loop body=" + std::to_string(t.loop_body_len) +
           " iters=" + std::to_string(t.iterations) + "\n";
  for (const MicroOp& op : t.ops) {
    switch (op.kind) {
      case Kind::Load:
        out += "L pc=";
        append_hex(out, op.pc);
        out += " dst=r" + std::to_string(*op.dst) + " asrc=";
        append_regs(out, op.addr_src);
        out += " addr=";
        append_hex(out, op.mem_addr);
        out += " sz=" + std::to_string(op.mem_size);
        break;
      case Kind::Store: {
        out += "S pc=";
        append_hex(out, op.pc);
        out += " asrc=";
        append_regs(out, op.addr_src);
        out += " dsrc=";
        std::vector<Reg> dsrc;
        for (Reg r : op.src)
          if (std::find(op.addr_src.begin(), op.addr_src.end(), r) == op.addr_src.end())
            dsrc.push_back(r);
        append_regs(out, dsrc);
        out += " addr=";
        append_hex(out, op.mem_addr);
        out += " sz=" + std::to_string(op.mem_size);
        break;
      }
      case Kind::AluInt:
      case Kind::AluFp:
        out += "A pc=";
        append_hex(out, op.pc);
        out += " dst=r" + std::to_string(*op.dst) + " src=";
        append_regs(out, op.src);
        out += " lat=" + std::to_string(op.exec_latency);
        if (op.kind == Kind::AluFp) out += " fp";
        break;
      case Kind::Branch:
        out += "B pc=";
        append_hex(out, op.pc);
        out += " src=";
        append_regs(out, op.src);
        if (op.mispred) out += " mispred";
        break;
      case Kind::Nop:
        out += "N pc=";
        append_hex(out, op.pc);
        break;
    }
    out += '\n';
  }
  return out;
}

void write_trace_file(const Trace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << format_trace(t);
}

void validate(const Trace& t) {
  for (const MicroOp& op : t.ops) {
    int line = (int)op.seq + 1;
    if (op.is_mem()) {
      if (op.mem_size != 1 && op.mem_size != 2 && op.mem_size != 4 && op.mem_size != 8)
        throw TraceParseError(line, "bad access size " + std::to_string(op.mem_size));
    }
    if (op.kind == Kind::Load && !op.dst) throw TraceParseError(line, "load without dst");
    std::set<Reg> seen;
    for (Reg r : op.src)
      if (!seen.insert(r).second)
        throw TraceParseError(line, "duplicate source register r" + std::to_string(r));
    for (Reg r : op.addr_src)
      if (std::find(op.src.begin(), op.src.end(), r) == op.src.end())
        throw TraceParseError(line, "addr source not in source set");
  }
}

Trace canonical_fig1() {
  auto alu = [](uint64_t pc, Reg dst, std::vector<Reg> src) {
    MicroOp op;
    op.kind = Kind::AluInt;
    op.pc = pc;
    op.dst = dst;
    op.src = std::move(src);
    return op;
  };
  auto load = [](uint64_t pc, Reg dst, std::vector<Reg> asrc, uint64_t addr) {
    MicroOp op;
    op.kind = Kind::Load;
    op.pc = pc;
    op.dst = dst;
    op.addr_src = asrc;
    op.src = std::move(asrc);
    op.mem_addr = addr;
    op.mem_size = 8;
    return op;
  };

  Trace t;
  t.name = "fig1";
  t.ops = {
      load(0x100, 1, {}, 0x10000),   // I0
      alu(0x104, 2, {1}),            // I1 stalls behind I0's data
      alu(0x108, 8, {}),             // I2
      load(0x10c, 3, {8}, 0x20000),  // I3
      alu(0x110, 9, {3}),            // I4 consumes I3, feeds I5's address
      load(0x114, 4, {9}, 0x30000),  // I5
      alu(0x118, 10, {}),            // I6
      load(0x11c, 5, {10}, 0x40000), // I7
      alu(0x120, 6, {}),             // I8
      alu(0x124, 7, {6}),            // I9
      load(0x128, 11, {5}, 0x50000), // I10 address comes from I7
  };
  for (size_t i = 0; i < t.ops.size(); i++) t.ops[i].seq = i;
  return t;
}

}  // namespace slicesim
