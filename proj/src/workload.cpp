#include "slicesim/workload.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace slicesim {

const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::IndepLoads: return "indep";
    case Pattern::DepChain: return "dep-chain";
    case Pattern::MixedSlices: return "mixed";
    case Pattern::AliasMix: return "alias";
    case Pattern::Stream: return "stream";
  }
  return "?";
}

namespace {

constexpr uint64_t kBase = 0x1000000;

// mt19937_64 output is pinned by the standard; distributions are not, so
// address picking stays on raw engine output.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}
  uint64_t next(uint64_t bound) { return eng() % bound; }
  bool chance(double p) { return (double)(eng() % 1000000) < p * 1000000.0; }
};

// Seeded permutation of the footprint's lines, walked cyclically: addresses
// are disjoint until the footprint is exhausted and carry no usable stride.
struct LineWalk {
  std::vector<uint32_t> perm;
  size_t pos = 0;
  LineWalk(uint64_t footprint, Rng& rng) {
    size_t lines = footprint / kLineBytes;
    perm.resize(lines);
    for (size_t i = 0; i < lines; i++) perm[i] = (uint32_t)i;
    for (size_t i = lines - 1; i > 0; i--) {
      size_t j = rng.next(i + 1);
      std::swap(perm[i], perm[j]);
    }
  }
  uint64_t next() {
    uint64_t addr = kBase + (uint64_t)perm[pos] * kLineBytes;
    pos = (pos + 1) % perm.size();
    return addr;
  }
};

MicroOp mk_load(uint64_t pc, Reg dst, std::vector<Reg> asrc, uint64_t addr) {
  MicroOp op;
  op.kind = Kind::Load;
  op.pc = pc;
  op.dst = dst;
  op.addr_src = asrc;
  op.src = std::move(asrc);
  op.mem_addr = addr;
  op.mem_size = 8;
  return op;
}

MicroOp mk_alu(uint64_t pc, Reg dst, std::vector<Reg> src) {
  MicroOp op;
  op.kind = Kind::AluInt;
  op.pc = pc;
  op.dst = dst;
  op.src = std::move(src);
  return op;
}

MicroOp mk_store(uint64_t pc, std::vector<Reg> asrc, std::vector<Reg> dsrc, uint64_t addr) {
  MicroOp op;
  op.kind = Kind::Store;
  op.pc = pc;
  op.addr_src = asrc;
  op.src = std::move(asrc);
  for (Reg r : dsrc) op.src.push_back(r);
  op.mem_addr = addr;
  op.mem_size = 8;
  return op;
}

}  // namespace

Trace generate(const WorkloadSpec& spec) {
  if (spec.footprint < kLineBytes)
    throw std::runtime_error("workload footprint smaller than one cache line");
  if (spec.iterations == 0) throw std::runtime_error("workload needs at least one iteration");

  Rng rng(spec.seed);
  LineWalk walk(spec.footprint, rng);
  Trace t;
  t.name = workload_name(spec);
  t.iterations = spec.iterations;

  switch (spec.pattern) {
    case Pattern::IndepLoads: {
      t.loop_body_len = 1;
      for (uint32_t i = 0; i < spec.iterations; i++)
        t.ops.push_back(mk_load(0x400, (Reg)(i % 48), {}, walk.next()));
      break;
    }

    case Pattern::DepChain: {
      uint32_t links = spec.depth + 1;
      t.loop_body_len = links;
      for (uint32_t i = 0; i < spec.iterations; i++) {
        for (uint32_t j = 0; j < links; j++) {
          std::vector<Reg> asrc = j == 0 ? std::vector<Reg>{} : std::vector<Reg>{(Reg)(10 + j - 1)};
          t.ops.push_back(mk_load(0x400 + 4 * j, (Reg)(10 + j), std::move(asrc), walk.next()));
        }
      }
      break;
    }

    case Pattern::MixedSlices: {
      // Eight single-load slices per iteration; round(fraction*8) of them read
      // the latest independent load through their address generation. Every
      // load also gets a plain consumer so the A queue is never idle.
      constexpr uint32_t kSlices = 8;
      uint32_t dep_count = (uint32_t)std::lround(spec.fraction * kSlices);
      t.loop_body_len = kSlices * 3;
      int last_indep = -1;
      for (uint32_t i = 0; i < spec.iterations; i++) {
        for (uint32_t s = 0; s < kSlices; s++) {
          bool dep = ((s + 1) * dep_count) / kSlices > (s * dep_count) / kSlices;
          std::vector<Reg> gen_src;
          if (dep && last_indep >= 0) gen_src.push_back((Reg)(40 + last_indep));
          t.ops.push_back(mk_alu(0x400 + 12 * s, (Reg)(20 + s), std::move(gen_src)));
          t.ops.push_back(mk_load(0x404 + 12 * s, (Reg)(40 + s), {(Reg)(20 + s)}, walk.next()));
          t.ops.push_back(mk_alu(0x408 + 12 * s, 62, {(Reg)(40 + s)}));
          if (!dep) last_indep = (int)s;
        }
        if (spec.mispred_rate > 0) {
          MicroOp br;
          br.kind = Kind::Branch;
          br.pc = 0x400 + 12 * kSlices;
          br.mispred = rng.chance(spec.mispred_rate);
          t.ops.push_back(br);
          if (i == 0) t.loop_body_len++;
        }
      }
      break;
    }

    case Pattern::AliasMix: {
      // store -> paired load (aliasing with probability p) -> two payload
      // loads whose issue the paired load gates in a FIFO slice queue.
      t.loop_body_len = 5;
      size_t half = walk.perm.size() / 2;
      size_t st_pos = 0;
      for (uint32_t i = 0; i < spec.iterations; i++) {
        uint64_t st_addr = kBase + (uint64_t)walk.perm[st_pos] * kLineBytes;
        st_pos = (st_pos + 1) % std::max<size_t>(half, 1);
        bool alias = rng.chance(spec.alias_p);
        t.ops.push_back(mk_alu(0x500, 5, {}));
        t.ops.push_back(mk_store(0x504, {}, {5}, st_addr));
        t.ops.push_back(mk_load(0x508, 6, {}, alias ? st_addr : st_addr + 8));
        t.ops.push_back(mk_load(0x50c, 7, {}, walk.next()));
        t.ops.push_back(mk_load(0x510, 8, {}, walk.next()));
      }
      break;
    }

    case Pattern::Stream: {
      if (spec.stride == 0) throw std::runtime_error("stream workload needs a nonzero stride");
      t.loop_body_len = 1;
      for (uint32_t i = 0; i < spec.iterations; i++) {
        uint64_t addr = kBase + ((uint64_t)i * spec.stride) % spec.footprint;
        t.ops.push_back(mk_load(0x600, 12, {}, addr));
      }
      break;
    }
  }

  for (size_t i = 0; i < t.ops.size(); i++) t.ops[i].seq = i;
  validate(t);
  return t;
}

namespace {

Pattern pattern_from(const std::string& s) {
  if (s == "indep" || s == "indep-loads") return Pattern::IndepLoads;
  if (s == "dep-chain" || s == "chain") return Pattern::DepChain;
  if (s == "mixed" || s == "mixed-slices") return Pattern::MixedSlices;
  if (s == "alias" || s == "alias-mix") return Pattern::AliasMix;
  if (s == "stream") return Pattern::Stream;
  throw std::runtime_error("unknown workload pattern: " + s);
}

}  // namespace

WorkloadSpec parse_workload_spec(const std::string& text) {
  WorkloadSpec spec;
  std::string norm = text;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream is(norm);
  std::string tok;
  bool have_pattern = false;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad workload field: " + tok);
    std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "pattern") {
      spec.pattern = pattern_from(v);
      have_pattern = true;
    } else if (k == "depth") {
      spec.depth = (uint32_t)std::stoul(v);
    } else if (k == "fraction") {
      spec.fraction = std::stod(v);
    } else if (k == "alias" || k == "p") {
      spec.alias_p = std::stod(v);
    } else if (k == "stride") {
      spec.stride = (uint32_t)std::stoul(v);
    } else if (k == "footprint") {
      spec.footprint = std::stoull(v);
    } else if (k == "iters" || k == "iterations") {
      spec.iterations = (uint32_t)std::stoul(v);
    } else if (k == "seed") {
      spec.seed = std::stoull(v);
    } else if (k == "mispred") {
      spec.mispred_rate = std::stod(v);
    } else {
      throw std::runtime_error("unknown workload field: " + k);
    }
  }
  if (!have_pattern) throw std::runtime_error("workload spec needs pattern=");
  return spec;
}

std::string workload_name(const WorkloadSpec& spec) {
  std::ostringstream os;
  switch (spec.pattern) {
    case Pattern::IndepLoads: os << "indep"; break;
    case Pattern::DepChain: os << "dep_chain_d" << spec.depth; break;
    case Pattern::MixedSlices: os << "mixed_" << (int)std::lround(spec.fraction * 100); break;
    case Pattern::AliasMix: os << "alias_" << (int)std::lround(spec.alias_p * 100); break;
    case Pattern::Stream: os << "stream_" << spec.stride; break;
  }
  os << "_i" << spec.iterations << "_f" << spec.footprint << "_s" << spec.seed;
  return os.str();
}

std::vector<SuiteEntry> bundled_suite() {
  std::vector<SuiteEntry> suite;
  suite.push_back({"fig1", canonical_fig1()});

  auto add = [&](WorkloadSpec s) {
    Trace t = generate(s);
    suite.push_back({t.name, std::move(t)});
  };

  WorkloadSpec s;

  s = {};
  s.pattern = Pattern::IndepLoads;
  s.iterations = 256;
  s.footprint = 16 << 10;
  s.seed = 11;
  add(s);

  s = {};
  s.pattern = Pattern::IndepLoads;
  s.iterations = 512;
  s.footprint = 4 << 20;
  s.seed = 12;
  add(s);

  s = {};
  s.pattern = Pattern::DepChain;
  s.depth = 0;
  s.iterations = 300;
  s.footprint = 8 << 10;
  s.seed = 13;
  add(s);

  s = {};
  s.pattern = Pattern::DepChain;
  s.depth = 1;
  s.iterations = 400;
  s.footprint = 8 << 10;
  s.seed = 14;
  add(s);

  s = {};
  s.pattern = Pattern::DepChain;
  s.depth = 2;
  s.iterations = 300;
  s.footprint = 8 << 10;
  s.seed = 15;
  add(s);

  s = {};
  s.pattern = Pattern::DepChain;
  s.depth = 3;
  s.iterations = 200;
  s.footprint = 1 << 20;
  s.seed = 16;
  add(s);

  s = {};
  s.pattern = Pattern::MixedSlices;
  s.fraction = 0.3;
  s.iterations = 200;
  s.footprint = 16 << 10;
  s.seed = 17;
  add(s);

  s = {};
  s.pattern = Pattern::MixedSlices;
  s.fraction = 0.5;
  s.iterations = 200;
  s.footprint = 16 << 10;
  s.seed = 18;
  add(s);

  s = {};
  s.pattern = Pattern::MixedSlices;
  s.fraction = 0.7;
  s.iterations = 150;
  s.footprint = 16 << 10;
  s.seed = 19;
  add(s);

  s = {};
  s.pattern = Pattern::AliasMix;
  s.alias_p = 0.0;
  s.iterations = 150;
  s.footprint = 16 << 10;
  s.seed = 20;
  add(s);

  s = {};
  s.pattern = Pattern::AliasMix;
  s.alias_p = 0.5;
  s.iterations = 150;
  s.footprint = 16 << 10;
  s.seed = 21;
  add(s);

  s = {};
  s.pattern = Pattern::AliasMix;
  s.alias_p = 1.0;
  s.iterations = 150;
  s.footprint = 16 << 10;
  s.seed = 22;
  add(s);

  s = {};
  s.pattern = Pattern::Stream;
  s.stride = 64;
  s.iterations = 600;
  s.footprint = 4 << 20;
  s.seed = 23;
  add(s);

  s = {};
  s.pattern = Pattern::Stream;
  s.stride = 192;
  s.iterations = 400;
  s.footprint = 2 << 20;
  s.seed = 24;
  add(s);

  return suite;
}

}  // namespace slicesim
