#include "slicesim/memory.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace slicesim {

CacheArray::CacheArray(uint32_t size_kb, uint32_t assoc) : assoc_(assoc) {
  uint64_t lines = uint64_t(size_kb) * 1024 / kLineBytes;
  assert(assoc > 0 && lines >= assoc && lines % assoc == 0);
  sets_ = (uint32_t)(lines / assoc);
  data_.resize(sets_);
}

bool CacheArray::access(uint64_t line) {
  auto& set = data_[(line / kLineBytes) % sets_];
  auto it = std::find(set.begin(), set.end(), line);
  if (it == set.end()) return false;
  set.erase(it);
  set.insert(set.begin(), line);
  return true;
}

bool CacheArray::contains(uint64_t line) const {
  const auto& set = data_[(line / kLineBytes) % sets_];
  return std::find(set.begin(), set.end(), line) != set.end();
}

void CacheArray::install(uint64_t line) {
  auto& set = data_[(line / kLineBytes) % sets_];
  auto it = std::find(set.begin(), set.end(), line);
  if (it != set.end()) set.erase(it);
  set.insert(set.begin(), line);
  if (set.size() > assoc_) set.pop_back();
}

std::vector<uint64_t> StridePrefetcher::train(uint64_t pc, uint64_t line,
                                              uint32_t degree) {
  auto it = std::find_if(streams_.begin(), streams_.end(),
                         [pc](const Stream& s) { return s.pc == pc; });
  if (it == streams_.end()) {
    if (streams_.size() >= max_streams_) streams_.pop_back();
    streams_.insert(streams_.begin(), {pc, line, 0, 0});
    return {};
  }
  Stream s = *it;
  streams_.erase(it);
  streams_.insert(streams_.begin(), s);
  Stream& str = streams_.front();

  int64_t delta = (int64_t)line - (int64_t)str.last_line;
  if (delta == 0) return {};  // same line again; nothing to learn
  std::vector<uint64_t> targets;
  if (delta == str.stride) {
    str.confidence = std::min<uint32_t>(str.confidence + 1, 3);
    if (str.confidence >= 2) {
      for (uint32_t d = 1; d <= degree; ++d)
        targets.push_back(line + (uint64_t)(str.stride * (int64_t)d));
    }
  } else {
    str.stride = delta;
    str.confidence = 0;
  }
  str.last_line = line;
  return targets;
}

MemoryHierarchy::MemoryHierarchy(const MemConfig& cfg)
    : cfg_(cfg),
      l1_(cfg.l1.size_kb, cfg.l1.assoc),
      llc_(cfg.llc.size_kb, cfg.llc.assoc),
      pf_(16) {}

void MemoryHierarchy::begin_cycle(uint64_t now) {
  while (!fills_.empty() && fills_.begin()->first <= now) {
    Fill f = fills_.begin()->second;
    fills_.erase(fills_.begin());
    llc_.install(f.line);
    if (f.into_l1) l1_.install(f.line);
    llc_inflight_.erase(f.line);
  }
  for (size_t i = 0; i < mshrs_.size();) {
    if (mshrs_[i].fill_cycle <= now)
      mshrs_.erase(mshrs_.begin() + (ptrdiff_t)i);
    else
      ++i;
  }
}

uint64_t MemoryHierarchy::dram_fill_cycle(uint64_t now) {
  if (cfg_.dram_bw_gbps <= 0.0) return now;
  double bytes_per_cycle = cfg_.dram_bw_gbps / cfg_.clock_ghz;
  uint64_t busy = (uint64_t)std::ceil(kLineBytes / bytes_per_cycle);
  uint64_t slot = std::max(now, next_dram_slot_);
  next_dram_slot_ = slot + busy;
  return slot;
}

void MemoryHierarchy::issue_prefetches(uint64_t pc, uint64_t line,
                                       uint64_t now) {
  for (uint64_t target : pf_.train(pc, line, cfg_.prefetch_degree)) {
    if (llc_.contains(target) || llc_inflight_.count(target)) continue;
    uint64_t slot = dram_fill_cycle(now);
    uint64_t fill = slot + cfg_.llc.latency + cfg_.dram_latency;
    llc_inflight_[target] = fill;
    fills_.emplace(fill, Fill{target, false});
    prefetches_issued++;
  }
}

MemResult MemoryHierarchy::load_access(uint64_t addr, uint32_t size,
                                       uint64_t pc, uint64_t now) {
  (void)size;
  uint64_t line = line_of(addr);
  if (l1_.access(line))
    return {true, HitLevel::L1, HitLevel::L1, now + cfg_.l1.latency};

  for (const Mshr& m : mshrs_)
    if (m.line == line) return {true, m.site, m.site, m.fill_cycle};

  if (mshrs_.size() >= cfg_.l1_mshrs) return {false, HitLevel::Mem, HitLevel::Mem, 0};

  llc_accesses++;
  if (cfg_.prefetch) issue_prefetches(pc, line, now);

  uint64_t l1_llc = cfg_.l1.latency + cfg_.llc.latency;
  if (llc_.access(line)) {
    uint64_t fill = now + l1_llc;
    mshrs_.push_back({line, fill, HitLevel::Llc});
    fills_.emplace(fill, Fill{line, true});
    return {true, HitLevel::Llc, HitLevel::Llc, fill};
  }

  auto it = llc_inflight_.find(line);
  if (it != llc_inflight_.end()) {
    prefetch_covered++;
    uint64_t fill = std::max(now, it->second) + l1_llc;
    mshrs_.push_back({line, fill, HitLevel::Llc});
    fills_.emplace(fill, Fill{line, true});
    return {true, HitLevel::Llc, HitLevel::Llc, fill};
  }

  llc_misses++;
  uint64_t fill = dram_fill_cycle(now) + l1_llc + cfg_.dram_latency;
  mshrs_.push_back({line, fill, HitLevel::Mem});
  fills_.emplace(fill, Fill{line, true});
  return {true, HitLevel::Mem, HitLevel::Mem, fill};
}

void MemoryHierarchy::store_write(uint64_t addr, uint32_t size, uint64_t pc,
                                  uint64_t now) {
  (void)size;
  uint64_t line = line_of(addr);
  if (l1_.access(line)) return;

  llc_accesses++;
  if (cfg_.prefetch) issue_prefetches(pc, line, now);

  if (llc_.access(line)) {
    l1_.install(line);
    return;
  }
  if (llc_inflight_.count(line)) {
    prefetch_covered++;
    llc_.install(line);
    l1_.install(line);
    return;
  }
  llc_misses++;
  llc_.install(line);
  l1_.install(line);
}

void MemoryHierarchy::warm_line(uint64_t addr) {
  uint64_t line = line_of(addr);
  llc_.install(line);
  l1_.install(line);
}

}  // namespace slicesim
