#include "prefsel/cache.hpp"

#include <algorithm>
#include <string>

#include "prefsel/hash.hpp"
#include "prefsel/trace.hpp"

namespace prefsel {

const char* to_string(CacheLevel level) {
  switch (level) {
    case CacheLevel::L1: return "L1";
    case CacheLevel::L2: return "L2";
    case CacheLevel::Mem: return "MEM";
  }
  return "?";
}

const char* to_string(Coverage coverage) {
  switch (coverage) {
    case Coverage::not_prefetched: return "not_prefetched";
    case Coverage::timely: return "timely";
    case Coverage::untimely: return "untimely";
  }
  return "?";
}

void CacheConfig::validate() const {
  if (ways == 0 || line_bytes != kLineBytes) {
    throw ConfigError("cache needs ways >= 1 and 64-byte lines");
  }
  if (size_bytes == 0 || size_bytes % (std::uint64_t{ways} * line_bytes) != 0) {
    throw ConfigError("cache size must be a multiple of ways * line size");
  }
  if (!is_pow2(sets())) throw ConfigError("cache set count must be a power of two");
}

void HierarchyConfig::validate() const {
  l1.validate();
  l2.validate();
}

SetAssocCache::SetAssocCache(const CacheConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  sets_ = cfg_.sets();
  lines_.resize(sets_ * cfg_.ways);
}

CacheLine* SetAssocCache::find(std::uint64_t block) {
  const std::size_t base = set_of(block) * cfg_.ways;
  for (std::size_t w = 0; w < cfg_.ways; ++w) {
    auto& l = lines_[base + w];
    if (l.valid && l.block == block) return &l;
  }
  return nullptr;
}

const CacheLine* SetAssocCache::find(std::uint64_t block) const {
  return const_cast<SetAssocCache*>(this)->find(block);
}

std::optional<CacheLine> SetAssocCache::insert(CacheLine line) {
  const std::size_t base = set_of(line.block) * cfg_.ways;
  CacheLine* victim = &lines_[base];
  for (std::size_t w = 0; w < cfg_.ways; ++w) {
    auto& l = lines_[base + w];
    if (!l.valid) {
      victim = &l;
      break;
    }
    if (l.lru_stamp < victim->lru_stamp) victim = &l;
  }
  std::optional<CacheLine> evicted;
  if (victim->valid) evicted = *victim;
  line.valid = true;
  *victim = line;
  touch(*victim);
  return evicted;
}

CacheHierarchy::CacheHierarchy(const HierarchyConfig& cfg)
    : cfg_(cfg), l1_(cfg.l1), l2_(cfg.l2), shadow_(cfg.l1) {}

std::uint32_t CacheHierarchy::fill(SetAssocCache& level, const CacheLine& line) {
  const auto evicted = level.insert(line);
  if (evicted && evicted->prefetched && !evicted->used) {
    ++evicted_unused_;
    return 1;
  }
  return 0;
}

AccessOutcome CacheHierarchy::access_demand(std::uint64_t addr, std::uint64_t cycle) {
  const std::uint64_t block = block_of(addr);
  AccessOutcome out;

  auto classify = [&](CacheLine& line, std::uint64_t hit_latency) {
    const std::uint64_t pending =
        line.fill_complete_cycle > cycle ? line.fill_complete_cycle - cycle : 0;
    out.latency = hit_latency + pending;
    if (line.prefetched && !line.used) {
      line.used = true;
      out.covered = pending > 0 ? Coverage::untimely : Coverage::timely;
      out.useful_source = line.prefetch_source;
      out.useful_fill_start = line.fill_start_cycle;
    }
  };

  if (CacheLine* line = l1_.find(block)) {
    out.level = CacheLevel::L1;
    classify(*line, cfg_.l1.hit_latency);
    l1_.touch(*line);
    return out;
  }

  if (CacheLine* line = l2_.find(block)) {
    out.level = CacheLevel::L2;
    classify(*line, cfg_.l2_hit_latency());
    l2_.touch(*line);
    CacheLine copy;
    copy.block = block;
    copy.fill_start_cycle = cycle;
    copy.fill_complete_cycle = cycle + out.latency;
    out.evicted_unused_prefetches = fill(l1_, copy);
    return out;
  }

  out.level = CacheLevel::Mem;
  out.latency = cfg_.miss_latency();
  CacheLine line;
  line.block = block;
  line.fill_start_cycle = cycle;
  line.fill_complete_cycle = cycle + out.latency;
  out.evicted_unused_prefetches = fill(l2_, line) + fill(l1_, line);
  return out;
}

bool CacheHierarchy::install_prefetch(std::uint64_t addr, CacheLevel level, std::uint64_t cycle,
                                      std::size_t source, std::uint64_t trigger_pc) {
  const std::uint64_t block = block_of(addr);
  if (l1_.contains(block)) return false;

  CacheLine line;
  line.block = block;
  line.fill_start_cycle = cycle;
  line.prefetched = true;
  line.prefetch_source = source;
  line.trigger_pc = trigger_pc;

  CacheLine* in_l2 = l2_.find(block);
  if (level == CacheLevel::L2) {
    if (in_l2) return false;
    line.fill_complete_cycle = cycle + cfg_.memory_latency;
    fill(l2_, line);
    return true;
  }

  if (in_l2) {
    line.fill_complete_cycle =
        std::max<std::uint64_t>(cycle + cfg_.l2.hit_latency, in_l2->fill_complete_cycle);
    if (in_l2->prefetched && !in_l2->used) {
      // Promote the outstanding L2 prefetch; it keeps its original issuer.
      line.prefetch_source = in_l2->prefetch_source;
      line.trigger_pc = in_l2->trigger_pc;
      line.fill_start_cycle = in_l2->fill_start_cycle;
      in_l2->prefetched = false;
      in_l2->prefetch_source.reset();
      in_l2->trigger_pc.reset();
      fill(l1_, line);
      return false;
    }
    fill(l1_, line);
    return true;
  }

  line.fill_complete_cycle = cycle + cfg_.l2.hit_latency + cfg_.memory_latency;
  fill(l1_, line);
  return true;
}

bool CacheHierarchy::shadow_access(std::uint64_t addr) {
  const std::uint64_t block = block_of(addr);
  if (CacheLine* line = shadow_.find(block)) {
    shadow_.touch(*line);
    return true;
  }
  ++shadow_misses_;
  CacheLine line;
  line.block = block;
  shadow_.insert(line);
  return false;
}

std::uint64_t CacheHierarchy::resident_unused_prefetches() const {
  std::uint64_t n = 0;
  auto count = [&](const CacheLine& l) {
    if (l.prefetched && !l.used) ++n;
  };
  l1_.for_each_valid(count);
  l2_.for_each_valid(count);
  return n;
}

}  // namespace prefsel
