#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace prefsel {

enum class CacheLevel : std::uint8_t { L1, L2, Mem };
enum class Coverage : std::uint8_t { not_prefetched, timely, untimely };

const char* to_string(CacheLevel level);
const char* to_string(Coverage coverage);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CacheConfig {
  std::uint64_t size_bytes = 32 * 1024;
  std::uint32_t ways = 8;
  std::uint32_t line_bytes = 64;
  std::uint32_t hit_latency = 4;

  std::size_t sets() const { return size_bytes / (std::uint64_t{ways} * line_bytes); }
  /// Throws ConfigError unless the geometry yields a power-of-two set count.
  void validate() const;
};

struct HierarchyConfig {
  CacheConfig l1{32 * 1024, 8, 64, 4};
  CacheConfig l2{256 * 1024, 8, 64, 15};
  std::uint32_t memory_latency = 200;

  void validate() const;
  std::uint64_t l2_hit_latency() const { return l1.hit_latency + l2.hit_latency; }
  std::uint64_t miss_latency() const { return l2_hit_latency() + memory_latency; }
};

struct CacheLine {
  std::uint64_t block = 0;
  bool valid = false;
  std::uint64_t fill_start_cycle = 0;
  std::uint64_t fill_complete_cycle = 0;
  bool prefetched = false;
  std::optional<std::size_t> prefetch_source;
  std::optional<std::uint64_t> trigger_pc;
  bool used = false;
  std::uint64_t lru_stamp = 0;
};

/// Single set-associative level with true LRU.
class SetAssocCache {
 public:
  explicit SetAssocCache(const CacheConfig& cfg);

  const CacheConfig& config() const { return cfg_; }

  CacheLine* find(std::uint64_t block);
  const CacheLine* find(std::uint64_t block) const;
  bool contains(std::uint64_t block) const { return find(block) != nullptr; }

  void touch(CacheLine& line) { line.lru_stamp = ++clock_; }

  /// Installs `line` (block must be absent) as MRU; returns the evicted line
  /// when a valid victim was displaced.
  std::optional<CacheLine> insert(CacheLine line);

  template <typename F>
  void for_each_valid(F&& fn) const {
    for (const auto& l : lines_) {
      if (l.valid) fn(l);
    }
  }

 private:
  std::size_t set_of(std::uint64_t block) const { return block & (sets_ - 1); }

  CacheConfig cfg_;
  std::size_t sets_;
  std::vector<CacheLine> lines_;
  std::uint64_t clock_ = 0;
};

struct AccessOutcome {
  CacheLevel level = CacheLevel::Mem;
  std::uint64_t latency = 0;
  Coverage covered = Coverage::not_prefetched;
  std::uint32_t evicted_unused_prefetches = 0;
  // Set when this access made a prefetched line useful.
  std::optional<std::size_t> useful_source;
  std::uint64_t useful_fill_start = 0;
};

/// L1D + L2 with prefetch-fill timing, plus an L1-shaped shadow cache that
/// never receives prefetches.
class CacheHierarchy {
 public:
  explicit CacheHierarchy(const HierarchyConfig& cfg);

  const HierarchyConfig& config() const { return cfg_; }

  AccessOutcome access_demand(std::uint64_t addr, std::uint64_t cycle);

  /// Returns true when a new prefetched line was created. A block already at
  /// `level` or above is rejected. An L1 request for a block sitting in L2 as
  /// an unused prefetch moves that prefetch up and also returns false, since
  /// no new prefetch was issued.
  bool install_prefetch(std::uint64_t addr, CacheLevel level, std::uint64_t cycle,
                        std::size_t source, std::uint64_t trigger_pc);

  bool shadow_access(std::uint64_t addr);

  std::uint64_t shadow_misses() const { return shadow_misses_; }
  std::uint64_t evicted_unused_prefetches() const { return evicted_unused_; }
  /// Prefetched lines never demanded and still resident.
  std::uint64_t resident_unused_prefetches() const;

  const SetAssocCache& l1() const { return l1_; }
  const SetAssocCache& l2() const { return l2_; }

 private:
  std::uint32_t fill(SetAssocCache& level, const CacheLine& line);

  HierarchyConfig cfg_;
  SetAssocCache l1_;
  SetAssocCache l2_;
  SetAssocCache shadow_;
  std::uint64_t shadow_misses_ = 0;
  std::uint64_t evicted_unused_ = 0;
};

}  // namespace prefsel
