#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "prefsel/prefetcher.hpp"
#include "prefsel/rng.hpp"

namespace prefsel {

/// Highest-priority non-empty candidate list; index order is priority order.
std::vector<std::uint64_t> static_priority_select(std::span<const TrainOutcome> outcomes);

struct SequentialResult {
  std::size_t index = 0;
  TrainOutcome outcome;
};

/// Probes engines in order and trains only the first one able to predict for
/// this record, or the last engine when none can.
SequentialResult sequential_allocate(const DemandRecord& record,
                                     std::span<const std::unique_ptr<Prefetcher>> engines,
                                     unsigned degree);

enum class Exploration { epsilon_greedy, ucb1 };

struct BanditConfig {
  unsigned enabled_degree = 3;  // X
  std::uint64_t epoch_len = 2048;
  Exploration exploration = Exploration::epsilon_greedy;
  double epsilon = 0.1;
  double ucb_c = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ArmStats {
  std::uint64_t pulls = 0;
  double mean_reward = 0.0;
};

/// Arms are bitmasks over prefetchers: bit i set means prefetcher i runs at
/// degree X, clear means degree 0.
inline std::size_t bandit_arm_count(std::size_t prefetchers) { return std::size_t{1} << prefetchers; }

/// Unpulled arms are tried first (lowest index). Afterwards epsilon-greedy
/// explores uniformly with probability epsilon, else takes the best mean;
/// UCB1 maximises mean + c * sqrt(ln t / pulls). Ties go to the lowest index.
std::size_t bandit_select_arm(std::span<const ArmStats> stats, std::uint64_t t,
                              const BanditConfig& cfg, Rng& rng);

void bandit_update(ArmStats& arm, double reward);

/// Bytes needed by a bandit holding one 8-byte record per arm, with
/// actions^P arms.
std::uint64_t extended_bandit_storage_bytes(std::uint64_t actions, std::uint64_t prefetchers);

/// Recent-prefetch filter shared by the baselines: the Sandbox geometry
/// without issuer bits or pc hashes.
class RecentAddressFilter {
 public:
  explicit RecentAddressFilter(std::size_t entries = 512);

  /// True when the block passes (and is recorded); false when it duplicates a
  /// resident entry.
  bool admit(std::uint64_t block);
  bool holds(std::uint64_t block) const;
  std::uint64_t filtered() const { return filtered_; }

 private:
  struct Entry {
    bool valid = false;
    std::uint8_t tag = 0;
  };
  std::size_t index_of(std::uint64_t block) const { return block & (entries_.size() - 1); }
  std::uint8_t tag_of(std::uint64_t block) const;

  std::vector<Entry> entries_;
  unsigned index_bits_;
  std::uint64_t filtered_ = 0;
};

}  // namespace prefsel
