#include "prefsel/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prefsel/alecto.hpp"
#include "prefsel/cache.hpp"
#include "prefsel/hash.hpp"

namespace prefsel {

std::vector<std::uint64_t> static_priority_select(std::span<const TrainOutcome> outcomes) {
  for (const auto& o : outcomes) {
    if (!o.candidates.empty()) return o.candidates;
  }
  return {};
}

SequentialResult sequential_allocate(const DemandRecord& record,
                                     std::span<const std::unique_ptr<Prefetcher>> engines,
                                     unsigned degree) {
  if (engines.empty()) throw std::invalid_argument("sequential_allocate needs engines");
  std::size_t chosen = engines.size() - 1;
  for (std::size_t i = 0; i < engines.size(); ++i) {
    if (engines[i]->has_prediction(record)) {
      chosen = i;
      break;
    }
  }
  return {chosen, engines[chosen]->train(record, degree)};
}

void BanditConfig::validate() const {
  if (enabled_degree < 1) throw ConfigError("bandit X must be >= 1");
  if (epoch_len == 0) throw ConfigError("bandit epoch_len must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("bandit epsilon must be in [0,1]");
  if (ucb_c < 0.0) throw ConfigError("bandit ucb_c must be >= 0");
}

std::size_t bandit_select_arm(std::span<const ArmStats> stats, std::uint64_t t,
                              const BanditConfig& cfg, Rng& rng) {
  if (stats.empty()) throw std::invalid_argument("bandit has no arms");
  if (t < 1) throw std::invalid_argument("bandit epoch index starts at 1");
  for (std::size_t a = 0; a < stats.size(); ++a) {
    if (stats[a].pulls == 0) return a;
  }

  if (cfg.exploration == Exploration::epsilon_greedy) {
    if (uniform01(rng) < cfg.epsilon) return uniform_below(rng, stats.size());
  }
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < stats.size(); ++a) {
    double score = stats[a].mean_reward;
    if (cfg.exploration == Exploration::ucb1) {
      score += cfg.ucb_c * std::sqrt(std::log(static_cast<double>(t)) /
                                     static_cast<double>(stats[a].pulls));
    }
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

void bandit_update(ArmStats& arm, double reward) {
  ++arm.pulls;
  arm.mean_reward += (reward - arm.mean_reward) / static_cast<double>(arm.pulls);
}

std::uint64_t extended_bandit_storage_bytes(std::uint64_t actions, std::uint64_t prefetchers) {
  std::uint64_t arms = 1;
  for (std::uint64_t i = 0; i < prefetchers; ++i) arms *= actions;
  return 8 * arms;
}

RecentAddressFilter::RecentAddressFilter(std::size_t entries)
    : entries_(entries), index_bits_(log2_exact(entries)) {
  if (!is_pow2(entries)) throw ConfigError("filter size must be a power of two");
}

std::uint8_t RecentAddressFilter::tag_of(std::uint64_t block) const {
  return static_cast<std::uint8_t>(pc_hash(block >> index_bits_, kSandboxTagBits));
}

bool RecentAddressFilter::admit(std::uint64_t block) {
  Entry& e = entries_[index_of(block)];
  const auto tag = tag_of(block);
  if (e.valid && e.tag == tag) {
    ++filtered_;
    return false;
  }
  e = {true, tag};
  return true;
}

bool RecentAddressFilter::holds(std::uint64_t block) const {
  const Entry& e = entries_[index_of(block)];
  return e.valid && e.tag == tag_of(block);
}

}  // namespace prefsel
