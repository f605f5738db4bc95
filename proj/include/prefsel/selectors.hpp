#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "prefsel/alecto.hpp"
#include "prefsel/baselines.hpp"
#include "prefsel/cache.hpp"
#include "prefsel/prefetcher.hpp"

namespace prefsel {

struct PrefetchRequest {
  std::uint64_t block = 0;
  CacheLevel level = CacheLevel::L1;
  std::size_t source = 0;
};

using EngineSpan = std::span<const std::unique_ptr<Prefetcher>>;

/// One prefetcher-selection scheme: decides which engines see a demand and
/// which of their candidates go downstream.
class Selector {
 public:
  virtual ~Selector() = default;
  virtual std::string_view name() const = 0;

  /// Outcome of the demand access that precedes on_demand() for the same record.
  virtual void on_access(const AccessOutcome&) {}

  virtual std::vector<PrefetchRequest> on_demand(const DemandRecord& record,
                                                 EngineSpan engines) = 0;

  /// Whether the scheme's duplicate filter currently holds `block`.
  virtual bool filter_holds(std::uint64_t block) const = 0;

  virtual std::optional<std::uint64_t> storage_bits() const { return std::nullopt; }
};

class AlectoSelector final : public Selector {
 public:
  explicit AlectoSelector(const AlectoConfig& cfg) : alecto_(cfg) {}

  std::string_view name() const override {
    return alecto_.config().fixed_degree_mode ? "alecto_fixed_degree" : "alecto";
  }
  std::vector<PrefetchRequest> on_demand(const DemandRecord& record, EngineSpan engines) override;
  bool filter_holds(std::uint64_t block) const override { return alecto_.sandbox_holds(block); }
  std::optional<std::uint64_t> storage_bits() const override {
    return implementation_storage_bits(alecto_.config()).total;
  }

  Alecto& alecto() { return alecto_; }
  const Alecto& alecto() const { return alecto_; }

 private:
  Alecto alecto_;
};

/// Broadcast training, output from the first engine (in engine order) that
/// has candidates.
class StaticPrioritySelector final : public Selector {
 public:
  explicit StaticPrioritySelector(unsigned degree) : degree_(degree) {}

  std::string_view name() const override { return "ipcp"; }
  std::vector<PrefetchRequest> on_demand(const DemandRecord& record, EngineSpan engines) override;
  bool filter_holds(std::uint64_t block) const override { return filter_.holds(block); }

 private:
  unsigned degree_;
  RecentAddressFilter filter_;
};

/// Each demand trains exactly one engine, chosen by probing in engine order.
class SequentialSelector final : public Selector {
 public:
  explicit SequentialSelector(unsigned degree) : degree_(degree) {}

  std::string_view name() const override { return "dol"; }
  std::vector<PrefetchRequest> on_demand(const DemandRecord& record, EngineSpan engines) override;
  bool filter_holds(std::uint64_t block) const override { return filter_.holds(block); }

 private:
  unsigned degree_;
  RecentAddressFilter filter_;
};

/// Broadcast training; a bandit picks, once per epoch, which engines' outputs
/// are issued. Reward is the epoch's demand hit rate (L1 hits plus
/// prefetch-covered accesses).
class BanditSelector final : public Selector {
 public:
  BanditSelector(const BanditConfig& cfg, std::size_t prefetchers, std::string_view name);

  std::string_view name() const override { return name_; }
  void on_access(const AccessOutcome& outcome) override;
  std::vector<PrefetchRequest> on_demand(const DemandRecord& record, EngineSpan engines) override;
  bool filter_holds(std::uint64_t block) const override { return filter_.holds(block); }

  const std::vector<std::size_t>& arm_history() const { return history_; }
  std::span<const ArmStats> arm_stats() const { return stats_; }

 private:
  BanditConfig cfg_;
  std::string name_;
  std::vector<ArmStats> stats_;
  Rng rng_;
  std::size_t arm_ = 0;
  std::uint64_t epoch_ = 0;
  std::uint64_t in_epoch_ = 0;
  std::uint64_t hits_ = 0;
  std::vector<std::size_t> history_;
  RecentAddressFilter filter_;
};

}  // namespace prefsel
