#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "prefsel/cache.hpp"
#include "prefsel/metrics.hpp"
#include "prefsel/selectors.hpp"

namespace prefsel {

struct SimulationOptions {
  HierarchyConfig cache;
  // Records before this index train the system but are excluded from metrics.
  std::uint64_t warmup_records = 0;
};

/// Drives one selector and its engines over a trace against the cache model.
class Simulator {
 public:
  using IssueObserver = std::function<void(const DemandRecord&, const PrefetchRequest&)>;

  Simulator(const SimulationOptions& opts, std::vector<std::unique_ptr<Prefetcher>> engines,
            std::unique_ptr<Selector> selector);

  void step(const DemandRecord& record);
  void run(std::span<const DemandRecord> records);

  /// Counters for the measured window, with unused prefetches drained.
  RawCounters counters() const;

  Selector& selector() { return *selector_; }
  const Selector& selector() const { return *selector_; }
  const std::vector<std::unique_ptr<Prefetcher>>& engines() const { return engines_; }
  const CacheHierarchy& cache() const { return cache_; }
  std::uint64_t records_seen() const { return seen_; }

  /// Called for every request leaving the selector, before the cache install.
  void set_issue_observer(IssueObserver obs) { on_issue_ = std::move(obs); }

 private:
  SimulationOptions opts_;
  CacheHierarchy cache_;
  std::vector<std::unique_ptr<Prefetcher>> engines_;
  std::unique_ptr<Selector> selector_;
  IssueObserver on_issue_;

  std::uint64_t seen_ = 0;
  bool measuring_ = false;
  std::uint64_t window_start_cycle_ = 0;
  std::vector<EngineStats> stats_at_window_;
  RawCounters raw_;
};

}  // namespace prefsel
