#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prefsel/trace.hpp"

namespace prefsel {

/// Result of one training event. Candidates are block addresses ordered by
/// predicted distance from the trigger, nearest first, without duplicates.
struct TrainOutcome {
  std::vector<std::uint64_t> candidates;
  bool table_hit = false;
};

struct EngineStats {
  std::uint64_t train_count = 0;
  std::uint64_t table_lookups = 0;
  std::uint64_t table_misses = 0;
};

enum class EngineKind { stream, stride, spatial, temporal };

std::string_view to_string(EngineKind kind);
EngineKind engine_kind_from_string(std::string_view name);

/// Common interface every engine exposes to the selection layers.
class Prefetcher {
 public:
  virtual ~Prefetcher() = default;

  /// Trains on `record` and returns at most `degree` candidates. Degree 0
  /// still trains; selection layers express blocking by not calling train().
  TrainOutcome train(const DemandRecord& record, unsigned degree);

  /// True iff train() on this record would emit at least one candidate given
  /// a degree large enough to reach past anything already prefetched.
  /// Never mutates tables or stats.
  virtual bool has_prediction(const DemandRecord& record) const = 0;

  virtual std::unique_ptr<Prefetcher> clone() const = 0;
  virtual EngineKind kind() const = 0;
  std::string_view name() const { return to_string(kind()); }
  bool is_temporal() const { return kind() == EngineKind::temporal; }

  const EngineStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

 protected:
  virtual TrainOutcome do_train(const DemandRecord& record, unsigned degree) = 0;
  void note_lookup(bool hit) {
    ++stats_.table_lookups;
    if (!hit) ++stats_.table_misses;
  }

 private:
  EngineStats stats_;
};

/// Degree used by has_prediction() and by the probe-consistency tests.
inline constexpr unsigned kProbeDegree = 64;

std::unique_ptr<Prefetcher> make_engine(EngineKind kind);
std::vector<std::unique_ptr<Prefetcher>> make_engines(const std::vector<EngineKind>& kinds);
std::vector<std::unique_ptr<Prefetcher>> clone_engines(
    const std::vector<std::unique_ptr<Prefetcher>>& engines);

}  // namespace prefsel
