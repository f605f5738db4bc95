#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "prefsel/prefetcher.hpp"

namespace prefsel {

// Simplified reconstructions sized after common L1D designs. Tables are
// direct-indexed by a XOR-fold of the key; a valid entry with another tag (or
// an invalid entry) is a table miss.

/// PC-indexed constant-stride predictor. Each entry keeps the furthest block
/// it has already requested so a stable stream only asks for new lines.
class StridePrefetcher final : public Prefetcher {
 public:
  static constexpr std::size_t kEntries = 64;
  static constexpr unsigned kConfidenceMax = 3;
  static constexpr unsigned kConfidenceToPredict = 2;

  bool has_prediction(const DemandRecord& record) const override;
  std::unique_ptr<Prefetcher> clone() const override {
    return std::make_unique<StridePrefetcher>(*this);
  }
  EngineKind kind() const override { return EngineKind::stride; }

 protected:
  TrainOutcome do_train(const DemandRecord& record, unsigned degree) override;

 private:
  struct Entry {
    bool valid = false;
    std::uint64_t tag = 0;
    std::uint64_t last_block = 0;
    std::int64_t stride = 0;
    unsigned confidence = 0;
    bool has_frontier = false;
    std::uint64_t frontier = 0;
  };

  static std::size_t index_of(std::uint64_t pc);
  // Applies one observation; returns false when the entry was (re)installed.
  static bool observe(Entry& e, std::uint64_t pc, std::uint64_t block);
  static std::vector<std::uint64_t> predict(Entry& e, std::uint64_t block, unsigned degree);

  std::array<Entry, kEntries> table_{};
};

/// Region stream detector: three monotonic accesses inside a 4 KB region start
/// a stream, after which the next `degree` lines in that direction are asked
/// for on every access.
class StreamPrefetcher final : public Prefetcher {
 public:
  static constexpr std::size_t kEntries = 8;
  static constexpr unsigned kRegionLines = 64;
  static constexpr unsigned kTrainThreshold = 3;

  bool has_prediction(const DemandRecord& record) const override;
  std::unique_ptr<Prefetcher> clone() const override {
    return std::make_unique<StreamPrefetcher>(*this);
  }
  EngineKind kind() const override { return EngineKind::stream; }

 protected:
  TrainOutcome do_train(const DemandRecord& record, unsigned degree) override;

 private:
  struct Entry {
    bool valid = false;
    std::uint64_t region = 0;
    unsigned last_offset = 0;
    int direction = 0;
    unsigned count = 0;
  };

  static bool observe(Entry& e, std::uint64_t block);

  std::array<Entry, kEntries> table_{};
};

/// Footprint predictor: an accumulation table records the lines touched in
/// each active 4 KB region; on eviction the footprint, anchored at the
/// region's trigger offset, is stored in a pattern history table keyed by
/// (pc XOR trigger offset). A new region trigger replays the stored pattern.
class SpatialPrefetcher final : public Prefetcher {
 public:
  static constexpr std::size_t kAccumulationEntries = 16;
  static constexpr std::size_t kPatternEntries = 64;
  static constexpr unsigned kRegionLines = 64;

  bool has_prediction(const DemandRecord& record) const override;
  std::unique_ptr<Prefetcher> clone() const override {
    return std::make_unique<SpatialPrefetcher>(*this);
  }
  EngineKind kind() const override { return EngineKind::spatial; }

 protected:
  TrainOutcome do_train(const DemandRecord& record, unsigned degree) override;

 private:
  struct AccumulationEntry {
    bool valid = false;
    std::uint64_t region = 0;
    std::uint64_t trigger_pc = 0;
    unsigned trigger_offset = 0;
    std::uint64_t bitmap = 0;
  };
  struct PatternEntry {
    bool valid = false;
    std::uint64_t key = 0;
    std::uint64_t pattern = 0;  // bit 0 is the trigger line
  };

  static std::size_t at_index(std::uint64_t region);
  static std::size_t pht_index(std::uint64_t key);
  static std::uint64_t pht_key(std::uint64_t pc, unsigned offset) { return pc ^ offset; }
  static std::uint64_t anchor(std::uint64_t bitmap, unsigned offset);
  // Pattern the PHT would return for this trigger, after accounting for the
  // eviction that installing the region would cause.
  std::optional<std::uint64_t> lookup_after_eviction(std::uint64_t pc, std::uint64_t region,
                                                     unsigned offset) const;

  std::array<AccumulationEntry, kAccumulationEntries> at_{};
  std::array<PatternEntry, kPatternEntries> pht_{};
};

/// Address-correlation predictor: remembers, per pc, the block that followed
/// each block and replays it. Degree is capped at one.
class TemporalPrefetcher final : public Prefetcher {
 public:
  static constexpr std::size_t kHistoryEntries = 64;
  static constexpr std::size_t kDefaultCorrelationEntries = 4096;
  static constexpr unsigned kMaxDegree = 1;

  explicit TemporalPrefetcher(std::size_t correlation_entries = kDefaultCorrelationEntries);

  bool has_prediction(const DemandRecord& record) const override;
  std::unique_ptr<Prefetcher> clone() const override {
    return std::make_unique<TemporalPrefetcher>(*this);
  }
  EngineKind kind() const override { return EngineKind::temporal; }

 protected:
  TrainOutcome do_train(const DemandRecord& record, unsigned degree) override;

 private:
  struct HistoryEntry {
    bool valid = false;
    std::uint64_t pc = 0;
    std::uint64_t last_block = 0;
  };
  struct CorrelationEntry {
    bool valid = false;
    std::uint64_t block = 0;
    std::uint64_t next = 0;
  };

  std::size_t corr_index(std::uint64_t block) const;

  unsigned index_bits_;
  std::array<HistoryEntry, kHistoryEntries> history_{};
  std::vector<CorrelationEntry> correlation_;
};

}  // namespace prefsel
