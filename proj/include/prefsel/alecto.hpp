#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefsel/cache.hpp"
#include "prefsel/trace.hpp"

namespace prefsel {

struct AlectoConfig {
  std::size_t prefetchers = 3;
  unsigned max_aggressive = 5;       // M: IA_0 .. IA_M
  unsigned block_epochs = 8;         // N: IB_-N .. IB_0
  unsigned conservative_degree = 3;  // c
  double proficiency_boundary = 0.75;
  double deficiency_boundary = 0.05;
  unsigned epoch_demands = 100;
  unsigned dead_threshold = 150;
  unsigned min_issued_for_judgement = 8;
  std::optional<std::size_t> temporal_index;
  // Ablation: every IA_m state issues `fixed_ia_degree` instead of c+m+1.
  bool fixed_degree_mode = false;
  unsigned fixed_ia_degree = 6;
  std::size_t alloc_entries = 64;
  std::size_t sample_entries = 64;
  std::size_t sandbox_entries = 512;

  void validate() const;
};

/// Per-(pc, prefetcher) selection state: UI, IA_m or IB_n.
class PrefState {
 public:
  enum class Kind : std::uint8_t { UI, IA, IB };

  constexpr PrefState() = default;
  static constexpr PrefState ui() { return PrefState(Kind::UI, 0); }
  static constexpr PrefState ia(int m) { return PrefState(Kind::IA, m); }
  static constexpr PrefState ib(int n) { return PrefState(Kind::IB, n); }

  constexpr Kind kind() const { return kind_; }
  /// m for IA, n (<= 0) for IB, 0 for UI.
  constexpr int level() const { return level_; }
  constexpr bool is_ui() const { return kind_ == Kind::UI; }
  constexpr bool is_ia() const { return kind_ == Kind::IA; }
  constexpr bool is_ib() const { return kind_ == Kind::IB; }

  /// Dense code in [0, 3 + M + N): UI=0, IA_m=1+m, IB_n=2+M+N+n.
  unsigned encode(unsigned max_aggressive, unsigned block_epochs) const;
  static PrefState decode(unsigned code, unsigned max_aggressive, unsigned block_epochs);

  std::string str() const;

  friend constexpr bool operator==(PrefState, PrefState) = default;

 private:
  constexpr PrefState(Kind k, int level) : kind_(k), level_(static_cast<std::int8_t>(level)) {}

  Kind kind_ = Kind::UI;
  std::int8_t level_ = 0;
};

/// Bits needed to store one PrefState.
unsigned state_bits(unsigned max_aggressive, unsigned block_epochs);

/// Applies one epoch of the allocation state machine. `accuracy[i]` is empty
/// when prefetcher i issued too little to be judged.
std::vector<PrefState> epoch_update(std::span<const PrefState> states,
                                    std::span<const std::optional<double>> accuracy,
                                    const AlectoConfig& cfg);

struct PrefetcherDirective {
  bool train = false;
  unsigned degree = 0;
  unsigned l1_quota = 0;
  unsigned l2_quota = 0;
};

struct AllocationDirective {
  std::vector<PrefetcherDirective> per_prefetcher;
};

/// Directive for one prefetcher in `state`.
PrefetcherDirective directive_for(PrefState state, const AlectoConfig& cfg);

struct RoutedPrefetch {
  std::uint64_t block = 0;
  CacheLevel level = CacheLevel::L1;
};

struct StorageBits {
  std::uint64_t allocation = 0;
  std::uint64_t sample = 0;
  std::uint64_t sandbox = 0;
  std::uint64_t total = 0;
  std::uint64_t total_excluding_sandbox = 0;
};

/// Storage budget of the three tables at their default geometry
/// (64/64/512 entries), as a function of the prefetcher count.
StorageBits storage_bits(std::uint64_t prefetchers);

/// Field-by-field count of the structures this implementation keeps.
StorageBits implementation_storage_bits(const AlectoConfig& cfg);

inline constexpr unsigned kAllocTagBits = 9;
inline constexpr unsigned kSampleTagBits = 9;
inline constexpr unsigned kSandboxTagBits = 6;
inline constexpr unsigned kSandboxPcHashBits = 9;
inline constexpr unsigned kCounterBits = 8;
inline constexpr unsigned kDemandBits = 8;
// Wide enough to hold the default dead threshold of 150.
inline constexpr unsigned kDeadBits = 8;

/// Allocation, Sample and Sandbox tables plus the per-demand dataflow.
class Alecto {
 public:
  using EpochObserver =
      std::function<void(std::uint64_t pc, std::span<const PrefState> after)>;

  explicit Alecto(const AlectoConfig& cfg);

  const AlectoConfig& config() const { return cfg_; }

  /// Sandbox confirmation and demand/epoch bookkeeping for one demand. Call
  /// before executing this demand's directive.
  bool on_demand_observed(const DemandRecord& record);

  AllocationDirective allocate(const DemandRecord& record);

  /// Filters one prefetcher's candidates through the Sandbox. Kept blocks are
  /// returned with their fill level: list positions below `l1_quota` go to L1.
  std::vector<RoutedPrefetch> on_prefetch_issued(std::uint64_t pc, std::size_t prefetcher,
                                                 std::span<const std::uint64_t> blocks,
                                                 unsigned l1_quota);

  /// Closes the pc's allocate+train round: updates the dead counter from the
  /// number of prefetches that survived the Sandbox, resetting the pc's states
  /// to UI when it reaches the threshold.
  void end_round(std::uint64_t pc, std::size_t downstream);

  std::optional<std::vector<PrefState>> states_for(std::uint64_t pc) const;
  /// Sandbox residency of a block, for filter checks.
  bool sandbox_holds(std::uint64_t block) const;

  struct SampleView {
    std::vector<unsigned> issued;
    std::vector<unsigned> confirmed;
    unsigned deads = 0;
    unsigned demands = 0;
  };
  std::optional<SampleView> sample_for(std::uint64_t pc) const;

  std::uint64_t epochs_fired() const { return epochs_fired_; }
  std::uint64_t dead_resets() const { return dead_resets_; }
  std::uint64_t sandbox_filtered() const { return sandbox_filtered_; }

  void set_epoch_observer(EpochObserver obs) { observer_ = std::move(obs); }

 private:
  struct AllocationEntry {
    bool valid = false;
    std::uint16_t tag = 0;
    std::vector<PrefState> states;
  };
  struct SampleEntry {
    bool valid = false;
    std::uint16_t tag = 0;
    std::vector<std::uint8_t> issued;
    std::vector<std::uint8_t> confirmed;
    unsigned deads = 0;
    unsigned demands = 0;
  };
  // Live iff at least one issued_by bit is set.
  struct SandboxEntry {
    std::uint8_t tag = 0;
    std::uint32_t issued_by = 0;
    std::uint16_t pc_hash = 0;
  };

  std::size_t alloc_index(std::uint64_t pc) const;
  std::size_t sample_index(std::uint64_t pc) const;
  std::size_t sandbox_index(std::uint64_t block) const;
  std::uint16_t alloc_tag(std::uint64_t pc) const;
  std::uint16_t sample_tag(std::uint64_t pc) const;
  std::uint8_t sandbox_tag(std::uint64_t block) const;

  AllocationEntry& alloc_entry(std::uint64_t pc);
  SampleEntry& sample_entry(std::uint64_t pc);
  const AllocationEntry* find_alloc(std::uint64_t pc) const;
  const SampleEntry* find_sample(std::uint64_t pc) const;

  AlectoConfig cfg_;
  unsigned alloc_bits_;
  unsigned sample_bits_;
  unsigned sandbox_bits_;
  unsigned dead_max_;
  std::vector<AllocationEntry> alloc_;
  std::vector<SampleEntry> sample_;
  std::vector<SandboxEntry> sandbox_;
  std::uint64_t epochs_fired_ = 0;
  std::uint64_t dead_resets_ = 0;
  std::uint64_t sandbox_filtered_ = 0;
  EpochObserver observer_;
};

}  // namespace prefsel
