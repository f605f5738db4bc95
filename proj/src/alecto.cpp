#include "prefsel/alecto.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "prefsel/hash.hpp"

namespace prefsel {

void AlectoConfig::validate() const {
  if (prefetchers == 0 || prefetchers > 32) throw ConfigError("alecto needs 1..32 prefetchers");
  if (!(deficiency_boundary >= 0.0 && deficiency_boundary < proficiency_boundary &&
        proficiency_boundary <= 1.0)) {
    throw ConfigError("alecto boundaries must satisfy 0 <= DB < PB <= 1");
  }
  if (block_epochs < 1) throw ConfigError("alecto N must be >= 1");
  if (max_aggressive > 100 || block_epochs > 100) throw ConfigError("alecto M/N out of range");
  if (epoch_demands == 0 || epoch_demands >= dead_threshold) {
    throw ConfigError("alecto needs 0 < epoch_demands < dead_threshold");
  }
  if (epoch_demands > (1u << kDemandBits) - 1 || dead_threshold > (1u << kDeadBits) - 1) {
    throw ConfigError("alecto epoch/dead thresholds exceed counter width");
  }
  if (conservative_degree == 0) throw ConfigError("alecto c must be >= 1");
  if (temporal_index && *temporal_index >= prefetchers) {
    throw ConfigError("alecto temporal_index out of range");
  }
  for (auto n : {alloc_entries, sample_entries, sandbox_entries}) {
    if (!is_pow2(n)) throw ConfigError("alecto table sizes must be powers of two");
  }
}

unsigned PrefState::encode(unsigned max_aggressive, unsigned block_epochs) const {
  switch (kind_) {
    case Kind::UI: return 0;
    case Kind::IA: return 1 + static_cast<unsigned>(level_);
    case Kind::IB: return static_cast<unsigned>(2 + static_cast<int>(max_aggressive) +
                                                static_cast<int>(block_epochs) + level_);
  }
  return 0;
}

PrefState PrefState::decode(unsigned code, unsigned max_aggressive, unsigned block_epochs) {
  if (code == 0) return ui();
  if (code <= max_aggressive + 1) return ia(static_cast<int>(code) - 1);
  if (code <= max_aggressive + block_epochs + 2) {
    return ib(static_cast<int>(code) - 2 - static_cast<int>(max_aggressive) -
              static_cast<int>(block_epochs));
  }
  throw std::out_of_range("state code out of range");
}

std::string PrefState::str() const {
  switch (kind_) {
    case Kind::UI: return "UI";
    case Kind::IA: return "IA_" + std::to_string(level_);
    case Kind::IB: return "IB_" + std::to_string(level_);
  }
  return "?";
}

unsigned state_bits(unsigned max_aggressive, unsigned block_epochs) {
  return static_cast<unsigned>(std::bit_width(max_aggressive + block_epochs + 2u));
}

std::vector<PrefState> epoch_update(std::span<const PrefState> states,
                                    std::span<const std::optional<double>> accuracy,
                                    const AlectoConfig& cfg) {
  if (states.size() != accuracy.size()) {
    throw std::invalid_argument("epoch_update: states/accuracy size mismatch");
  }
  const double pb = cfg.proficiency_boundary;
  const double db = cfg.deficiency_boundary;
  const int max_m = static_cast<int>(cfg.max_aggressive);

  std::vector<PrefState> next(states.begin(), states.end());
  std::vector<std::size_t> candidates;

  for (std::size_t i = 0; i < states.size(); ++i) {
    const PrefState s = states[i];
    const auto& acc = accuracy[i];
    switch (s.kind()) {
      case PrefState::Kind::IB:
        if (s.level() < 0) next[i] = PrefState::ib(s.level() + 1);
        break;
      case PrefState::Kind::IA:
        if (!acc) break;
        if (*acc > pb) {
          next[i] = PrefState::ia(std::min(s.level() + 1, max_m));
        } else if (*acc < db) {
          next[i] = s.level() > 0 ? PrefState::ia(s.level() - 1) : PrefState::ui();
        } else if (s.level() == 0) {
          next[i] = PrefState::ui();
        }
        break;
      case PrefState::Kind::UI:
        if (!acc) break;
        if (*acc < db) {
          next[i] = PrefState::ib(-static_cast<int>(cfg.block_epochs));
        } else if (*acc > pb) {
          candidates.push_back(i);
        }
        break;
    }
  }

  if (!candidates.empty()) {
    const bool demote_temporal =
        candidates.size() >= 2 && cfg.temporal_index &&
        std::find(candidates.begin(), candidates.end(), *cfg.temporal_index) != candidates.end();
    for (std::size_t i : candidates) {
      next[i] = demote_temporal && i == *cfg.temporal_index ? PrefState::ib(0) : PrefState::ia(0);
    }
    for (auto& s : next) {
      if (s.is_ui()) s = PrefState::ib(0);
    }
  }

  if (std::none_of(next.begin(), next.end(), [](PrefState s) { return s.is_ia(); })) {
    for (auto& s : next) {
      if (s == PrefState::ib(0)) s = PrefState::ui();
    }
  }
  return next;
}

PrefetcherDirective directive_for(PrefState state, const AlectoConfig& cfg) {
  PrefetcherDirective d;
  switch (state.kind()) {
    case PrefState::Kind::UI:
      d.train = true;
      d.degree = cfg.conservative_degree;
      break;
    case PrefState::Kind::IA:
      d.train = true;
      d.degree = cfg.fixed_degree_mode
                     ? cfg.fixed_ia_degree
                     : cfg.conservative_degree + static_cast<unsigned>(state.level()) + 1;
      break;
    case PrefState::Kind::IB:
      return d;
  }
  d.l1_quota = std::min(d.degree, cfg.conservative_degree);
  d.l2_quota = d.degree - d.l1_quota;
  return d;
}

namespace {

// Default geometry: 64-entry Allocation and Sample tables, 512-entry Sandbox.
StorageBits count_bits(std::uint64_t p, std::uint64_t alloc_entries, std::uint64_t sample_entries,
                       std::uint64_t sandbox_entries, unsigned state_width, unsigned dead_width,
                       unsigned sandbox_extra) {
  StorageBits b;
  b.allocation = alloc_entries * (1 + kAllocTagBits + state_width * p);
  b.sample = sample_entries *
             (1 + kSampleTagBits + 2 * kCounterBits * p + dead_width + kDemandBits);
  b.sandbox = sandbox_entries * (kSandboxTagBits + p + sandbox_extra);
  b.total = b.allocation + b.sample + b.sandbox;
  b.total_excluding_sandbox = b.allocation + b.sample;
  return b;
}

}  // namespace

StorageBits storage_bits(std::uint64_t prefetchers) {
  if (prefetchers == 0) throw std::invalid_argument("storage_bits needs P >= 1");
  // 4-bit states, 7-bit dead counter, no stored pc hash in the Sandbox.
  return count_bits(prefetchers, 64, 64, 512, 4, 7, 0);
}

StorageBits implementation_storage_bits(const AlectoConfig& cfg) {
  return count_bits(cfg.prefetchers, cfg.alloc_entries, cfg.sample_entries, cfg.sandbox_entries,
                    state_bits(cfg.max_aggressive, cfg.block_epochs), kDeadBits,
                    kSandboxPcHashBits);
}

Alecto::Alecto(const AlectoConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  alloc_bits_ = log2_exact(cfg_.alloc_entries);
  sample_bits_ = log2_exact(cfg_.sample_entries);
  sandbox_bits_ = log2_exact(cfg_.sandbox_entries);
  dead_max_ = (1u << kDeadBits) - 1;
  alloc_.resize(cfg_.alloc_entries);
  sample_.resize(cfg_.sample_entries);
  sandbox_.resize(cfg_.sandbox_entries);
}

std::size_t Alecto::alloc_index(std::uint64_t pc) const { return pc_hash(pc, alloc_bits_); }
std::size_t Alecto::sample_index(std::uint64_t pc) const { return pc_hash(pc, sample_bits_); }
std::size_t Alecto::sandbox_index(std::uint64_t block) const {
  return block & (cfg_.sandbox_entries - 1);
}
std::uint16_t Alecto::alloc_tag(std::uint64_t pc) const {
  return static_cast<std::uint16_t>(pc_hash(pc >> alloc_bits_, kAllocTagBits));
}
std::uint16_t Alecto::sample_tag(std::uint64_t pc) const {
  return static_cast<std::uint16_t>(pc_hash(pc >> sample_bits_, kSampleTagBits));
}
std::uint8_t Alecto::sandbox_tag(std::uint64_t block) const {
  return static_cast<std::uint8_t>(pc_hash(block >> sandbox_bits_, kSandboxTagBits));
}

Alecto::AllocationEntry& Alecto::alloc_entry(std::uint64_t pc) {
  AllocationEntry& e = alloc_[alloc_index(pc)];
  const auto tag = alloc_tag(pc);
  if (!e.valid || e.tag != tag) {
    e.valid = true;
    e.tag = tag;
    e.states.assign(cfg_.prefetchers, PrefState::ui());
  }
  return e;
}

Alecto::SampleEntry& Alecto::sample_entry(std::uint64_t pc) {
  SampleEntry& e = sample_[sample_index(pc)];
  const auto tag = sample_tag(pc);
  if (!e.valid || e.tag != tag) {
    e = SampleEntry{};
    e.valid = true;
    e.tag = tag;
    e.issued.assign(cfg_.prefetchers, 0);
    e.confirmed.assign(cfg_.prefetchers, 0);
  }
  return e;
}

const Alecto::AllocationEntry* Alecto::find_alloc(std::uint64_t pc) const {
  const AllocationEntry& e = alloc_[alloc_index(pc)];
  return e.valid && e.tag == alloc_tag(pc) ? &e : nullptr;
}

const Alecto::SampleEntry* Alecto::find_sample(std::uint64_t pc) const {
  const SampleEntry& e = sample_[sample_index(pc)];
  return e.valid && e.tag == sample_tag(pc) ? &e : nullptr;
}

namespace {

void saturating_add(std::uint8_t& counter, unsigned amount) {
  counter = static_cast<std::uint8_t>(std::min<unsigned>(counter + amount, 255));
}

}  // namespace

bool Alecto::on_demand_observed(const DemandRecord& record) {
  SampleEntry& sample = sample_entry(record.pc);

  const std::uint64_t block = block_of(record.addr);
  const SandboxEntry& sb = sandbox_[sandbox_index(block)];
  if (sb.issued_by != 0 && sb.tag == sandbox_tag(block) &&
      sb.pc_hash == pc_hash(record.pc, kSandboxPcHashBits)) {
    for (std::size_t i = 0; i < cfg_.prefetchers; ++i) {
      if ((sb.issued_by >> i) & 1) saturating_add(sample.confirmed[i], 1);
    }
  }

  sample.demands = std::min(sample.demands + 1, (1u << kDemandBits) - 1);
  if (sample.demands < cfg_.epoch_demands) return false;

  AllocationEntry& alloc = alloc_entry(record.pc);
  std::vector<std::optional<double>> accuracy(cfg_.prefetchers);
  for (std::size_t i = 0; i < cfg_.prefetchers; ++i) {
    if (sample.issued[i] >= cfg_.min_issued_for_judgement) {
      accuracy[i] = std::min(1.0, static_cast<double>(sample.confirmed[i]) / sample.issued[i]);
    }
  }
  alloc.states = epoch_update(alloc.states, accuracy, cfg_);
  sample.demands = 0;
  std::fill(sample.issued.begin(), sample.issued.end(), 0);
  std::fill(sample.confirmed.begin(), sample.confirmed.end(), 0);
  ++epochs_fired_;
  if (observer_) observer_(record.pc, alloc.states);
  return true;
}

AllocationDirective Alecto::allocate(const DemandRecord& record) {
  const AllocationEntry& e = alloc_entry(record.pc);
  AllocationDirective d;
  d.per_prefetcher.reserve(cfg_.prefetchers);
  for (const PrefState s : e.states) d.per_prefetcher.push_back(directive_for(s, cfg_));
  return d;
}

std::vector<RoutedPrefetch> Alecto::on_prefetch_issued(std::uint64_t pc, std::size_t prefetcher,
                                                       std::span<const std::uint64_t> blocks,
                                                       unsigned l1_quota) {
  std::vector<RoutedPrefetch> kept;
  if (blocks.empty()) return kept;
  SampleEntry& sample = sample_entry(pc);
  saturating_add(sample.issued[prefetcher], static_cast<unsigned>(blocks.size()));

  const std::uint32_t bit = std::uint32_t{1} << prefetcher;
  const auto hash = static_cast<std::uint16_t>(pc_hash(pc, kSandboxPcHashBits));
  for (std::size_t pos = 0; pos < blocks.size(); ++pos) {
    const std::uint64_t block = blocks[pos];
    SandboxEntry& sb = sandbox_[sandbox_index(block)];
    const auto tag = sandbox_tag(block);
    if (sb.issued_by != 0 && sb.tag == tag) {
      sb.issued_by |= bit;
      ++sandbox_filtered_;
      continue;
    }
    sb = {tag, bit, hash};
    kept.push_back({block, pos < l1_quota ? CacheLevel::L1 : CacheLevel::L2});
  }
  return kept;
}

void Alecto::end_round(std::uint64_t pc, std::size_t downstream) {
  AllocationEntry& alloc = alloc_entry(pc);
  SampleEntry& sample = sample_entry(pc);
  const bool any_ia =
      std::any_of(alloc.states.begin(), alloc.states.end(), [](PrefState s) { return s.is_ia(); });
  if (any_ia && downstream == 0) {
    sample.deads = std::min(sample.deads + 1, dead_max_);
  } else if (sample.deads > 0) {
    --sample.deads;
  }
  if (sample.deads >= cfg_.dead_threshold) {
    alloc.states.assign(cfg_.prefetchers, PrefState::ui());
    sample.deads = 0;
    ++dead_resets_;
  }
}

std::optional<std::vector<PrefState>> Alecto::states_for(std::uint64_t pc) const {
  if (const auto* e = find_alloc(pc)) return e->states;
  return std::nullopt;
}

std::optional<Alecto::SampleView> Alecto::sample_for(std::uint64_t pc) const {
  const auto* e = find_sample(pc);
  if (!e) return std::nullopt;
  SampleView v;
  v.issued.assign(e->issued.begin(), e->issued.end());
  v.confirmed.assign(e->confirmed.begin(), e->confirmed.end());
  v.deads = e->deads;
  v.demands = e->demands;
  return v;
}

bool Alecto::sandbox_holds(std::uint64_t block) const {
  const SandboxEntry& sb = sandbox_[sandbox_index(block)];
  return sb.issued_by != 0 && sb.tag == sandbox_tag(block);
}

}  // namespace prefsel
