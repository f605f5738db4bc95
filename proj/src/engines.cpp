#include "prefsel/engines.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "prefsel/hash.hpp"

namespace prefsel {

std::string_view to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::stream: return "stream";
    case EngineKind::stride: return "stride";
    case EngineKind::spatial: return "spatial";
    case EngineKind::temporal: return "temporal";
  }
  return "?";
}

EngineKind engine_kind_from_string(std::string_view name) {
  for (auto k : {EngineKind::stream, EngineKind::stride, EngineKind::spatial,
                 EngineKind::temporal}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown prefetcher '" + std::string(name) + "'");
}

TrainOutcome Prefetcher::train(const DemandRecord& record, unsigned degree) {
  ++stats_.train_count;
  TrainOutcome out = do_train(record, degree);
  if (out.candidates.size() > degree) out.candidates.resize(degree);
  return out;
}

std::unique_ptr<Prefetcher> make_engine(EngineKind kind) {
  switch (kind) {
    case EngineKind::stream: return std::make_unique<StreamPrefetcher>();
    case EngineKind::stride: return std::make_unique<StridePrefetcher>();
    case EngineKind::spatial: return std::make_unique<SpatialPrefetcher>();
    case EngineKind::temporal: return std::make_unique<TemporalPrefetcher>();
  }
  throw std::invalid_argument("bad engine kind");
}

std::vector<std::unique_ptr<Prefetcher>> make_engines(const std::vector<EngineKind>& kinds) {
  std::vector<std::unique_ptr<Prefetcher>> out;
  out.reserve(kinds.size());
  for (auto k : kinds) out.push_back(make_engine(k));
  return out;
}

std::vector<std::unique_ptr<Prefetcher>> clone_engines(
    const std::vector<std::unique_ptr<Prefetcher>>& engines) {
  std::vector<std::unique_ptr<Prefetcher>> out;
  out.reserve(engines.size());
  for (const auto& e : engines) out.push_back(e->clone());
  return out;
}

// ---------------------------------------------------------------- stride

std::size_t StridePrefetcher::index_of(std::uint64_t pc) {
  return pc_hash(pc, log2_exact(kEntries));
}

bool StridePrefetcher::observe(Entry& e, std::uint64_t pc, std::uint64_t block) {
  if (!e.valid || e.tag != pc) {
    e = Entry{};
    e.valid = true;
    e.tag = pc;
    e.last_block = block;
    return false;
  }
  const auto delta = static_cast<std::int64_t>(block - e.last_block);
  if (delta == 0) return true;
  if (delta == e.stride) {
    e.confidence = std::min(e.confidence + 1, kConfidenceMax);
  } else {
    e.has_frontier = false;
    if (e.confidence >= kConfidenceToPredict) {
      --e.confidence;
    } else {
      e.stride = delta;
      e.confidence = 1;
    }
  }
  e.last_block = block;
  return true;
}

std::vector<std::uint64_t> StridePrefetcher::predict(Entry& e, std::uint64_t block,
                                                     unsigned degree) {
  std::vector<std::uint64_t> out;
  if (e.confidence < kConfidenceToPredict || e.stride == 0 || degree == 0) return out;
  // Lines up to the frontier were requested by an earlier training event.
  std::int64_t covered = 0;
  if (e.has_frontier) {
    covered = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(e.frontier - block) / e.stride);
  }
  for (unsigned k = 1; k <= degree; ++k) {
    if (static_cast<std::int64_t>(k) <= covered) continue;
    out.push_back(block + static_cast<std::uint64_t>(e.stride * static_cast<std::int64_t>(k)));
  }
  if (static_cast<std::int64_t>(degree) > covered) {
    e.frontier = block + static_cast<std::uint64_t>(e.stride * static_cast<std::int64_t>(degree));
    e.has_frontier = true;
  }
  return out;
}

TrainOutcome StridePrefetcher::do_train(const DemandRecord& record, unsigned degree) {
  const std::uint64_t block = block_of(record.addr);
  Entry& e = table_[index_of(record.pc)];
  TrainOutcome out;
  out.table_hit = observe(e, record.pc, block);
  note_lookup(out.table_hit);
  if (out.table_hit) out.candidates = predict(e, block, degree);
  return out;
}

bool StridePrefetcher::has_prediction(const DemandRecord& record) const {
  const std::uint64_t block = block_of(record.addr);
  Entry e = table_[index_of(record.pc)];
  if (!observe(e, record.pc, block)) return false;
  return !predict(e, block, kProbeDegree).empty();
}

// ---------------------------------------------------------------- stream

bool StreamPrefetcher::observe(Entry& e, std::uint64_t block) {
  const std::uint64_t region = block / kRegionLines;
  const auto offset = static_cast<unsigned>(block % kRegionLines);
  if (!e.valid || e.region != region) {
    e = Entry{true, region, offset, 0, 1};
    return false;
  }
  if (offset == e.last_offset) return true;
  const int dir = offset > e.last_offset ? 1 : -1;
  if (dir == e.direction) {
    e.count = std::min(e.count + 1, kRegionLines);
  } else {
    e.direction = dir;
    e.count = 2;
  }
  e.last_offset = offset;
  return true;
}

namespace {

std::vector<std::uint64_t> run_ahead(std::uint64_t block, int dir, unsigned degree) {
  std::vector<std::uint64_t> out;
  for (unsigned k = 1; k <= degree; ++k) {
    if (dir < 0 && block < k) break;
    out.push_back(dir > 0 ? block + k : block - k);
  }
  return out;
}

}  // namespace

TrainOutcome StreamPrefetcher::do_train(const DemandRecord& record, unsigned degree) {
  const std::uint64_t block = block_of(record.addr);
  Entry& e = table_[pc_hash(block / kRegionLines, log2_exact(kEntries))];
  TrainOutcome out;
  out.table_hit = observe(e, block);
  note_lookup(out.table_hit);
  if (e.count >= kTrainThreshold && e.direction != 0) {
    out.candidates = run_ahead(block, e.direction, degree);
  }
  return out;
}

bool StreamPrefetcher::has_prediction(const DemandRecord& record) const {
  const std::uint64_t block = block_of(record.addr);
  Entry e = table_[pc_hash(block / kRegionLines, log2_exact(kEntries))];
  observe(e, block);
  return e.count >= kTrainThreshold && e.direction != 0 &&
         !run_ahead(block, e.direction, kProbeDegree).empty();
}

// ---------------------------------------------------------------- spatial

std::size_t SpatialPrefetcher::at_index(std::uint64_t region) {
  return pc_hash(region, log2_exact(kAccumulationEntries));
}

std::size_t SpatialPrefetcher::pht_index(std::uint64_t key) {
  return pc_hash(key, log2_exact(kPatternEntries));
}

std::uint64_t SpatialPrefetcher::anchor(std::uint64_t bitmap, unsigned offset) {
  return std::rotr(bitmap, static_cast<int>(offset));
}

std::optional<std::uint64_t> SpatialPrefetcher::lookup_after_eviction(std::uint64_t pc,
                                                                      std::uint64_t region,
                                                                      unsigned offset) const {
  const AccumulationEntry& a = at_[at_index(region)];
  const std::uint64_t key = pht_key(pc, offset);
  if (a.valid) {
    const std::uint64_t evicted_key = pht_key(a.trigger_pc, a.trigger_offset);
    if (pht_index(evicted_key) == pht_index(key)) {
      if (evicted_key == key) return anchor(a.bitmap, a.trigger_offset);
      return std::nullopt;
    }
  }
  const PatternEntry& p = pht_[pht_index(key)];
  if (p.valid && p.key == key) return p.pattern;
  return std::nullopt;
}

namespace {

std::vector<std::uint64_t> replay(std::uint64_t region_base, std::uint64_t pattern,
                                  unsigned offset, unsigned degree) {
  std::uint64_t bits = std::rotl(pattern, static_cast<int>(offset)) & ~(std::uint64_t{1} << offset);
  std::vector<unsigned> lines;
  while (bits) {
    lines.push_back(static_cast<unsigned>(std::countr_zero(bits)));
    bits &= bits - 1;
  }
  std::stable_sort(lines.begin(), lines.end(), [offset](unsigned a, unsigned b) {
    const unsigned da = a > offset ? a - offset : offset - a;
    const unsigned db = b > offset ? b - offset : offset - b;
    return da < db;
  });
  if (lines.size() > degree) lines.resize(degree);
  std::vector<std::uint64_t> out;
  out.reserve(lines.size());
  for (unsigned l : lines) out.push_back(region_base + l);
  return out;
}

}  // namespace

TrainOutcome SpatialPrefetcher::do_train(const DemandRecord& record, unsigned degree) {
  const std::uint64_t block = block_of(record.addr);
  const std::uint64_t region = block / kRegionLines;
  const auto offset = static_cast<unsigned>(block % kRegionLines);

  TrainOutcome out;
  AccumulationEntry& a = at_[at_index(region)];
  out.table_hit = a.valid && a.region == region;
  note_lookup(out.table_hit);
  if (out.table_hit) {
    a.bitmap |= std::uint64_t{1} << offset;
    // The PHT entry of an active region holds at least its footprint so far;
    // eviction later stores the exact footprint.
    const std::uint64_t key = pht_key(a.trigger_pc, a.trigger_offset);
    PatternEntry& p = pht_[pht_index(key)];
    const std::uint64_t seen = anchor(a.bitmap, a.trigger_offset);
    p = {true, key, p.valid && p.key == key ? p.pattern | seen : seen};
    return out;
  }

  if (a.valid) {
    const std::uint64_t evicted_key = pht_key(a.trigger_pc, a.trigger_offset);
    pht_[pht_index(evicted_key)] = {true, evicted_key, anchor(a.bitmap, a.trigger_offset)};
  }
  a = {true, region, record.pc, offset, std::uint64_t{1} << offset};

  const std::uint64_t key = pht_key(record.pc, offset);
  const PatternEntry& p = pht_[pht_index(key)];
  const bool pattern_hit = p.valid && p.key == key;
  note_lookup(pattern_hit);
  if (pattern_hit) out.candidates = replay(region * kRegionLines, p.pattern, offset, degree);
  return out;
}

bool SpatialPrefetcher::has_prediction(const DemandRecord& record) const {
  const std::uint64_t block = block_of(record.addr);
  const std::uint64_t region = block / kRegionLines;
  const auto offset = static_cast<unsigned>(block % kRegionLines);
  const AccumulationEntry& a = at_[at_index(region)];
  if (a.valid && a.region == region) return false;
  const auto pattern = lookup_after_eviction(record.pc, region, offset);
  return pattern && (std::rotl(*pattern, static_cast<int>(offset)) &
                     ~(std::uint64_t{1} << offset)) != 0;
}

// ---------------------------------------------------------------- temporal

TemporalPrefetcher::TemporalPrefetcher(std::size_t correlation_entries)
    : index_bits_(log2_exact(correlation_entries)), correlation_(correlation_entries) {
  if (!is_pow2(correlation_entries)) {
    throw std::invalid_argument("correlation table size must be a power of two");
  }
}

std::size_t TemporalPrefetcher::corr_index(std::uint64_t block) const {
  return pc_hash(block, index_bits_);
}

TrainOutcome TemporalPrefetcher::do_train(const DemandRecord& record, unsigned degree) {
  const std::uint64_t block = block_of(record.addr);
  HistoryEntry& h = history_[pc_hash(record.pc, log2_exact(kHistoryEntries))];
  if (h.valid && h.pc == record.pc && h.last_block != block) {
    correlation_[corr_index(h.last_block)] = {true, h.last_block, block};
  }
  h = {true, record.pc, block};

  TrainOutcome out;
  const CorrelationEntry& c = correlation_[corr_index(block)];
  out.table_hit = c.valid && c.block == block;
  note_lookup(out.table_hit);
  if (out.table_hit && c.next != block && std::min(degree, kMaxDegree) > 0) {
    out.candidates.push_back(c.next);
  }
  return out;
}

bool TemporalPrefetcher::has_prediction(const DemandRecord& record) const {
  const std::uint64_t block = block_of(record.addr);
  const HistoryEntry& h = history_[pc_hash(record.pc, log2_exact(kHistoryEntries))];
  if (h.valid && h.pc == record.pc && h.last_block != block &&
      corr_index(h.last_block) == corr_index(block)) {
    return false;  // the pending write displaces this block's own entry
  }
  const CorrelationEntry& c = correlation_[corr_index(block)];
  return c.valid && c.block == block && c.next != block;
}

}  // namespace prefsel
