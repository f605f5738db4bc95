#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace prefsel {

/// Counters gathered by one simulation, before derived fractions.
struct RawCounters {
  std::string selector;
  std::uint64_t trace_digest = 0;
  std::string config_digest;
  std::uint64_t demands = 0;
  std::uint64_t shadow_misses = 0;
  std::uint64_t covered_timely = 0;
  std::uint64_t covered_untimely = 0;
  std::uint64_t uncovered = 0;
  std::vector<std::string> engine_names;
  std::vector<std::uint64_t> issued_per_engine;
  std::vector<std::uint64_t> useful_per_engine;
  std::vector<std::uint64_t> train_count_per_engine;
  std::vector<std::uint64_t> table_misses_per_engine;
  // Prefetched lines never demanded (evicted or still resident at drain).
  std::uint64_t unused_prefetches = 0;
  std::optional<std::uint64_t> alecto_storage_bits;
};

struct RunReport : RawCounters {
  double accuracy = 0.0;
  double coverage = 0.0;
  double overpredictions = 0.0;
  bool zero_issued = false;

  std::uint64_t total_issued() const;
  std::uint64_t total_useful() const;
  std::uint64_t total_train() const;
  std::uint64_t total_table_misses() const;
};

/// Derives accuracy, coverage and overpredictions. Zero issued prefetches
/// report accuracy 0 and set `zero_issued`.
RunReport finalize(const RawCounters& raw);

/// Fixed 6-decimal rendering used in CSV output.
std::string format_fraction(double value);

std::string emit_csv(std::span<const RunReport> reports);

/// Same field names as the CSV columns, plus config_digest, zero_issued and
/// unused_prefetches.
nlohmann::ordered_json to_json(const RunReport& report);
std::string emit_json(const RunReport& report);

/// Per-engine training reduction 1 - alecto/baseline (0 when the baseline
/// never trained that engine). Engines are matched by name.
std::vector<double> energy_proxy(const RunReport& alecto, const RunReport& baseline);

std::string digest_hex(std::uint64_t digest);

}  // namespace prefsel
