#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefsel/alecto.hpp"
#include "prefsel/baselines.hpp"
#include "prefsel/cache.hpp"
#include "prefsel/metrics.hpp"
#include "prefsel/prefetcher.hpp"
#include "prefsel/selectors.hpp"
#include "prefsel/trace.hpp"

namespace prefsel {

enum class SelectorKind { alecto, alecto_fixed_degree, ipcp, dol, bandit3, bandit6 };

std::string_view to_string(SelectorKind kind);
/// Throws ConfigError for unknown names.
SelectorKind selector_kind_from_string(std::string_view name);

struct TraceSource {
  std::optional<std::filesystem::path> file;
  std::vector<PatternSpec> patterns;
};

struct ExperimentConfig {
  std::vector<SelectorKind> selectors{SelectorKind::alecto};
  std::vector<EngineKind> engines{EngineKind::stream, EngineKind::stride, EngineKind::spatial};
  HierarchyConfig cache;
  AlectoConfig alecto;
  BanditConfig bandit;
  unsigned baseline_degree = 3;
  std::uint64_t warmup_records = 0;
  TraceSource trace;
  std::uint64_t seed = 1;

  /// Derives the engine-dependent Alecto fields and checks every block.
  void finalize();
  /// Stable text rendering of every field that influences a run.
  std::string canonical() const;
  std::string digest() const;
};

/// Parses the INI-style config format; relative trace paths resolve against
/// `base_dir`. Throws ConfigError (or PatternError for bad pattern sections).
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Pattern sections only, for trace generation.
std::vector<PatternSpec> parse_patterns(std::string_view text);

/// Reads the trace file, or generates the configured patterns with `seed`.
std::vector<DemandRecord> materialize_trace(const ExperimentConfig& cfg);

std::unique_ptr<Selector> make_selector(SelectorKind kind, const ExperimentConfig& cfg);

RunReport run_experiment(const ExperimentConfig& cfg, SelectorKind kind,
                         std::span<const DemandRecord> trace);

}  // namespace prefsel
