#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prefsel {

inline constexpr std::uint64_t kLineBytes = 64;

constexpr std::uint64_t block_of(std::uint64_t addr) { return addr / kLineBytes; }

/// One demand access as seen by the L1D: arrival cycle, instruction address,
/// byte address.
struct DemandRecord {
  std::uint64_t cycle = 0;
  std::uint64_t pc = 0;
  std::uint64_t addr = 0;

  friend bool operator==(const DemandRecord&, const DemandRecord&) = default;
};

class TraceError : public std::runtime_error {
 public:
  enum class Kind { malformed, ordering, io };

  TraceError(Kind kind, std::size_t line, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Parses `cycle,0xPC,0xADDR` lines. '#' comments and blank lines are skipped;
/// cycles must be non-decreasing.
std::vector<DemandRecord> parse_trace(std::string_view text);

/// Canonical text form, one record per LF-terminated line.
std::string emit_trace(std::span<const DemandRecord> records);

std::vector<DemandRecord> read_trace_file(const std::filesystem::path& path);
void write_trace_file(const std::filesystem::path& path,
                      std::span<const DemandRecord> records);

/// Digest of the canonical text form.
std::uint64_t trace_digest(std::span<const DemandRecord> records);

enum class PatternKind { stride, stream, spatial, temporal, random };

std::string_view to_string(PatternKind kind);
PatternKind pattern_kind_from_string(std::string_view name);

/// Synthetic pattern description. Only the fields relevant to `kind` are read.
struct PatternSpec {
  PatternKind kind = PatternKind::stride;
  std::uint64_t pc = 0;
  std::uint64_t base = 0x10000000;
  // stride: signed byte step. stream: sign gives the direction.
  std::int64_t stride = 64;
  // stream: each step advances a seeded 1..max_skip lines.
  std::uint64_t max_skip = 1;
  // spatial: region size and the set of line offsets touched in every region.
  std::uint64_t region_bytes = 4096;
  std::uint64_t footprint = 0;
  // spatial: visit footprint lines in one fixed seeded order instead of
  // ascending; the first line in that order is the region trigger.
  bool permute_footprint = false;
  // temporal: length of the repeated address sequence.
  std::uint64_t period = 0;
  // temporal/random: size of the address window above `base`.
  std::uint64_t window_bytes = std::uint64_t{1} << 24;
  std::uint64_t count = 0;
  std::uint64_t gap = 4;
};

class PatternError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const PatternSpec& spec);

/// Deterministic for a fixed (spec, seed). Record i sits at cycle i * gap.
std::vector<DemandRecord> gen_pattern(const PatternSpec& spec, std::uint64_t seed);

/// Seeded weighted round-robin merge of the per-spec streams. Each spec is
/// generated with `seed`, so projecting the output onto one pc reproduces
/// gen_pattern(spec, seed) addresses in order. Cycles advance by the gap of
/// the spec that produced each record.
std::vector<DemandRecord> gen_interleave(std::span<const PatternSpec> specs,
                                         std::uint64_t seed);

}  // namespace prefsel
