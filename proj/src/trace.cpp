#include "prefsel/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "prefsel/hash.hpp"
#include "prefsel/rng.hpp"

namespace prefsel {

TraceError::TraceError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      kind_(kind),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_u64(std::string_view field, int base, std::uint64_t& out) {
  field = trim(field);
  if (base == 16 && field.size() > 2 && field[0] == '0' && (field[1] == 'x' || field[1] == 'X')) {
    field.remove_prefix(2);
  }
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out, base);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

}  // namespace

std::vector<DemandRecord> parse_trace(std::string_view text) {
  std::vector<DemandRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::string_view fields[3];
    std::size_t n = 0;
    for (;;) {
      const auto comma = line.find(',');
      if (n == 3) {
        n = 4;
        break;
      }
      fields[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (n != 3) {
      throw TraceError(TraceError::Kind::malformed, line_no, "expected 3 comma-separated fields");
    }

    DemandRecord r;
    if (!parse_u64(fields[0], 10, r.cycle)) {
      throw TraceError(TraceError::Kind::malformed, line_no, "bad cycle field");
    }
    if (!parse_u64(fields[1], 16, r.pc)) {
      throw TraceError(TraceError::Kind::malformed, line_no, "bad pc field");
    }
    if (!parse_u64(fields[2], 16, r.addr)) {
      throw TraceError(TraceError::Kind::malformed, line_no, "bad address field");
    }
    if (!records.empty() && r.cycle < records.back().cycle) {
      throw TraceError(TraceError::Kind::ordering, line_no, "cycle decreases");
    }
    records.push_back(r);
  }
  return records;
}

std::string emit_trace(std::span<const DemandRecord> records) {
  std::string out;
  out.reserve(records.size() * 32);
  char buf[64];
  for (const auto& r : records) {
    const int len = std::snprintf(buf, sizeof buf, "%llu,0x%llx,0x%llx\n",
                                  static_cast<unsigned long long>(r.cycle),
                                  static_cast<unsigned long long>(r.pc),
                                  static_cast<unsigned long long>(r.addr));
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

std::vector<DemandRecord> read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError(TraceError::Kind::io, 0, "cannot open trace " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

void write_trace_file(const std::filesystem::path& path, std::span<const DemandRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError(TraceError::Kind::io, 0, "cannot write trace " + path.string());
  out << emit_trace(records);
}

std::uint64_t trace_digest(std::span<const DemandRecord> records) {
  const std::string text = emit_trace(records);
  return fnv1a(text.data(), text.size());
}

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::stride: return "stride";
    case PatternKind::stream: return "stream";
    case PatternKind::spatial: return "spatial";
    case PatternKind::temporal: return "temporal";
    case PatternKind::random: return "random";
  }
  return "?";
}

PatternKind pattern_kind_from_string(std::string_view name) {
  for (auto k : {PatternKind::stride, PatternKind::stream, PatternKind::spatial,
                 PatternKind::temporal, PatternKind::random}) {
    if (to_string(k) == name) return k;
  }
  throw PatternError("unknown pattern kind '" + std::string(name) + "'");
}

void validate(const PatternSpec& spec) {
  if (spec.count == 0) throw PatternError("pattern count must be > 0");
  switch (spec.kind) {
    case PatternKind::stride:
      if (spec.stride == 0) throw PatternError("stride pattern needs a nonzero stride");
      break;
    case PatternKind::stream:
      if (spec.stride == 0) throw PatternError("stream pattern needs a direction (nonzero stride)");
      if (spec.max_skip == 0) throw PatternError("stream max_skip must be >= 1");
      break;
    case PatternKind::spatial: {
      if (spec.footprint == 0) throw PatternError("spatial pattern needs a non-empty footprint");
      if (spec.region_bytes % kLineBytes != 0 || spec.region_bytes == 0 ||
          spec.region_bytes / kLineBytes > 64) {
        throw PatternError("spatial region must be 1..64 whole lines");
      }
      const std::uint64_t lines = spec.region_bytes / kLineBytes;
      if (lines < 64 && (spec.footprint >> lines) != 0) {
        throw PatternError("footprint has bits beyond the region");
      }
      break;
    }
    case PatternKind::temporal:
      if (spec.period == 0) throw PatternError("temporal pattern needs period > 0");
      [[fallthrough]];
    case PatternKind::random:
      if (spec.window_bytes < kLineBytes) throw PatternError("address window smaller than a line");
      break;
  }
}

namespace {

std::vector<unsigned> footprint_order(const PatternSpec& spec, Rng& rng) {
  std::vector<unsigned> offsets;
  for (unsigned bit = 0; bit < 64; ++bit) {
    if ((spec.footprint >> bit) & 1) offsets.push_back(bit);
  }
  if (spec.permute_footprint) {
    for (std::size_t i = offsets.size(); i > 1; --i) {
      std::swap(offsets[i - 1], offsets[uniform_below(rng, i)]);
    }
  }
  return offsets;
}

}  // namespace

std::vector<DemandRecord> gen_pattern(const PatternSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(derive_seed(seed, seed_stream::kPattern));
  std::vector<DemandRecord> out;
  out.reserve(spec.count);
  auto push = [&](std::uint64_t addr) {
    out.push_back({out.size() * spec.gap, spec.pc, addr});
  };

  switch (spec.kind) {
    case PatternKind::stride:
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        push(spec.base + static_cast<std::uint64_t>(static_cast<std::int64_t>(i) * spec.stride));
      }
      break;
    case PatternKind::stream: {
      const std::int64_t dir = spec.stride > 0 ? 1 : -1;
      std::uint64_t addr = spec.base;
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        push(addr);
        const std::uint64_t skip = 1 + uniform_below(rng, spec.max_skip);
        addr += static_cast<std::uint64_t>(dir * static_cast<std::int64_t>(skip * kLineBytes));
      }
      break;
    }
    case PatternKind::spatial: {
      const auto offsets = footprint_order(spec, rng);
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        const std::uint64_t region = i / offsets.size();
        push(spec.base + region * spec.region_bytes + offsets[i % offsets.size()] * kLineBytes);
      }
      break;
    }
    case PatternKind::temporal: {
      const std::uint64_t lines = spec.window_bytes / kLineBytes;
      std::vector<std::uint64_t> seq(spec.period);
      for (auto& a : seq) a = spec.base + uniform_below(rng, lines) * kLineBytes;
      for (std::uint64_t i = 0; i < spec.count; ++i) push(seq[i % spec.period]);
      break;
    }
    case PatternKind::random: {
      const std::uint64_t lines = spec.window_bytes / kLineBytes;
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        push(spec.base + uniform_below(rng, lines) * kLineBytes);
      }
      break;
    }
  }
  return out;
}

std::vector<DemandRecord> gen_interleave(std::span<const PatternSpec> specs, std::uint64_t seed) {
  if (specs.empty()) throw PatternError("interleave needs at least one pattern");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      if (specs[i].pc == specs[j].pc) throw PatternError("duplicate pc across interleaved patterns");
    }
  }
  for (const auto& s : specs) {
    if (s.gap == 0 && specs.size() > 1) throw PatternError("interleaved patterns need gap >= 1");
  }

  std::vector<std::vector<DemandRecord>> streams;
  streams.reserve(specs.size());
  for (const auto& s : specs) streams.push_back(gen_pattern(s, seed));

  std::vector<std::size_t> next(specs.size(), 0);
  std::uint64_t remaining = 0;
  for (const auto& s : streams) remaining += s.size();

  Rng rng(derive_seed(seed, seed_stream::kInterleave));
  std::vector<DemandRecord> out;
  out.reserve(remaining);
  std::uint64_t cycle = 0;
  while (remaining > 0) {
    // Weight each stream by its remaining length so all finish together.
    std::uint64_t pick = uniform_below(rng, remaining);
    std::size_t j = 0;
    for (; j < streams.size(); ++j) {
      const std::uint64_t left = streams[j].size() - next[j];
      if (pick < left) break;
      pick -= left;
    }
    DemandRecord r = streams[j][next[j]++];
    if (!out.empty()) cycle += specs[j].gap;
    r.cycle = cycle;
    out.push_back(r);
    --remaining;
  }
  return out;
}

}  // namespace prefsel
