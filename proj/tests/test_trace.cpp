#include <doctest.h>

#include <map>
#include <string>

#include "prefsel/rng.hpp"
#include "prefsel/trace.hpp"

using namespace prefsel;

namespace {

std::vector<std::uint64_t> addrs_of(const std::vector<DemandRecord>& recs) {
  std::vector<std::uint64_t> out;
  for (const auto& r : recs) out.push_back(r.addr);
  return out;
}

std::vector<std::uint64_t> addrs_for_pc(const std::vector<DemandRecord>& recs, std::uint64_t pc) {
  std::vector<std::uint64_t> out;
  for (const auto& r : recs) {
    if (r.pc == pc) out.push_back(r.addr);
  }
  return out;
}

}  // namespace

TEST_CASE("parse single record") {
  const auto recs = parse_trace("0,0x400,0x1000");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0] == DemandRecord{0, 0x400, 0x1000});
}

TEST_CASE("parse skips comments and blank lines") {
  const auto recs = parse_trace("# hdr\n\n5,0x1,0x2");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].cycle == 5);
  CHECK(recs[0].pc == 1);
  CHECK(recs[0].addr == 2);
}

TEST_CASE("parse reports decreasing cycle with its line") {
  try {
    parse_trace("3,0x1,0x2\n1,0x1,0x4");
    FAIL("expected ordering error");
  } catch (const TraceError& e) {
    CHECK(e.kind() == TraceError::Kind::ordering);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse reports malformed fields") {
  for (const char* bad : {"1,0x1", "x,0x1,0x2", "1,0xZZ,0x2", "1,0x1,0x2,0x3", "1,,0x2",
                          "-1,0x1,0x2", "1,0x1,0x10000000000000000"}) {
    CAPTURE(bad);
    try {
      parse_trace(std::string("# c\n") + bad);
      FAIL("expected parse error");
    } catch (const TraceError& e) {
      CHECK(e.kind() == TraceError::Kind::malformed);
      CHECK(e.line() == 2);
    }
  }
}

TEST_CASE("parse accepts hex without prefix and CRLF") {
  const auto recs = parse_trace("7,400,1000\r\n8,0XAB,0x40\r\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0] == DemandRecord{7, 0x400, 0x1000});
  CHECK(recs[1] == DemandRecord{8, 0xab, 0x40});
}

TEST_CASE("emit then parse round-trips random traces") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DemandRecord> recs;
    std::uint64_t cycle = 0;
    const auto n = uniform_below(rng, 200);
    for (std::uint64_t i = 0; i < n; ++i) {
      cycle += uniform_below(rng, 5);
      recs.push_back({cycle, rng(), rng()});
    }
    const std::string text = emit_trace(recs);
    CHECK(parse_trace(text) == recs);
    CHECK(emit_trace(parse_trace(text)) == text);
  }
}

TEST_CASE("emit normalizes formatting") {
  const std::string messy = "# header\n  1, 0X0400 ,00001000 \n\n2,0x1,0x2\n";
  CHECK(emit_trace(parse_trace(messy)) == "1,0x400,0x1000\n2,0x1,0x2\n");
}

TEST_CASE("stride pattern arithmetic") {
  PatternSpec s;
  s.kind = PatternKind::stride;
  s.pc = 0x10;
  s.base = 0x1000;
  s.stride = 0x40;
  s.count = 3;
  const auto recs = gen_pattern(s, 1);
  CHECK(addrs_of(recs) == std::vector<std::uint64_t>{0x1000, 0x1040, 0x1080});
  CHECK(recs[1].cycle == s.gap);

  s.stride = -0x80;
  s.base = 0x2000;
  CHECK(addrs_of(gen_pattern(s, 1)) == std::vector<std::uint64_t>{0x2000, 0x1f80, 0x1f00});
}

TEST_CASE("temporal pattern repeats with its period") {
  PatternSpec s;
  s.kind = PatternKind::temporal;
  s.pc = 0x20;
  s.period = 4;
  s.count = 8;
  const auto a = addrs_of(gen_pattern(s, 3));
  for (int i = 0; i < 4; ++i) CHECK(a[i + 4] == a[i]);
}

TEST_CASE("spatial pattern walks the footprint per region") {
  PatternSpec s;
  s.kind = PatternKind::spatial;
  s.pc = 0x30;
  s.base = 0;
  s.footprint = 0b1011;
  s.region_bytes = 4096;
  s.count = 6;
  const auto a = addrs_of(gen_pattern(s, 1));
  CHECK(a == std::vector<std::uint64_t>{0, 64, 192, 4096, 4096 + 64, 4096 + 192});
}

TEST_CASE("permuted spatial footprint keeps the same offsets in a fixed order") {
  PatternSpec s;
  s.kind = PatternKind::spatial;
  s.pc = 0x30;
  s.base = 0;
  s.footprint = 0xf0f0;
  s.permute_footprint = true;
  s.count = 24;
  const auto a = addrs_of(gen_pattern(s, 5));
  std::vector<std::uint64_t> first(a.begin(), a.begin() + 8);
  for (int r = 1; r < 3; ++r) {
    for (int i = 0; i < 8; ++i) CHECK(a[r * 8 + i] == first[i] + r * 4096);
  }
  std::uint64_t seen = 0;
  for (auto x : first) seen |= std::uint64_t{1} << (x / 64);
  CHECK(seen == s.footprint);
}

TEST_CASE("stream pattern moves monotonically in its direction") {
  PatternSpec s;
  s.kind = PatternKind::stream;
  s.pc = 0x40;
  s.stride = -64;
  s.max_skip = 3;
  s.count = 500;
  const auto a = addrs_of(gen_pattern(s, 11));
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto step = static_cast<std::int64_t>(a[i - 1] - a[i]) / 64;
    CHECK(step >= 1);
    CHECK(step <= 3);
  }
}

TEST_CASE("random pattern stays in its window") {
  PatternSpec s;
  s.kind = PatternKind::random;
  s.pc = 0x50;
  s.base = 0x40000000;
  s.window_bytes = 1 << 20;
  s.count = 1000;
  for (auto a : addrs_of(gen_pattern(s, 2))) {
    CHECK(a >= s.base);
    CHECK(a < s.base + s.window_bytes);
    CHECK(a % 64 == 0);
  }
}

TEST_CASE("pattern validation") {
  PatternSpec s;
  s.pc = 1;
  s.count = 0;
  CHECK_THROWS_AS(gen_pattern(s, 1), PatternError);
  s.count = 4;
  s.stride = 0;
  CHECK_THROWS_AS(gen_pattern(s, 1), PatternError);
  s.kind = PatternKind::spatial;
  s.footprint = 0;
  CHECK_THROWS_AS(gen_pattern(s, 1), PatternError);
  CHECK_THROWS_AS(pattern_kind_from_string("zigzag"), PatternError);
}

TEST_CASE("interleave preserves every per-pc projection") {
  PatternSpec a;
  a.kind = PatternKind::stride;
  a.pc = 0xa;
  a.count = 300;
  a.stride = 128;
  PatternSpec b;
  b.kind = PatternKind::spatial;
  b.pc = 0xb;
  b.base = 0x50000000;
  b.footprint = 0x8001;
  b.count = 200;
  b.gap = 7;
  PatternSpec c;
  c.kind = PatternKind::temporal;
  c.pc = 0xc;
  c.period = 16;
  c.count = 100;
  c.gap = 2;
  const std::vector<PatternSpec> specs{a, b, c};
  for (std::uint64_t seed : {1u, 7u, 1234u}) {
    const auto merged = gen_interleave(specs, seed);
    CHECK(merged.size() == 600);
    for (const auto& s : specs) {
      CHECK(addrs_for_pc(merged, s.pc) == addrs_of(gen_pattern(s, seed)));
    }
    for (std::size_t i = 1; i < merged.size(); ++i) CHECK(merged[i].cycle > merged[i - 1].cycle);
  }
}

TEST_CASE("interleave of one spec is the solo generator") {
  PatternSpec a;
  a.kind = PatternKind::random;
  a.pc = 0x99;
  a.count = 64;
  const std::vector<PatternSpec> specs{a};
  CHECK(gen_interleave(specs, 5) == gen_pattern(a, 5));
}

TEST_CASE("interleave is deterministic and seed-sensitive") {
  PatternSpec a;
  a.pc = 1;
  a.count = 100;
  PatternSpec b;
  b.kind = PatternKind::random;
  b.pc = 2;
  b.count = 100;
  const std::vector<PatternSpec> specs{a, b};
  CHECK(emit_trace(gen_interleave(specs, 7)) == emit_trace(gen_interleave(specs, 7)));
  CHECK(trace_digest(gen_interleave(specs, 7)) != trace_digest(gen_interleave(specs, 8)));
}

TEST_CASE("interleave rejects duplicate pcs") {
  PatternSpec a;
  a.pc = 1;
  a.count = 10;
  const std::vector<PatternSpec> specs{a, a};
  CHECK_THROWS_AS(gen_interleave(specs, 1), PatternError);
}
