#include <doctest.h>

#include <filesystem>

#include "prefsel/experiment.hpp"

using namespace prefsel;

namespace {

const char* kMinimal = R"(
[pattern.a]
kind = stride
pc = 0x400
count = 10
)";

}  // namespace

TEST_CASE("defaults reproduce the reference constants") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.alecto.prefetchers == 3);
  CHECK(cfg.alecto.max_aggressive == 5);
  CHECK(cfg.alecto.block_epochs == 8);
  CHECK(cfg.alecto.conservative_degree == 3);
  CHECK(cfg.alecto.proficiency_boundary == 0.75);
  CHECK(cfg.alecto.deficiency_boundary == 0.05);
  CHECK(cfg.alecto.epoch_demands == 100);
  CHECK(cfg.alecto.dead_threshold == 150);
  CHECK(cfg.alecto.min_issued_for_judgement == 8);
  CHECK(cfg.alecto.alloc_entries == 64);
  CHECK(cfg.alecto.sample_entries == 64);
  CHECK(cfg.alecto.sandbox_entries == 512);
  CHECK_FALSE(cfg.alecto.temporal_index.has_value());
  CHECK(cfg.cache.l1.size_bytes == 32 * 1024);
  CHECK(cfg.cache.l1.ways == 8);
  CHECK(cfg.cache.l1.hit_latency == 4);
  CHECK(cfg.cache.l2.size_bytes == 256 * 1024);
  CHECK(cfg.cache.l2.ways == 8);
  CHECK(cfg.cache.l2.hit_latency == 15);
  CHECK(cfg.cache.memory_latency == 200);
  CHECK(cfg.bandit.epoch_len == 2048);
  CHECK(cfg.bandit.epsilon == 0.1);
  CHECK(cfg.baseline_degree == 3);
  CHECK(cfg.selectors == std::vector<SelectorKind>{SelectorKind::alecto});
  CHECK(cfg.engines ==
        std::vector<EngineKind>{EngineKind::stream, EngineKind::stride, EngineKind::spatial});
}

TEST_CASE("every section and key is read") {
  const auto cfg = parse_config(R"(
[experiment]
selectors = ipcp, bandit6
engines = stride, temporal
seed = 0x10
warmup_records = 12

[cache]
l1_size = 16384
l1_ways = 4
l1_latency = 3
l2_size = 131072
l2_ways = 16
l2_latency = 11
memory_latency = 150

[alecto]
M = 4
N = 6
c = 2
PB = 0.8
DB = 0.1
epoch_demands = 90
dead_threshold = 140
min_issued = 4
fixed_ia_degree = 9

[bandit]
epoch_len = 512
exploration = ucb1
epsilon = 0.2
ucb_c = 1.5

[baseline]
degree = 4

[pattern.one]
kind = spatial
pc = 0x400
footprint = 0b1011
permute_footprint = true
count = 10
gap = 3
)");
  CHECK(cfg.selectors == std::vector<SelectorKind>{SelectorKind::ipcp, SelectorKind::bandit6});
  CHECK(cfg.engines == std::vector<EngineKind>{EngineKind::stride, EngineKind::temporal});
  CHECK(cfg.alecto.prefetchers == 2);
  CHECK(cfg.alecto.temporal_index == std::optional<std::size_t>(1));
  CHECK(cfg.seed == 16);
  CHECK(cfg.warmup_records == 12);
  CHECK(cfg.cache.l1.size_bytes == 16384);
  CHECK(cfg.cache.l1.ways == 4);
  CHECK(cfg.cache.l1.hit_latency == 3);
  CHECK(cfg.cache.l2.ways == 16);
  CHECK(cfg.cache.memory_latency == 150);
  CHECK(cfg.alecto.max_aggressive == 4);
  CHECK(cfg.alecto.block_epochs == 6);
  CHECK(cfg.alecto.conservative_degree == 2);
  CHECK(cfg.alecto.proficiency_boundary == 0.8);
  CHECK(cfg.alecto.deficiency_boundary == doctest::Approx(0.1));
  CHECK(cfg.alecto.epoch_demands == 90);
  CHECK(cfg.alecto.dead_threshold == 140);
  CHECK(cfg.alecto.min_issued_for_judgement == 4);
  CHECK(cfg.alecto.fixed_ia_degree == 9);
  CHECK(cfg.bandit.epoch_len == 512);
  CHECK(cfg.bandit.exploration == Exploration::ucb1);
  CHECK(cfg.bandit.ucb_c == 1.5);
  CHECK(cfg.baseline_degree == 4);
  REQUIRE(cfg.trace.patterns.size() == 1);
  CHECK(cfg.trace.patterns[0].footprint == 0b1011);
  CHECK(cfg.trace.patterns[0].permute_footprint);
  CHECK(cfg.trace.patterns[0].gap == 3);
}

TEST_CASE("config errors") {
  const std::string pat = kMinimal;
  CHECK_THROWS_AS(parse_config("[experiment]\nselector = oracle\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nbogus = 1\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nseed = -3\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[alecto]\nPB = high\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[alecto]\nPB = 0.01\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nengines = stride, markov\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nselectors =\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\ntrace = t.csv\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[cache]\nl1_size = 1000\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[bandit]\nexploration = thompson\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment\nseed = 1\n" + pat), ConfigError);
  CHECK_THROWS_AS(parse_config("[pattern.b]\nkind = stride\ncount = 3\n"), PatternError);
  CHECK_THROWS_AS(parse_config("[pattern.b]\nkind = stride\npc = 1\ncount = 3\nstride = 0\n"),
                  PatternError);
  CHECK_THROWS_AS(parse_config("[pattern.b]\nkind = stride\npc = 1\ncount = 3\nwidth = 2\n"),
                  ConfigError);
}

TEST_CASE("trace path resolves against the config directory") {
  const auto cfg = parse_config("[experiment]\ntrace = traces/a.csv\n", "/data/run");
  REQUIRE(cfg.trace.file.has_value());
  CHECK(*cfg.trace.file == std::filesystem::path("/data/run/traces/a.csv"));
  const auto abs = parse_config("[experiment]\ntrace = /tmp/b.csv\n", "/data/run");
  CHECK(*abs.trace.file == std::filesystem::path("/tmp/b.csv"));
}

TEST_CASE("canonical text and digest track every run parameter") {
  const auto a = parse_config(kMinimal);
  CHECK(a.canonical() == parse_config(kMinimal).canonical());
  CHECK(a.digest() == parse_config(kMinimal).digest());
  CHECK(a.digest().size() == 16);
  auto b = a;
  b.alecto.proficiency_boundary = 0.7;
  CHECK(a.digest() != b.digest());
  b = a;
  b.seed = 2;
  CHECK(a.digest() != b.digest());
  b = a;
  b.cache.memory_latency = 201;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("selector factory names") {
  auto cfg = parse_config(kMinimal);
  for (auto k : {SelectorKind::alecto, SelectorKind::alecto_fixed_degree, SelectorKind::ipcp,
                 SelectorKind::dol, SelectorKind::bandit3, SelectorKind::bandit6}) {
    CHECK(make_selector(k, cfg)->name() == to_string(k));
    CHECK(selector_kind_from_string(to_string(k)) == k);
  }
  CHECK(make_selector(SelectorKind::alecto, cfg)->storage_bits().has_value());
  CHECK_FALSE(make_selector(SelectorKind::ipcp, cfg)->storage_bits().has_value());
}

TEST_CASE("runs are reproducible for a fixed seed") {
  auto cfg = parse_config(R"(
[experiment]
seed = 3
[pattern.a]
kind = random
pc = 0x400
count = 3000
[pattern.b]
kind = stride
pc = 0x500
count = 3000
)");
  const auto t1 = materialize_trace(cfg);
  const auto t2 = materialize_trace(cfg);
  CHECK(t1 == t2);
  for (auto k : {SelectorKind::alecto, SelectorKind::bandit3}) {
    const std::vector<RunReport> a{run_experiment(cfg, k, t1)};
    const std::vector<RunReport> b{run_experiment(cfg, k, t2)};
    CHECK(emit_csv(a) == emit_csv(b));
    CHECK(emit_json(a[0]) == emit_json(b[0]));
  }
}
