#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "prefsel/alecto.hpp"
#include "prefsel/experiment.hpp"
#include "prefsel/metrics.hpp"
#include "prefsel/trace.hpp"

namespace {

using namespace prefsel;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTrace = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> trace;
};

ExperimentConfig load_with_overrides(const std::string& path, const Overrides& ov) {
  ExperimentConfig cfg = load_config(path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.trace) {
    cfg.trace.file = *ov.trace;
    cfg.trace.patterns.clear();
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// One row per (config, selector) pair, in config order then selector order.
std::vector<RunReport> run_configs(const std::vector<std::string>& paths, const Overrides& ov) {
  std::vector<ExperimentConfig> cfgs;
  std::vector<std::vector<DemandRecord>> traces;
  for (const auto& p : paths) {
    cfgs.push_back(load_with_overrides(p, ov));
    traces.push_back(materialize_trace(cfgs.back()));
  }
  const std::uint64_t digest = trace_digest(traces.front());
  for (std::size_t i = 1; i < traces.size(); ++i) {
    if (trace_digest(traces[i]) != digest) {
      throw ConfigError("configs " + paths.front() + " and " + paths[i] +
                        " do not share one trace");
    }
  }

  std::vector<std::future<RunReport>> pending;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    for (auto kind : cfgs[i].selectors) {
      pending.push_back(std::async(std::launch::async, [&cfg = cfgs[i], &trace = traces[i], kind] {
        return run_experiment(cfg, kind, trace);
      }));
    }
  }
  std::vector<RunReport> reports;
  for (auto& f : pending) reports.push_back(f.get());
  return reports;
}

void emit_reports(const std::vector<RunReport>& reports, const std::optional<std::string>& out) {
  const std::string csv = emit_csv(reports);
  std::cout << csv;
  if (!out) return;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  write_text(*out + ".csv", csv);
  write_text(*out + ".json", arr.dump(2) + "\n");
}

std::string kb_text(std::uint64_t bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f KB", static_cast<double>(bytes) / 1024.0);
  return buf;
}

int cmd_storage(std::uint64_t p) {
  if (p == 0) throw ConfigError("storage: P must be >= 1");
  const StorageBits s = storage_bits(p);
  AlectoConfig impl_cfg;
  impl_cfg.prefetchers = p;
  const StorageBits impl = implementation_storage_bits(impl_cfg);
  nlohmann::ordered_json j;
  j["P"] = p;
  j["allocation_bits"] = s.allocation;
  j["sample_bits"] = s.sample;
  j["sandbox_bits"] = s.sandbox;
  j["total_bits"] = s.total;
  j["total_excluding_sandbox_bits"] = s.total_excluding_sandbox;
  j["total_bytes"] = s.total / 8;
  j["total_kb"] = kb_text(s.total / 8);
  j["total_excluding_sandbox_bytes"] = s.total_excluding_sandbox / 8;
  j["total_excluding_sandbox_kb"] = kb_text(s.total_excluding_sandbox / 8);
  j["implementation"] = {{"allocation_bits", impl.allocation},
                         {"sample_bits", impl.sample},
                         {"sandbox_bits", impl.sandbox},
                         {"total_bits", impl.total},
                         {"total_excluding_sandbox_bits", impl.total_excluding_sandbox}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prefetcher selection simulator"};
  app.require_subcommand(1);

  Overrides ov;
  std::optional<std::string> out;
  std::string config;
  std::vector<std::string> configs;
  std::uint64_t storage_p = 0;

  auto* gen = app.add_subcommand("gen", "Generate a trace from [pattern.*] sections");
  gen->add_option("--config", config, "Pattern spec file")->required();
  gen->add_option("--seed", ov.seed, "Interleave and pattern seed");
  gen->add_option("--out", out, "Trace output path (stdout when absent)");

  auto* run = app.add_subcommand("run", "Run every selector of one config");
  run->add_option("--config", config, "Experiment config")->required();
  run->add_option("--seed", ov.seed, "Seed override");
  run->add_option("--trace", ov.trace, "Trace file override");
  run->add_option("--out", out, "Write <out>.csv and <out>.json");

  auto* compare = app.add_subcommand("compare", "Run several configs over one shared trace");
  compare->add_option("--config", configs, "Experiment config (repeatable)")->required();
  compare->add_option("--seed", ov.seed, "Seed override");
  compare->add_option("--trace", ov.trace, "Trace file override");
  compare->add_option("--out", out, "Write <out>.csv and <out>.json");

  auto* storage = app.add_subcommand("storage", "Alecto storage report for P prefetchers");
  storage->add_option("P", storage_p, "Number of prefetchers")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      const auto specs = parse_patterns(read_text(config));
      if (specs.empty()) throw ConfigError(config + ": no [pattern.*] section");
      const auto trace = gen_interleave(specs, ov.seed.value_or(1));
      if (out) write_trace_file(*out, trace);
      else std::cout << emit_trace(trace);
    } else if (*run) {
      emit_reports(run_configs({config}, ov), out);
    } else if (*compare) {
      emit_reports(run_configs(configs, ov), out);
    } else if (*storage) {
      return cmd_storage(storage_p);
    }
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTrace;
  } catch (const std::invalid_argument& e) {
    // ConfigError and PatternError.
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
