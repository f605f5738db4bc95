#include "prefsel/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "prefsel/hash.hpp"
#include "prefsel/simulator.hpp"

namespace prefsel {

namespace pt = boost::property_tree;

std::string_view to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::alecto: return "alecto";
    case SelectorKind::alecto_fixed_degree: return "alecto_fixed_degree";
    case SelectorKind::ipcp: return "ipcp";
    case SelectorKind::dol: return "dol";
    case SelectorKind::bandit3: return "bandit3";
    case SelectorKind::bandit6: return "bandit6";
  }
  return "?";
}

SelectorKind selector_kind_from_string(std::string_view name) {
  for (auto k : {SelectorKind::alecto, SelectorKind::alecto_fixed_degree, SelectorKind::ipcp,
                 SelectorKind::dol, SelectorKind::bandit3, SelectorKind::bandit6}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown selector '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Typed access to one INI section; unknown keys are rejected.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  ~Section() = default;

  void reject_unknown() const {
    for (const auto& [key, _] : tree_) {
      if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }
  }

  std::optional<std::string> str(const std::string& key) {
    used_.insert(key);
    const auto it = tree_.find(key);
    if (it == tree_.not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  template <typename T>
  void u(const std::string& key, T& out) {
    if (auto v = str(key)) out = static_cast<T>(parse_u64(key, *v));
  }

  void f(const std::string& key, double& out) {
    if (auto v = str(key)) {
      try {
        std::size_t pos = 0;
        out = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError("[" + name_ + "] " + key + ": not a number: " + *v);
      }
    }
  }

  void i(const std::string& key, std::int64_t& out) {
    if (auto v = str(key)) {
      bool neg = !v->empty() && (*v)[0] == '-';
      const std::uint64_t mag = parse_u64(key, neg ? v->substr(1) : *v);
      out = neg ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag);
    }
  }

  void b(const std::string& key, bool& out) {
    if (auto v = str(key)) {
      if (*v == "true" || *v == "1") out = true;
      else if (*v == "false" || *v == "0") out = false;
      else throw ConfigError("[" + name_ + "] " + key + ": expected true/false");
    }
  }

 private:
  std::uint64_t parse_u64(const std::string& key, const std::string& v) const {
    std::string_view s = v;
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
      s.remove_prefix(2);
      base = 16;
    } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
      s.remove_prefix(2);
      base = 2;
    }
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError("[" + name_ + "] " + key + ": not an unsigned integer: " + v);
    }
    return out;
  }

  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> used_;
};

pt::ptree read_ini(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return tree;
}

PatternSpec parse_pattern(const std::string& name, const pt::ptree& tree) {
  Section s(name, tree);
  PatternSpec p;
  const auto kind = s.str("kind");
  if (!kind) throw PatternError("[" + name + "] missing 'kind'");
  p.kind = pattern_kind_from_string(*kind);
  const auto pc = s.str("pc");
  if (!pc) throw PatternError("[" + name + "] missing 'pc'");
  s.u("pc", p.pc);
  s.u("base", p.base);
  s.i("stride", p.stride);
  s.u("max_skip", p.max_skip);
  s.u("region_bytes", p.region_bytes);
  s.u("footprint", p.footprint);
  s.b("permute_footprint", p.permute_footprint);
  s.u("period", p.period);
  s.u("window_bytes", p.window_bytes);
  s.u("count", p.count);
  s.u("gap", p.gap);
  s.reject_unknown();
  validate(p);
  return p;
}

bool is_pattern_section(const std::string& name) { return name.rfind("pattern", 0) == 0; }

}  // namespace

std::vector<PatternSpec> parse_patterns(std::string_view text) {
  const pt::ptree tree = read_ini(text);
  std::vector<PatternSpec> out;
  for (const auto& [name, section] : tree) {
    if (is_pattern_section(name)) out.push_back(parse_pattern(name, section));
  }
  return out;
}

void ExperimentConfig::finalize() {
  if (selectors.empty()) throw ConfigError("no selector given");
  if (engines.empty()) throw ConfigError("no engines given");
  cache.validate();
  alecto.prefetchers = engines.size();
  alecto.temporal_index.reset();
  for (std::size_t i = 0; i < engines.size(); ++i) {
    if (engines[i] == EngineKind::temporal) alecto.temporal_index = i;
  }
  alecto.validate();
  bandit.validate();
  if (baseline_degree == 0) throw ConfigError("baseline degree must be >= 1");
  if (!trace.file && trace.patterns.empty()) {
    throw ConfigError("config names neither a trace file nor any pattern section");
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  o.precision(17);
  o << "selectors=";
  for (auto s : selectors) o << to_string(s) << ';';
  o << "\nengines=";
  for (auto e : engines) o << to_string(e) << ';';
  o << "\ncache=" << cache.l1.size_bytes << ',' << cache.l1.ways << ',' << cache.l1.hit_latency
    << ',' << cache.l2.size_bytes << ',' << cache.l2.ways << ',' << cache.l2.hit_latency << ','
    << cache.memory_latency;
  o << "\nalecto=" << alecto.max_aggressive << ',' << alecto.block_epochs << ','
    << alecto.conservative_degree << ',' << alecto.proficiency_boundary << ','
    << alecto.deficiency_boundary << ',' << alecto.epoch_demands << ',' << alecto.dead_threshold
    << ',' << alecto.min_issued_for_judgement << ',' << alecto.fixed_ia_degree << ','
    << alecto.alloc_entries << ',' << alecto.sample_entries << ',' << alecto.sandbox_entries;
  o << "\nbandit=" << bandit.epoch_len << ',' << static_cast<int>(bandit.exploration) << ','
    << bandit.epsilon << ',' << bandit.ucb_c;
  o << "\nbaseline_degree=" << baseline_degree << "\nwarmup=" << warmup_records
    << "\nseed=" << seed << '\n';
  return o.str();
}

std::string ExperimentConfig::digest() const {
  const std::string c = canonical();
  return digest_hex(fnv1a(c.data(), c.size()));
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const pt::ptree tree = read_ini(text);
  ExperimentConfig cfg;

  for (const auto& [name, section] : tree) {
    if (is_pattern_section(name)) {
      cfg.trace.patterns.push_back(parse_pattern(name, section));
      continue;
    }
    Section s(name, section);
    if (name == "experiment") {
      auto one = s.str("selector");
      auto many = s.str("selectors");
      if (one && many) throw ConfigError("[experiment] give either selector or selectors");
      if (one || many) {
        cfg.selectors.clear();
        for (const auto& n : split_list(one ? *one : *many)) {
          cfg.selectors.push_back(selector_kind_from_string(n));
        }
      }
      if (auto e = s.str("engines")) {
        cfg.engines.clear();
        for (const auto& n : split_list(*e)) {
          try {
            cfg.engines.push_back(engine_kind_from_string(n));
          } catch (const std::invalid_argument& ex) {
            throw ConfigError(ex.what());
          }
        }
      }
      s.u("seed", cfg.seed);
      s.u("warmup_records", cfg.warmup_records);
      if (auto t = s.str("trace")) {
        std::filesystem::path p(*t);
        cfg.trace.file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
    } else if (name == "cache") {
      s.u("l1_size", cfg.cache.l1.size_bytes);
      s.u("l1_ways", cfg.cache.l1.ways);
      s.u("l1_latency", cfg.cache.l1.hit_latency);
      s.u("l2_size", cfg.cache.l2.size_bytes);
      s.u("l2_ways", cfg.cache.l2.ways);
      s.u("l2_latency", cfg.cache.l2.hit_latency);
      s.u("memory_latency", cfg.cache.memory_latency);
    } else if (name == "alecto") {
      auto& a = cfg.alecto;
      s.u("M", a.max_aggressive);
      s.u("N", a.block_epochs);
      s.u("c", a.conservative_degree);
      s.f("PB", a.proficiency_boundary);
      s.f("DB", a.deficiency_boundary);
      s.u("epoch_demands", a.epoch_demands);
      s.u("dead_threshold", a.dead_threshold);
      s.u("min_issued", a.min_issued_for_judgement);
      s.u("fixed_ia_degree", a.fixed_ia_degree);
      s.u("alloc_entries", a.alloc_entries);
      s.u("sample_entries", a.sample_entries);
      s.u("sandbox_entries", a.sandbox_entries);
    } else if (name == "bandit") {
      auto& b = cfg.bandit;
      s.u("epoch_len", b.epoch_len);
      if (auto e = s.str("exploration")) {
        if (*e == "epsilon") b.exploration = Exploration::epsilon_greedy;
        else if (*e == "ucb1") b.exploration = Exploration::ucb1;
        else throw ConfigError("[bandit] exploration must be epsilon or ucb1");
      }
      s.f("epsilon", b.epsilon);
      s.f("ucb_c", b.ucb_c);
    } else if (name == "baseline") {
      s.u("degree", cfg.baseline_degree);
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
    s.reject_unknown();
  }
  if (cfg.trace.file && !cfg.trace.patterns.empty()) {
    throw ConfigError("config gives both a trace file and pattern sections");
  }
  cfg.finalize();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::vector<DemandRecord> materialize_trace(const ExperimentConfig& cfg) {
  if (cfg.trace.file) return read_trace_file(*cfg.trace.file);
  return gen_interleave(cfg.trace.patterns, cfg.seed);
}

std::unique_ptr<Selector> make_selector(SelectorKind kind, const ExperimentConfig& cfg) {
  BanditConfig bandit = cfg.bandit;
  bandit.seed = derive_seed(cfg.seed, seed_stream::kBandit);
  switch (kind) {
    case SelectorKind::alecto:
    case SelectorKind::alecto_fixed_degree: {
      AlectoConfig a = cfg.alecto;
      a.fixed_degree_mode = kind == SelectorKind::alecto_fixed_degree;
      return std::make_unique<AlectoSelector>(a);
    }
    case SelectorKind::ipcp: return std::make_unique<StaticPrioritySelector>(cfg.baseline_degree);
    case SelectorKind::dol: return std::make_unique<SequentialSelector>(cfg.baseline_degree);
    case SelectorKind::bandit3:
      bandit.enabled_degree = 3;
      return std::make_unique<BanditSelector>(bandit, cfg.engines.size(), "bandit3");
    case SelectorKind::bandit6:
      bandit.enabled_degree = 6;
      return std::make_unique<BanditSelector>(bandit, cfg.engines.size(), "bandit6");
  }
  throw ConfigError("bad selector");
}

RunReport run_experiment(const ExperimentConfig& cfg, SelectorKind kind,
                         std::span<const DemandRecord> trace) {
  SimulationOptions opts{cfg.cache, cfg.warmup_records};
  Simulator sim(opts, make_engines(cfg.engines), make_selector(kind, cfg));
  sim.run(trace);
  RawCounters raw = sim.counters();
  raw.trace_digest = trace_digest(trace);
  raw.config_digest = cfg.digest();
  return finalize(raw);
}

}  // namespace prefsel
