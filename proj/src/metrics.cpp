#include "prefsel/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace prefsel {

namespace {

std::uint64_t sum(const std::vector<std::uint64_t>& v) {
  return std::accumulate(v.begin(), v.end(), std::uint64_t{0});
}

}  // namespace

std::uint64_t RunReport::total_issued() const { return sum(issued_per_engine); }
std::uint64_t RunReport::total_useful() const { return sum(useful_per_engine); }
std::uint64_t RunReport::total_train() const { return sum(train_count_per_engine); }
std::uint64_t RunReport::total_table_misses() const { return sum(table_misses_per_engine); }

RunReport finalize(const RawCounters& raw) {
  RunReport r;
  static_cast<RawCounters&>(r) = raw;
  const std::uint64_t issued = r.total_issued();
  const std::uint64_t useful = r.total_useful();
  r.zero_issued = issued == 0;
  r.accuracy = issued == 0 ? 0.0 : static_cast<double>(useful) / static_cast<double>(issued);
  r.overpredictions = 1.0 - r.accuracy;
  r.coverage = r.shadow_misses == 0
                   ? 0.0
                   : static_cast<double>(r.covered_timely + r.covered_untimely) /
                         static_cast<double>(r.shadow_misses);
  return r;
}

std::string format_fraction(double value) {
  // printf rounds the exact binary value to nearest, ties to even.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::string emit_csv(std::span<const RunReport> reports) {
  std::vector<std::string> engines;
  for (const auto& r : reports) {
    for (const auto& n : r.engine_names) {
      if (std::find(engines.begin(), engines.end(), n) == engines.end()) engines.push_back(n);
    }
  }

  std::string out =
      "selector,trace,demands,shadow_misses,covered_timely,covered_untimely,uncovered,"
      "coverage,accuracy,overpredictions";
  for (const auto& n : engines) {
    out += "," + n + "_issued," + n + "_useful," + n + "_train," + n + "_table_miss";
  }
  out += ",storage_bits\n";

  for (const auto& r : reports) {
    out += r.selector;
    out += "," + digest_hex(r.trace_digest);
    for (auto v : {r.demands, r.shadow_misses, r.covered_timely, r.covered_untimely, r.uncovered}) {
      out += "," + std::to_string(v);
    }
    for (double f : {r.coverage, r.accuracy, r.overpredictions}) out += "," + format_fraction(f);
    for (const auto& n : engines) {
      const auto it = std::find(r.engine_names.begin(), r.engine_names.end(), n);
      if (it == r.engine_names.end()) {
        out += ",0,0,0,0";
        continue;
      }
      const auto i = static_cast<std::size_t>(it - r.engine_names.begin());
      for (const auto* v : {&r.issued_per_engine, &r.useful_per_engine,
                            &r.train_count_per_engine, &r.table_misses_per_engine}) {
        out += "," + std::to_string((*v)[i]);
      }
    }
    out += ",";
    if (r.alecto_storage_bits) out += std::to_string(*r.alecto_storage_bits);
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["selector"] = r.selector;
  j["trace"] = digest_hex(r.trace_digest);
  j["config_digest"] = r.config_digest;
  j["demands"] = r.demands;
  j["shadow_misses"] = r.shadow_misses;
  j["covered_timely"] = r.covered_timely;
  j["covered_untimely"] = r.covered_untimely;
  j["uncovered"] = r.uncovered;
  j["coverage"] = r.coverage;
  j["accuracy"] = r.accuracy;
  j["overpredictions"] = r.overpredictions;
  j["zero_issued"] = r.zero_issued;
  j["unused_prefetches"] = r.unused_prefetches;
  for (std::size_t i = 0; i < r.engine_names.size(); ++i) {
    const std::string& n = r.engine_names[i];
    j[n + "_issued"] = r.issued_per_engine[i];
    j[n + "_useful"] = r.useful_per_engine[i];
    j[n + "_train"] = r.train_count_per_engine[i];
    j[n + "_table_miss"] = r.table_misses_per_engine[i];
  }
  j["storage_bits"] = r.alecto_storage_bits ? nlohmann::ordered_json(*r.alecto_storage_bits) : nlohmann::ordered_json();
  return j;
}

std::string emit_json(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

std::vector<double> energy_proxy(const RunReport& alecto, const RunReport& baseline) {
  std::vector<double> out;
  out.reserve(baseline.engine_names.size());
  for (std::size_t i = 0; i < baseline.engine_names.size(); ++i) {
    const auto it = std::find(alecto.engine_names.begin(), alecto.engine_names.end(),
                              baseline.engine_names[i]);
    if (it == alecto.engine_names.end()) {
      throw std::invalid_argument("engine " + baseline.engine_names[i] + " missing from report");
    }
    const std::uint64_t base = baseline.train_count_per_engine[i];
    const std::uint64_t mine =
        alecto.train_count_per_engine[static_cast<std::size_t>(it - alecto.engine_names.begin())];
    out.push_back(base == 0 ? 0.0 : 1.0 - static_cast<double>(mine) / static_cast<double>(base));
  }
  return out;
}

}  // namespace prefsel
