#include "prefsel/simulator.hpp"

#include <stdexcept>

namespace prefsel {

Simulator::Simulator(const SimulationOptions& opts,
                     std::vector<std::unique_ptr<Prefetcher>> engines,
                     std::unique_ptr<Selector> selector)
    : opts_(opts), cache_(opts.cache), engines_(std::move(engines)), selector_(std::move(selector)) {
  if (engines_.empty()) throw std::invalid_argument("simulator needs at least one engine");
  if (!selector_) throw std::invalid_argument("simulator needs a selector");
  raw_.selector = std::string(selector_->name());
  const std::size_t n = engines_.size();
  for (const auto& e : engines_) raw_.engine_names.emplace_back(e->name());
  raw_.issued_per_engine.assign(n, 0);
  raw_.useful_per_engine.assign(n, 0);
  stats_at_window_.assign(n, EngineStats{});
}

void Simulator::step(const DemandRecord& record) {
  if (!measuring_ && seen_ >= opts_.warmup_records) {
    measuring_ = true;
    window_start_cycle_ = record.cycle;
    for (std::size_t i = 0; i < engines_.size(); ++i) stats_at_window_[i] = engines_[i]->stats();
  }
  ++seen_;

  const AccessOutcome outcome = cache_.access_demand(record.addr, record.cycle);
  const bool shadow_hit = cache_.shadow_access(record.addr);
  if (measuring_) {
    ++raw_.demands;
    if (!shadow_hit) {
      ++raw_.shadow_misses;
      switch (outcome.covered) {
        case Coverage::timely: ++raw_.covered_timely; break;
        case Coverage::untimely: ++raw_.covered_untimely; break;
        case Coverage::not_prefetched: ++raw_.uncovered; break;
      }
    }
    if (outcome.useful_source && outcome.useful_fill_start >= window_start_cycle_) {
      ++raw_.useful_per_engine[*outcome.useful_source];
    }
  }
  selector_->on_access(outcome);

  for (const PrefetchRequest& req : selector_->on_demand(record, engines_)) {
    if (on_issue_) on_issue_(record, req);
    const bool installed = cache_.install_prefetch(req.block * kLineBytes, req.level, record.cycle,
                                                   req.source, record.pc);
    if (installed && measuring_) ++raw_.issued_per_engine[req.source];
  }
}

void Simulator::run(std::span<const DemandRecord> records) {
  for (const auto& r : records) step(r);
}

RawCounters Simulator::counters() const {
  RawCounters out = raw_;
  out.train_count_per_engine.resize(engines_.size());
  out.table_misses_per_engine.resize(engines_.size());
  for (std::size_t i = 0; i < engines_.size(); ++i) {
    const EngineStats& now = engines_[i]->stats();
    const EngineStats& base = stats_at_window_[i];
    out.train_count_per_engine[i] = now.train_count - base.train_count;
    out.table_misses_per_engine[i] = now.table_misses - base.table_misses;
  }
  out.unused_prefetches = cache_.evicted_unused_prefetches() + cache_.resident_unused_prefetches();
  out.alecto_storage_bits = selector_->storage_bits();
  return out;
}

}  // namespace prefsel
