#include "prefsel/selectors.hpp"

namespace prefsel {

std::vector<PrefetchRequest> AlectoSelector::on_demand(const DemandRecord& record,
                                                       EngineSpan engines) {
  alecto_.on_demand_observed(record);
  const AllocationDirective directive = alecto_.allocate(record);

  std::vector<PrefetchRequest> out;
  for (std::size_t i = 0; i < engines.size(); ++i) {
    const PrefetcherDirective& d = directive.per_prefetcher[i];
    if (!d.train) continue;
    TrainOutcome t = engines[i]->train(record, d.degree);
    for (const auto& kept : alecto_.on_prefetch_issued(record.pc, i, t.candidates, d.l1_quota)) {
      out.push_back({kept.block, kept.level, i});
    }
  }
  alecto_.end_round(record.pc, out.size());
  return out;
}

std::vector<PrefetchRequest> StaticPrioritySelector::on_demand(const DemandRecord& record,
                                                               EngineSpan engines) {
  std::vector<TrainOutcome> outcomes;
  outcomes.reserve(engines.size());
  for (const auto& e : engines) outcomes.push_back(e->train(record, degree_));

  std::vector<PrefetchRequest> out;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].candidates.empty()) continue;
    for (std::uint64_t block : outcomes[i].candidates) {
      if (filter_.admit(block)) out.push_back({block, CacheLevel::L1, i});
    }
    break;
  }
  return out;
}

std::vector<PrefetchRequest> SequentialSelector::on_demand(const DemandRecord& record,
                                                           EngineSpan engines) {
  const SequentialResult r = sequential_allocate(record, engines, degree_);
  std::vector<PrefetchRequest> out;
  for (std::uint64_t block : r.outcome.candidates) {
    if (filter_.admit(block)) out.push_back({block, CacheLevel::L1, r.index});
  }
  return out;
}

BanditSelector::BanditSelector(const BanditConfig& cfg, std::size_t prefetchers,
                               std::string_view name)
    : cfg_(cfg), name_(name), stats_(bandit_arm_count(prefetchers)), rng_(cfg.seed) {
  cfg_.validate();
}

void BanditSelector::on_access(const AccessOutcome& outcome) {
  if (outcome.level == CacheLevel::L1 || outcome.covered != Coverage::not_prefetched) ++hits_;
}

std::vector<PrefetchRequest> BanditSelector::on_demand(const DemandRecord& record,
                                                       EngineSpan engines) {
  if (in_epoch_ == 0) {
    arm_ = bandit_select_arm(stats_, epoch_ + 1, cfg_, rng_);
    history_.push_back(arm_);
  }

  std::vector<PrefetchRequest> out;
  for (std::size_t i = 0; i < engines.size(); ++i) {
    TrainOutcome t = engines[i]->train(record, cfg_.enabled_degree);
    if (((arm_ >> i) & 1) == 0) continue;
    for (std::uint64_t block : t.candidates) {
      if (filter_.admit(block)) out.push_back({block, CacheLevel::L1, i});
    }
  }

  if (++in_epoch_ == cfg_.epoch_len) {
    bandit_update(stats_[arm_], static_cast<double>(hits_) / static_cast<double>(cfg_.epoch_len));
    ++epoch_;
    in_epoch_ = 0;
    hits_ = 0;
  }
  return out;
}

}  // namespace prefsel
