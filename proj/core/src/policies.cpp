#include "vneap/policies.hpp"

#include "vneap/error.hpp"

namespace vneap {

namespace {

std::string_view selection_name(SelectionRule r) {
  switch (r) {
    case SelectionRule::kRandom: return "noexploit-random";
    case SelectionRule::kMaxRevenue: return "exploit-maxrev";
    case SelectionRule::kBestR2c: return "exploit-r2c";
  }
  return "?";
}

std::optional<std::pair<SelectionRule, PlacementRule>> parse_method(std::string_view method) {
  auto plus = method.find('+');
  if (plus == std::string_view::npos) return std::nullopt;
  std::string_view sel = method.substr(0, plus), pl = method.substr(plus + 1);
  SelectionRule s;
  if (sel == "noexploit-random") s = SelectionRule::kRandom;
  else if (sel == "exploit-maxrev") s = SelectionRule::kMaxRevenue;
  else if (sel == "exploit-r2c") s = SelectionRule::kBestR2c;
  else return std::nullopt;
  PlacementRule p;
  if (pl == "greedy") p = PlacementRule::kGreedy;
  else if (pl == "random") p = PlacementRule::kRandom;
  else return std::nullopt;
  return std::make_pair(s, p);
}

}  // namespace

HeuristicPolicy::HeuristicPolicy(SelectionRule select, PlacementRule place,
                                 std::uint64_t seed, int k)
    : select_(select), place_(place), k_(k), rng_(make_rng(seed, 101)) {}

std::string HeuristicPolicy::name() const {
  return std::string(selection_name(select_)) +
         (place_ == PlacementRule::kGreedy ? "+greedy" : "+random");
}

const PathCache& HeuristicPolicy::cache_for(const SubstrateNetwork& sn) {
  if (cached_for_ != &sn || !cache_) {
    cache_ = std::make_unique<PathCache>(sn, k_);
    cached_for_ = &sn;
  }
  return *cache_;
}

void HeuristicPolicy::begin_episode(const Scenario& scenario) { cache_for(scenario.substrate); }

Decision HeuristicPolicy::decide(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                                 const VNR& vnr) {
  const PathCache& paths = cache_for(sn);
  int alternative = 0;
  switch (select_) {
    case SelectionRule::kRandom: alternative = hl_random(vnr, rng_); break;
    case SelectionRule::kMaxRevenue: alternative = hl_max_revenue(vnr); break;
    case SelectionRule::kBestR2c: {
      auto best = hl_best_r2c(ledger, sn, vnr, paths);
      alternative = best.value_or(hl_max_revenue(vnr));
      break;
    }
  }
  EmbedResult result = place_ == PlacementRule::kGreedy
                           ? greedy_embed(ledger, sn, vnr, alternative, paths)
                           : random_embed(ledger, sn, vnr, alternative, paths, rng_);
  if (auto* emb = std::get_if<Embedding>(&result)) return Decision::select(std::move(*emb));
  return Decision::admit_failed(alternative);
}

Decision ReplayPolicy::decide(const SubstrateNetwork&, const ResourceLedger&, const VNR& vnr) {
  auto it = plan_.find(vnr.id);
  if (it == plan_.end()) return Decision::reject();
  return Decision::select(it->second);
}

bool is_heuristic_method(std::string_view method) { return parse_method(method).has_value(); }

std::unique_ptr<DecisionPolicy> make_heuristic_policy(std::string_view method,
                                                      std::uint64_t seed, int k) {
  auto parsed = parse_method(method);
  if (!parsed) throw InvalidArgument("unknown heuristic method '" + std::string(method) + "'");
  return std::make_unique<HeuristicPolicy>(parsed->first, parsed->second, seed, k);
}

}  // namespace vneap
