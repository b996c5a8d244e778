#ifndef VNEAP_POLICIES_HPP_
#define VNEAP_POLICIES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "vneap/embed.hpp"
#include "vneap/paths.hpp"
#include "vneap/simulator.hpp"

namespace vneap {

enum class SelectionRule { kRandom, kMaxRevenue, kBestR2c };
enum class PlacementRule { kGreedy, kRandom };

/// Non-learned two-stage policy: a selection rule picks the alternative,
/// a placement rule embeds it. Never rejects outright.
class HeuristicPolicy : public DecisionPolicy {
 public:
  HeuristicPolicy(SelectionRule select, PlacementRule place, std::uint64_t seed,
                  int k = kDefaultK);

  /// e.g. "noexploit-random+greedy", "exploit-maxrev+greedy".
  std::string name() const override;
  void begin_episode(const Scenario& scenario) override;
  Decision decide(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                  const VNR& vnr) override;

 private:
  const PathCache& cache_for(const SubstrateNetwork& sn);

  SelectionRule select_;
  PlacementRule place_;
  int k_;
  Rng rng_;
  std::unique_ptr<PathCache> cache_;
  const SubstrateNetwork* cached_for_ = nullptr;
};

class RejectAllPolicy : public DecisionPolicy {
 public:
  std::string name() const override { return "reject-all"; }
  Decision decide(const SubstrateNetwork&, const ResourceLedger&, const VNR&) override {
    return Decision::reject();
  }
};

/// Replays a precomputed plan (e.g. an exact solver's assignment): requests
/// absent from the plan are rejected.
class ReplayPolicy : public DecisionPolicy {
 public:
  ReplayPolicy(std::string name, std::map<int, Embedding> plan)
      : name_(std::move(name)), plan_(std::move(plan)) {}
  std::string name() const override { return name_; }
  Decision decide(const SubstrateNetwork&, const ResourceLedger&, const VNR& vnr) override;

 private:
  std::string name_;
  std::map<int, Embedding> plan_;
};

/// Baseline factory for method names
/// `<noexploit-random|exploit-maxrev|exploit-r2c>+<greedy|random>`.
/// Throws InvalidArgument for anything else.
std::unique_ptr<DecisionPolicy> make_heuristic_policy(std::string_view method,
                                                      std::uint64_t seed, int k = kDefaultK);
bool is_heuristic_method(std::string_view method);

}  // namespace vneap

#endif  // VNEAP_POLICIES_HPP_
