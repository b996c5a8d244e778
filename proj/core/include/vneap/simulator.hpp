#ifndef VNEAP_SIMULATOR_HPP_
#define VNEAP_SIMULATOR_HPP_

#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vneap/ledger.hpp"
#include "vneap/scenario.hpp"
#include "vneap/types.hpp"

namespace vneap {

enum class Outcome {
  kAccepted,
  kRejected,
  /// Admitted by the high level but not embedded: the low level failed or
  /// the returned embedding did not commit.
  kEmbeddingFailed,
};

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

/// What a policy answers for one arrival.
struct Decision {
  enum class Kind { kReject, kSelect, kAdmitFailed } kind = Kind::kReject;
  int alternative = -1;
  std::optional<Embedding> embedding;

  static Decision reject() { return {}; }
  static Decision select(Embedding emb) {
    int a = emb.alternative;
    return {Kind::kSelect, a, std::move(emb)};
  }
  static Decision admit_failed(int alternative) {
    return {Kind::kAdmitFailed, alternative, std::nullopt};
  }
};

struct VnrRecord {
  int vnr_id = 0;
  double arrival = 0.0;
  double lifetime = 0.0;
  Outcome outcome = Outcome::kRejected;
  int alternative = -1;
  std::optional<Embedding> embedding;
  double revenue = 0.0;  // nonzero only when accepted
  double cost = 0.0;     // nonzero only when accepted
  /// Revenue of the decided alternative (alternative 0 when rejected).
  double offered_revenue = 0.0;
  std::string failure;
};

/// Decision interface. decide() sees the ledger read-only and is called
/// exactly once per arrival, in arrival order; the simulator performs the
/// commit and reports the result through observe().
class DecisionPolicy {
 public:
  virtual ~DecisionPolicy() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(const Scenario& /*scenario*/) {}
  virtual Decision decide(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                          const VNR& vnr) = 0;
  virtual void observe(const VNR& /*vnr*/, const VnrRecord& /*record*/) {}
  virtual void end_episode() {}
};

struct Event {
  enum class Kind { kDeparture = 0, kArrival = 1 };  // departures first on ties
  double time = 0.0;
  Kind kind = Kind::kArrival;
  std::size_t vnr_index = 0;
  std::size_t sequence = 0;
};

/// Time-ordered arrival/departure queue. Ties in time go to departures,
/// then to insertion order.
class EventQueue {
 public:
  void push(double time, Event::Kind kind, std::size_t vnr_index);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const;
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::size_t next_sequence_ = 0;
  double last_popped_ = -1.0;
};

struct SimulationReport {
  std::string policy;
  std::vector<VnrRecord> records;  // arrival order
  int total = 0;
  int accepted = 0;
  int rejected = 0;
  int embedding_failed = 0;
  double acceptance_ratio = 0.0;  // 0 when there are no arrivals
  double total_revenue = 0.0;     // accepted requests only
  double total_cost = 0.0;
  double r2c = 0.0;               // total_revenue / total_cost, 0 when no cost
  /// Revenue of the decided alternative (alternative 0 when rejected)
  /// summed over every arrival, for the all-arrivals revenue reading.
  double offered_revenue = 0.0;
  /// Ledger after every event has been processed.
  ResourceLedger final_ledger;
};

struct SimulationOptions {
  /// Verify 0 <= residual <= initial after every event; a breach throws
  /// InvariantError.
  bool check_every_event = true;
};

/// Event-driven online simulation of the scenario under policy.
SimulationReport run(const Scenario& scenario, DecisionPolicy& policy,
                     const SimulationOptions& options = {});

/// Recomputes the aggregates of report from its per-request records.
void recompute_aggregates(SimulationReport& report);

/// One row per request (see docs/formats.md).
void write_records_csv(const SimulationReport& report, std::ostream& out);
nlohmann::json aggregates_json(const SimulationReport& report);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace vneap

#endif  // VNEAP_SIMULATOR_HPP_
