#include "vneap/simulator.hpp"

#include <charconv>
#include <ostream>

#include "vneap/error.hpp"
#include "vneap/metrics.hpp"

namespace vneap {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kAccepted: return "accepted";
    case Outcome::kRejected: return "rejected";
    case Outcome::kEmbeddingFailed: return "embedding-failed";
  }
  return "unknown";
}

Outcome outcome_from_string(std::string_view s) {
  if (s == "accepted") return Outcome::kAccepted;
  if (s == "rejected") return Outcome::kRejected;
  if (s == "embedding-failed") return Outcome::kEmbeddingFailed;
  throw FormatError("unknown outcome '" + std::string(s) + "'");
}

bool EventQueue::Later::operator()(const Event& a, const Event& b) const {
  if (a.time != b.time) return a.time > b.time;
  if (a.kind != b.kind) return a.kind > b.kind;
  return a.sequence > b.sequence;
}

void EventQueue::push(double time, Event::Kind kind, std::size_t vnr_index) {
  if (time < last_popped_) throw InvariantError("event scheduled in the past");
  heap_.push(Event{time, kind, vnr_index, next_sequence_++});
}

Event EventQueue::pop() {
  if (heap_.empty()) throw InvariantError("pop from empty event queue");
  Event e = heap_.top();
  heap_.pop();
  last_popped_ = e.time;
  return e;
}

SimulationReport run(const Scenario& scenario, DecisionPolicy& policy,
                     const SimulationOptions& options) {
  const SubstrateNetwork& sn = scenario.substrate;
  SimulationReport report;
  report.policy = policy.name();
  ResourceLedger ledger(sn);
  EventQueue queue;
  for (std::size_t k = 0; k < scenario.vnrs.size(); ++k)
    queue.push(scenario.vnrs[k].arrival, Event::Kind::kArrival, k);

  policy.begin_episode(scenario);
  while (!queue.empty()) {
    const Event ev = queue.pop();
    const VNR& vnr = scenario.vnrs[ev.vnr_index];
    if (ev.kind == Event::Kind::kDeparture) {
      ledger.release(vnr.id);
    } else {
      VnrRecord rec;
      rec.vnr_id = vnr.id;
      rec.arrival = vnr.arrival;
      rec.lifetime = vnr.lifetime;
      Decision d = policy.decide(sn, ledger, vnr);
      rec.alternative = d.alternative;
      switch (d.kind) {
        case Decision::Kind::kReject:
          rec.outcome = Outcome::kRejected;
          rec.alternative = -1;
          break;
        case Decision::Kind::kAdmitFailed:
          rec.outcome = Outcome::kEmbeddingFailed;
          rec.failure = "policy could not embed the selected alternative";
          break;
        case Decision::Kind::kSelect:
          try {
            if (!d.embedding) throw FeasibilityError("selection without embedding");
            d.embedding->vnr_id = vnr.id;
            ledger.commit(sn, vnr, *d.embedding);
            const Alternative& alt = vnr.alternatives[d.embedding->alternative];
            rec.outcome = Outcome::kAccepted;
            rec.revenue = revenue(alt);
            rec.cost = cost(alt, *d.embedding);
            rec.embedding = std::move(d.embedding);
            queue.push(vnr.departure(), Event::Kind::kDeparture, ev.vnr_index);
          } catch (const FeasibilityError& e) {
            rec.outcome = Outcome::kEmbeddingFailed;
            rec.failure = e.what();
          }
          break;
      }
      const int offered_alt = rec.alternative >= 0 &&
                                      rec.alternative < static_cast<int>(vnr.alternatives.size())
                                  ? rec.alternative
                                  : 0;
      rec.offered_revenue = revenue(vnr.alternatives[offered_alt]);
      policy.observe(vnr, rec);
      report.records.push_back(std::move(rec));
    }
    if (options.check_every_event && !ledger.within_bounds())
      throw InvariantError("ledger out of bounds after event at t=" + format_double(ev.time));
  }
  policy.end_episode();
  report.final_ledger = std::move(ledger);
  recompute_aggregates(report);
  return report;
}

void recompute_aggregates(SimulationReport& report) {
  report.total = static_cast<int>(report.records.size());
  report.accepted = report.rejected = report.embedding_failed = 0;
  report.total_revenue = report.total_cost = report.offered_revenue = 0.0;
  for (const auto& r : report.records) {
    report.offered_revenue += r.offered_revenue;
    switch (r.outcome) {
      case Outcome::kAccepted:
        ++report.accepted;
        report.total_revenue += r.revenue;
        report.total_cost += r.cost;
        break;
      case Outcome::kRejected: ++report.rejected; break;
      case Outcome::kEmbeddingFailed: ++report.embedding_failed; break;
    }
  }
  report.acceptance_ratio =
      report.total > 0 ? static_cast<double>(report.accepted) / report.total : 0.0;
  report.r2c = report.total_cost > 0.0 ? report.total_revenue / report.total_cost : 0.0;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_records_csv(const SimulationReport& report, std::ostream& out) {
  out << "vnr_id,arrival,lifetime,outcome,alternative,revenue,cost,r2c,node_map,paths,"
         "offered_revenue\n";
  for (const auto& r : report.records) {
    out << r.vnr_id << ',' << format_double(r.arrival) << ',' << format_double(r.lifetime) << ','
        << to_string(r.outcome) << ',' << r.alternative << ',' << format_double(r.revenue) << ','
        << format_double(r.cost) << ','
        << (r.cost > 0.0 ? format_double(r.revenue / r.cost) : std::string()) << ',';
    if (r.embedding) {
      for (std::size_t i = 0; i < r.embedding->node_map.size(); ++i)
        out << (i ? ";" : "") << r.embedding->node_map[i];
      out << ',';
      for (std::size_t l = 0; l < r.embedding->link_paths.size(); ++l) {
        out << (l ? "|" : "");
        auto nodes = r.embedding->link_paths[l].nodes();
        for (std::size_t k = 0; k < nodes.size(); ++k) out << (k ? "-" : "") << nodes[k];
      }
    } else {
      out << ',';
    }
    out << ',' << format_double(r.offered_revenue) << '\n';
  }
}

nlohmann::json aggregates_json(const SimulationReport& report) {
  return {
      {"policy", report.policy},
      {"total", report.total},
      {"accepted", report.accepted},
      {"rejected", report.rejected},
      {"embedding_failed", report.embedding_failed},
      {"acceptance_ratio", report.acceptance_ratio},
      {"total_revenue", report.total_revenue},
      {"total_cost", report.total_cost},
      {"r2c", report.r2c},
      {"offered_revenue", report.offered_revenue},
  };
}

}  // namespace vneap
