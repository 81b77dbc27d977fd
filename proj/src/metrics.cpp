#include "tscharena/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace tsch {

namespace {

const char* event_name(EventType t) {
  switch (t) {
    case EventType::Gen: return "gen";
    case EventType::Tx: return "tx";
    case EventType::Deliver: return "deliver";
    case EventType::DropQueue: return "drop_queue";
    case EventType::DropRetry: return "drop_retry";
    case EventType::SixP: return "6p";
  }
  return "?";
}

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string RunTrace::to_csv() const {
  std::ostringstream os;
  os << "asn,event,node,peer,channel,uid,outcome\n";
  for (const Event& e : events) {
    if (e.type == EventType::SixP) {
      // asn,6p,kind,child,parent,requested,granted
      os << e.asn << ",6p," << (e.channel == 0 ? "add" : "delete") << ',' << e.node
         << ',' << e.peer << ',' << e.uid << ',' << e.outcome << '\n';
      continue;
    }
    os << e.asn << ',' << event_name(e.type) << ',' << e.node << ',';
    if (e.peer == kNoNode)
      os << '-';
    else
      os << e.peer;
    os << ',' << e.channel << ',' << e.uid << ',' << e.outcome << '\n';
  }
  return os.str();
}

RunMetrics aggregate(const RunTrace& trace) {
  if (trace.total_slots == 0 || trace.radio_on_slots.empty() || trace.events.empty())
    throw EmptyTrace("run trace is empty");

  RunMetrics m;
  std::unordered_map<std::int64_t, std::uint64_t> created;
  double delay_sum = 0.0;
  for (const Event& e : trace.events) {
    switch (e.type) {
      case EventType::Gen:
        ++m.generated_total;
        created[e.uid] = e.asn;
        break;
      case EventType::Deliver:
        ++m.received_total;
        delay_sum += static_cast<double>(e.asn - created.at(e.uid)) * kSlotMs;
        break;
      case EventType::DropQueue:
        ++m.queue_loss_total;
        break;
      case EventType::DropRetry:
        ++m.retry_loss_total;
        break;
      case EventType::Tx:
        if (e.outcome == static_cast<int>(TxOutcome::Collision) && e.data_slot)
          ++m.data_collisions;
        break;
      case EventType::SixP:
        break;
    }
  }
  if (m.generated_total > 0)
    m.pdr = static_cast<double>(m.received_total) / static_cast<double>(m.generated_total);
  if (m.received_total > 0) m.mean_e2e_delay_ms = delay_sum / m.received_total;
  if (trace.simulated_minutes > 0)
    m.lost_ppm = static_cast<double>(m.generated_total - m.received_total) /
                 trace.simulated_minutes;
  double duty = 0.0;
  for (std::uint64_t on : trace.radio_on_slots)
    duty += static_cast<double>(on) / static_cast<double>(trace.total_slots);
  m.duty_cycle = duty / static_cast<double>(trace.radio_on_slots.size());
  return m;
}

MetricsSummary summarize(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw EmptyTrace("no runs to summarize");
  MetricsSummary s;
  s.runs = runs.size();

  auto fields = [](const RunMetrics& m) {
    return std::vector<double>{m.pdr,
                               m.mean_e2e_delay_ms,
                               m.lost_ppm,
                               m.duty_cycle,
                               static_cast<double>(m.queue_loss_total),
                               static_cast<double>(m.received_total),
                               static_cast<double>(m.generated_total),
                               static_cast<double>(m.retry_loss_total),
                               static_cast<double>(m.data_collisions)};
  };
  std::size_t nf = fields(runs.front()).size();
  std::vector<double> mean(nf, 0.0), var(nf, 0.0);
  for (const RunMetrics& r : runs) {
    auto f = fields(r);
    for (std::size_t i = 0; i < nf; ++i) mean[i] += f[i];
  }
  for (double& v : mean) v /= static_cast<double>(runs.size());
  if (runs.size() > 1) {
    for (const RunMetrics& r : runs) {
      auto f = fields(r);
      for (std::size_t i = 0; i < nf; ++i) {
        double d = f[i] - mean[i];
        var[i] += d * d;
      }
    }
    for (double& v : var) v = std::sqrt(v / static_cast<double>(runs.size() - 1));
  }
  auto unpack = [](const std::vector<double>& f) {
    RunMetrics m;
    m.pdr = f[0];
    m.mean_e2e_delay_ms = f[1];
    m.lost_ppm = f[2];
    m.duty_cycle = f[3];
    m.queue_loss_total = static_cast<long long>(std::llround(f[4]));
    m.received_total = static_cast<long long>(std::llround(f[5]));
    m.generated_total = static_cast<long long>(std::llround(f[6]));
    m.retry_loss_total = static_cast<long long>(std::llround(f[7]));
    m.data_collisions = static_cast<long long>(std::llround(f[8]));
    return m;
  };
  s.mean = unpack(mean);
  s.stddev = unpack(var);
  return s;
}

std::string metrics_csv_header() {
  return "scenario_id,scheduler,seed,rate_ppm,dodag_size,slotframe_len,"
         "pdr,delay_ms,lost_ppm,duty_cycle,queue_loss,received";
}

std::string metrics_csv_row(const std::string& scenario_id, const std::string& scheduler,
                            std::uint64_t seed, double rate_ppm, int dodag_size,
                            int slotframe_len, const RunMetrics& m) {
  std::ostringstream os;
  os << scenario_id << ',' << scheduler << ',' << seed << ',' << fixed6(rate_ppm) << ','
     << dodag_size << ',' << slotframe_len << ',' << fixed6(m.pdr) << ','
     << fixed6(m.mean_e2e_delay_ms) << ',' << fixed6(m.lost_ppm) << ','
     << fixed6(m.duty_cycle) << ',' << m.queue_loss_total << ',' << m.received_total;
  return os.str();
}

std::string metrics_json_row(const std::string& scenario_id, const std::string& scheduler,
                             std::uint64_t seed, double rate_ppm, int dodag_size,
                             int slotframe_len, const RunMetrics& m) {
  nlohmann::json j{{"scenario_id", scenario_id},
                   {"scheduler", scheduler},
                   {"seed", seed},
                   {"rate_ppm", rate_ppm},
                   {"dodag_size", dodag_size},
                   {"slotframe_len", slotframe_len},
                   {"pdr", m.pdr},
                   {"delay_ms", m.mean_e2e_delay_ms},
                   {"lost_ppm", m.lost_ppm},
                   {"duty_cycle", m.duty_cycle},
                   {"queue_loss", m.queue_loss_total},
                   {"received", m.received_total}};
  return j.dump();
}

}  // namespace tsch
