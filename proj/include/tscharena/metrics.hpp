#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscharena/topology.hpp"

namespace tsch {

struct EmptyTrace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kSlotMs = 15.0;

enum class EventType {
  Gen,        // packet created at node
  Tx,         // transmission attempt (outcome below)
  Deliver,    // packet reached a root
  DropQueue,  // tail drop on a full queue
  DropRetry,  // retry budget exhausted
  SixP,       // 6P transaction (node=child, peer=parent)
};

enum class TxOutcome { Ok = 0, Collision = 1, ChannelLoss = 2, NoListener = 3 };

struct Event {
  std::uint64_t asn = 0;
  EventType type = EventType::Gen;
  NodeId node = kNoNode;
  NodeId peer = kNoNode;
  int channel = -1;        // physical channel; for SixP: 0 = add, 1 = delete
  std::int64_t uid = -1;   // packet uid; for SixP: requested count
  int outcome = 0;         // TxOutcome; for SixP: granted count
  bool data_slot = false;  // Tx in a dedicated UnicastData cell (vs shared)
};

// Complete record of one run: the event stream plus per-node radio accounting.
struct RunTrace {
  std::vector<Event> events;
  std::vector<std::uint64_t> radio_on_slots;  // per node
  std::uint64_t total_slots = 0;
  double simulated_minutes = 0.0;
  std::string to_csv() const;  // asn,event,node,peer,channel,uid,outcome
};

struct RunMetrics {
  double pdr = 0.0;
  double mean_e2e_delay_ms = 0.0;
  double lost_ppm = 0.0;
  double duty_cycle = 0.0;
  long long queue_loss_total = 0;
  long long received_total = 0;
  long long generated_total = 0;
  long long retry_loss_total = 0;
  long long data_collisions = 0;  // collisions on dedicated unicast-data cells
};

// Recompute the run metrics from the trace; pure and idempotent.
RunMetrics aggregate(const RunTrace& trace);

struct MetricsSummary {
  RunMetrics mean;
  RunMetrics stddev;  // sample stddev, 0 for a single run
  std::size_t runs = 0;
};

MetricsSummary summarize(const std::vector<RunMetrics>& runs);

// One row of the per-run CSV. Header:
//   scenario_id,scheduler,seed,rate_ppm,dodag_size,slotframe_len,
//   pdr,delay_ms,lost_ppm,duty_cycle,queue_loss,received
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& scenario_id, const std::string& scheduler,
                            std::uint64_t seed, double rate_ppm, int dodag_size,
                            int slotframe_len, const RunMetrics& m);
std::string metrics_json_row(const std::string& scenario_id, const std::string& scheduler,
                             std::uint64_t seed, double rate_ppm, int dodag_size,
                             int slotframe_len, const RunMetrics& m);

}  // namespace tsch
