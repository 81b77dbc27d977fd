#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscharena/baseline.hpp"
#include "tscharena/cellalloc.hpp"
#include "tscharena/channels.hpp"
#include "tscharena/game.hpp"
#include "tscharena/metrics.hpp"
#include "tscharena/rng.hpp"
#include "tscharena/slotframe.hpp"
#include "tscharena/topology.hpp"

namespace tsch {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default 8-entry hopping sequence; collisions are decided on the physical
// index, the frequency labels are only used for display.
inline constexpr std::array<int, 8> kDefaultHoppingSeq = {17, 23, 15, 25, 19, 11, 13, 21};

inline constexpr double kSlotsPerMinute = 4000.0;  // 60 s / 15 ms

enum class Scheduler { GtTsch, Orchestra };

const char* scheduler_name(Scheduler s);

struct Packet {
  std::int64_t uid = -1;
  NodeId source = kNoNode;
  std::uint64_t created_asn = 0;
  int attempts_this_hop = 0;
};

struct Scenario {
  std::string id = "scenario";

  // topology
  std::size_t total_nodes = 0;
  std::vector<Link> links;          // explicit links (symmetric pairs expected)
  std::vector<Coord> coords;        // alternative: unit-disk from coordinates
  double range = 0.0;               // used with coords
  double link_prr = 1.0;            // prr applied to coordinate-derived links
  std::vector<NodeId> roots;        // one per connected component
  int max_children = 5;

  // radio
  int num_channels = 8;
  double interference_multiplier = 1.0;  // coords mode only

  // schedule
  Scheduler scheduler = Scheduler::GtTsch;
  int m = 32;
  int k = 4;
  int per_link = 0;          // 0: default_per_link(m)
  int shared_per_parent = -1;  // -1: ceil(max_children / 2)
  OrchestraConfig orchestra;

  // traffic: per non-root node, packets per minute (0 disables generation)
  double rate_ppm = 60.0;

  // game / queues (game.q_max is the queue capacity everywhere)
  game::GameParams game;

  // run
  double duration_minutes = 1.0;
  double drain_minutes = 0.0;  // extra generation-free slots at the end
  int update_period = 0;  // slots; 0: one slotframe; negative: adaptation off
  std::uint64_t seed = 1;
  int max_retries = 4;
  double etx_smoothing = 0.5;
};

// Deterministic slot-driven engine. A run is a pure function of the Scenario;
// the mutation hooks (frames(), preload()) exist for schedule-replay tests.
class Engine {
 public:
  explicit Engine(const Scenario& sc);

  void step();                       // one slot
  void run_slots(std::uint64_t n);
  std::uint64_t asn() const { return asn_; }

  // Conservation check + trace bookkeeping; call once after the last step.
  RunMetrics finalize();

  const RunTrace& trace() const { return trace_; }
  const std::vector<Dodag>& forest() const { return forest_; }
  const ChannelPlan& plan(std::size_t dodag) const { return plans_[dodag]; }
  std::vector<Slotframe>& frames() { return frames_; }
  const std::vector<Slotframe>& frames() const { return frames_; }
  const OrchestraSchedule& orchestra() const { return orch_; }

  long long resident() const;           // packets still queued
  long long generated() const { return generated_; }
  long long delivered() const { return delivered_; }
  long long dropped_queue() const { return dropped_queue_; }
  long long dropped_queue(NodeId i) const { return node_dropped_queue_[i]; }
  long long dropped_retry() const { return dropped_retry_; }

  // Test hooks: inject count packets into a node's queue (queue cap applies).
  void preload(NodeId node, int count);
  void set_traffic_enabled(bool on) { traffic_enabled_ = on; }
  // Recompute DIO adverts from the current frames (after hand-edited frames).
  void refresh_adverts();

 private:
  struct NodeState {
    std::deque<Packet> queue;
    double q_ewma = 0.0;
    LinkHistory uplink;
    double etx = kEtxMax;
    int backoff_exp = 0;  // shared-slot / contention backoff exponent
    bool six_p_pending = false;
    int demand = 0;  // unmet cell need, propagated upward even when ungrantable
    int pending_add = 0;
    int pending_del = 0;
    int advert = 0;  // grantable Rx capacity published in the last DIO
  };

  void validate(const Scenario& sc) const;
  void build_topology();
  void build_schedules();
  int phys_channel(int offset) const;
  bool audible(NodeId from, NodeId at) const;
  double prr(NodeId from, NodeId to) const;
  const Dodag& dodag_of(NodeId i) const { return forest_[dodag_index_[i]]; }

  void adapt();       // period-synchronous 6P round (GT only)
  void gather_and_resolve();
  void generate_traffic();
  void deliver_or_forward(NodeId from, NodeId to, Packet pkt);

  Scenario sc_;
  std::vector<Dodag> forest_;
  std::vector<std::size_t> dodag_index_;
  std::vector<ChannelPlan> plans_;
  std::vector<Slotframe> frames_;
  OrchestraSchedule orch_;
  std::vector<NodeId> members_;  // all member nodes, ascending id
  std::vector<std::vector<std::uint8_t>> audible_;
  std::map<std::pair<NodeId, NodeId>, double> prr_;
  std::map<std::pair<NodeId, NodeId>, SixPLinkState> six_p_links_;

  std::vector<NodeState> nodes_;
  std::vector<Rng> traffic_rng_;
  std::vector<Rng> backoff_rng_;
  std::vector<double> next_gen_;  // fractional next generation time, in slots
  std::vector<std::int64_t> next_gen_asn_;
  Rng chan_rng_;

  std::uint64_t asn_ = 0;
  int update_period_ = 0;
  bool traffic_enabled_ = true;
  std::int64_t next_uid_ = 0;
  long long generated_ = 0;
  long long delivered_ = 0;
  long long dropped_queue_ = 0;
  long long dropped_retry_ = 0;
  std::vector<long long> node_dropped_queue_;
  RunTrace trace_;
  bool finalized_ = false;
};

struct RunResult {
  RunMetrics metrics;
  RunTrace trace;
};

// Run a scenario start to finish: duration_minutes * 4000 slots.
RunResult run(const Scenario& sc);

// Shared-slot contention primitives (802.15.4-flavored binary backoff).
double backoff_probability(int backoff_exp);    // 2^-BE, BE clamped to [0, 5]
int next_backoff(int backoff_exp);              // doubling, saturates at 5

}  // namespace tsch
