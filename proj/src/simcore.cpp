#include "tscharena/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tsch {

const char* scheduler_name(Scheduler s) {
  return s == Scheduler::GtTsch ? "gt-tsch" : "orchestra";
}

double backoff_probability(int backoff_exp) {
  int be = std::clamp(backoff_exp, 0, 5);
  return 1.0 / static_cast<double>(1 << be);
}

int next_backoff(int backoff_exp) {
  if (backoff_exp <= 0) return 1;
  return std::min(backoff_exp * 2, 5);
}

namespace {

constexpr std::uint64_t kStreamTraffic = 1;
constexpr std::uint64_t kStreamBackoff = 2;
constexpr std::uint64_t kStreamChannel = 3;

struct TxAttempt {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  int phys = -1;
  double prr = 1.0;
  bool data_slot = false;
  bool contention = false;  // BE doubles on collision
};

}  // namespace

void Engine::validate(const Scenario& sc) const {
  if (sc.total_nodes == 0) throw ConfigError("total_nodes must be positive");
  if (sc.roots.empty()) throw ConfigError("at least one root required");
  std::set<NodeId> seen;
  for (NodeId r : sc.roots) {
    if (r >= sc.total_nodes) throw ConfigError("root id out of range");
    if (!seen.insert(r).second) throw ConfigError("duplicate root id");
  }
  for (const Link& l : sc.links)
    if (l.src >= sc.total_nodes || l.dst >= sc.total_nodes)
      throw ConfigError("link endpoint out of range");
  if (!sc.coords.empty() && sc.coords.size() != sc.total_nodes)
    throw ConfigError("coords must cover every node");
  if (!sc.coords.empty() && sc.range <= 0) throw ConfigError("range must be positive");
  if (sc.max_children < 1) throw ConfigError("max_children must be >= 1");
  if (sc.num_channels < 4) throw ConfigError("need at least 4 channels");
  if (sc.m < 2) throw ConfigError("slotframe size must be >= 2");
  if (sc.k < 1 || sc.k >= sc.m) throw ConfigError("need 1 <= k < m");
  if (sc.rate_ppm < 0) throw ConfigError("rate_ppm must be non-negative");
  if (sc.duration_minutes <= 0) throw ConfigError("duration must be positive");
  if (sc.game.q_max < 1) throw ConfigError("q_max must be >= 1");
  if (sc.max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (sc.game.alpha <= 0) throw ConfigError("alpha must be positive");
  if (sc.orchestra.unicast_len < 1 || sc.orchestra.broadcast_len < 1 ||
      sc.orchestra.eb_len < 1)
    throw ConfigError("orchestra slotframe lengths must be positive");
}

Engine::Engine(const Scenario& sc) : sc_(sc), chan_rng_(mix_seed(sc.seed, 0, kStreamChannel)) {
  validate(sc_);
  build_topology();
  build_schedules();

  update_period_ = sc_.update_period == 0 ? sc_.m : sc_.update_period;

  std::size_t n = sc_.total_nodes;
  nodes_.resize(n);
  node_dropped_queue_.assign(n, 0);
  next_gen_.assign(n, 0.0);
  next_gen_asn_.assign(n, -1);
  trace_.radio_on_slots.assign(members_.size(), 0);

  for (NodeId i = 0; i < n; ++i) {
    traffic_rng_.emplace_back(mix_seed(sc_.seed, i, kStreamTraffic));
    backoff_rng_.emplace_back(mix_seed(sc_.seed, i, kStreamBackoff));
    nodes_[i].backoff_exp = sc_.scheduler == Scheduler::GtTsch ? 1 : 0;
  }

  if (sc_.rate_ppm > 0) {
    double interval = kSlotsPerMinute / sc_.rate_ppm;
    for (NodeId i : members_) {
      if (dodag_of(i).is_root(i)) continue;
      next_gen_[i] = interval * traffic_rng_[i].next_double();  // seeded phase
      int jitter = traffic_rng_[i].next_int(3) - 1;
      next_gen_asn_[i] =
          std::max<std::int64_t>(0, std::llround(next_gen_[i]) + jitter);
    }
  }
}

void Engine::build_topology() {
  std::vector<Link> links = sc_.links;
  if (links.empty() && !sc_.coords.empty()) {
    // links_from_coords emits one record per pair; radio links are symmetric.
    for (const Link& l : links_from_coords(sc_.coords, sc_.range, sc_.link_prr)) {
      links.push_back(l);
      links.push_back({l.dst, l.src, l.prr});
    }
  }
  if (links.empty() && sc_.total_nodes > 1)
    throw ConfigError("no links given for a multi-node topology");

  forest_ = build_forest(sc_.total_nodes, links, sc_.roots, sc_.max_children);
  dodag_index_.assign(sc_.total_nodes, 0);
  for (std::size_t di = 0; di < forest_.size(); ++di)
    for (NodeId i : forest_[di].members()) {
      dodag_index_[i] = di;
      members_.push_back(i);
    }
  std::sort(members_.begin(), members_.end());

  audible_.assign(sc_.total_nodes, std::vector<std::uint8_t>(sc_.total_nodes, 0));
  for (const Link& l : links) {
    audible_[l.src][l.dst] = 1;
    prr_[{l.src, l.dst}] = l.prr;
  }
  if (!sc_.coords.empty() && sc_.interference_multiplier > 1.0) {
    double ir = sc_.range * sc_.interference_multiplier;
    for (NodeId a = 0; a < sc_.total_nodes; ++a)
      for (NodeId b = 0; b < sc_.total_nodes; ++b) {
        if (a == b) continue;
        double dx = sc_.coords[a].x - sc_.coords[b].x;
        double dy = sc_.coords[a].y - sc_.coords[b].y;
        if (std::sqrt(dx * dx + dy * dy) <= ir) audible_[a][b] = 1;
      }
  }
}

void Engine::build_schedules() {
  if (sc_.scheduler == Scheduler::Orchestra) {
    orch_ = build_orchestra_frames(forest_[0], sc_.orchestra, sc_.num_channels);
    for (std::size_t di = 1; di < forest_.size(); ++di)
      add_orchestra_frames(orch_, forest_[di]);
    return;
  }

  frames_.resize(sc_.total_nodes);
  int per_link = sc_.per_link > 0 ? sc_.per_link : default_per_link(sc_.m);
  int shared_mc =
      sc_.shared_per_parent >= 0 ? 2 * sc_.shared_per_parent : sc_.max_children;
  for (std::size_t di = 0; di < forest_.size(); ++di) {
    const Dodag& d = forest_[di];
    ChannelPlan plan = allocate_channels(d, sc_.num_channels);
    auto violations = validate_channel_plan(d, plan);
    if (!violations.empty())
      throw ConfigError("channel plan failed validation: " + violations.front().detail);
    for (NodeId i : d.members()) frames_[i] = init_slotframe(sc_.m, sc_.k, i, plan.f_bcast);
    allocate_6p_slots(frames_, d, plan, per_link);
    if (shared_mc > 0) allocate_shared_slots(frames_, d, plan, shared_mc);
    plans_.push_back(std::move(plan));
  }
  refresh_adverts();
}

int Engine::phys_channel(int offset) const {
  return static_cast<int>((static_cast<std::uint64_t>(offset) + asn_) %
                          static_cast<std::uint64_t>(sc_.num_channels));
}

bool Engine::audible(NodeId from, NodeId at) const {
  return audible_[from][at] != 0;
}

double Engine::prr(NodeId from, NodeId to) const {
  auto it = prr_.find({from, to});
  return it == prr_.end() ? 1.0 : it->second;
}

void Engine::refresh_adverts() {
  if (nodes_.empty()) nodes_.resize(sc_.total_nodes);
  for (const Dodag& d : forest_)
    for (NodeId i : d.members())
      nodes_[i].advert =
          d.children(i).empty() ? 0 : l_rx_available(frames_, d, i);
}

void Engine::preload(NodeId node, int count) {
  for (int c = 0; c < count; ++c) {
    Packet p{next_uid_++, node, asn_, 0};
    ++generated_;
    trace_.events.push_back({asn_, EventType::Gen, node, kNoNode, -1, p.uid, 0, false});
    if (static_cast<int>(nodes_[node].queue.size()) >= sc_.game.q_max) {
      ++dropped_queue_;
      ++node_dropped_queue_[node];
      trace_.events.push_back(
          {asn_, EventType::DropQueue, node, kNoNode, -1, p.uid, 0, false});
    } else {
      nodes_[node].queue.push_back(p);
    }
  }
}

void Engine::generate_traffic() {
  if (!traffic_enabled_ || sc_.rate_ppm <= 0) return;
  double interval = kSlotsPerMinute / sc_.rate_ppm;
  for (NodeId i : members_) {
    if (dodag_of(i).is_root(i)) continue;
    while (next_gen_asn_[i] >= 0 &&
           next_gen_asn_[i] <= static_cast<std::int64_t>(asn_)) {
      preload(i, 1);
      next_gen_[i] += interval;
      int jitter = traffic_rng_[i].next_int(3) - 1;
      next_gen_asn_[i] = std::llround(next_gen_[i]) + jitter;
    }
  }
}

void Engine::deliver_or_forward(NodeId from, NodeId to, Packet pkt) {
  if (dodag_of(to).is_root(to)) {
    ++delivered_;
    trace_.events.push_back(
        {asn_, EventType::Deliver, to, from, -1, pkt.uid, 0, false});
    return;
  }
  if (static_cast<int>(nodes_[to].queue.size()) >= sc_.game.q_max) {
    ++dropped_queue_;
    ++node_dropped_queue_[to];
    trace_.events.push_back(
        {asn_, EventType::DropQueue, to, from, -1, pkt.uid, 0, false});
    return;
  }
  pkt.attempts_this_hop = 0;
  nodes_[to].queue.push_back(pkt);
}

void Engine::gather_and_resolve() {
  std::vector<TxAttempt> txs;
  std::vector<int> listening(sc_.total_nodes, -1);

  auto radio_on = [&](std::size_t member_idx) { ++trace_.radio_on_slots[member_idx]; };

  for (std::size_t mi = 0; mi < members_.size(); ++mi) {
    NodeId i = members_[mi];
    NodeState& ns = nodes_[i];
    bool has_packet = !ns.queue.empty();

    Slot slot;
    if (sc_.scheduler == Scheduler::GtTsch)
      slot = frames_[i].action_at(asn_);
    else
      slot = orch_.action_at(i, asn_, has_packet);

    switch (slot.kind) {
      case SlotKind::Broadcast:
        radio_on(mi);  // EB / DIO listening; no data payload modeled
        break;
      case SlotKind::Unicast6P:
        if (slot.dir == SlotDir::Rx) {
          radio_on(mi);
        } else if (ns.six_p_pending) {
          radio_on(mi);
          ns.six_p_pending = false;  // one signalling exchange per period
        }
        break;
      case SlotKind::UnicastData:
        if (slot.dir == SlotDir::Rx) {
          radio_on(mi);
          listening[i] = phys_channel(slot.channel);
        } else if (has_packet) {
          NodeId dst = sc_.scheduler == Scheduler::GtTsch ? slot.peer
                                                          : dodag_of(i).parent(i);
          bool contention = sc_.scheduler == Scheduler::Orchestra;
          if (contention &&
              !backoff_rng_[i].bernoulli(backoff_probability(ns.backoff_exp)))
            break;
          radio_on(mi);
          txs.push_back({i, dst, phys_channel(slot.channel), prr(i, dst), true,
                         contention});
        }
        break;
      case SlotKind::Shared:
        if (slot.dir == SlotDir::Rx) {
          radio_on(mi);
          listening[i] = phys_channel(slot.channel);
        } else if (has_packet &&
                   backoff_rng_[i].bernoulli(backoff_probability(ns.backoff_exp))) {
          radio_on(mi);
          txs.push_back({i, slot.peer, phys_channel(slot.channel), prr(i, slot.peer),
                         false, true});
        }
        break;
      case SlotKind::Sleep:
        break;
    }
  }

  int base_be = sc_.scheduler == Scheduler::GtTsch ? 1 : 0;
  for (const TxAttempt& t : txs) {
    TxOutcome out;
    if (listening[t.dst] != t.phys) {
      out = TxOutcome::NoListener;
    } else {
      bool collided = false;
      for (const TxAttempt& o : txs) {
        if (o.src == t.src) continue;
        if (o.phys == t.phys && audible(o.src, t.dst)) {
          collided = true;
          break;
        }
      }
      if (collided)
        out = TxOutcome::Collision;
      else
        out = chan_rng_.bernoulli(t.prr) ? TxOutcome::Ok : TxOutcome::ChannelLoss;
    }

    NodeState& src = nodes_[t.src];
    Packet& head = src.queue.front();
    trace_.events.push_back({asn_, EventType::Tx, t.src, t.dst, t.phys, head.uid,
                             static_cast<int>(out), t.data_slot});
    ++src.uplink.attempts;

    if (out == TxOutcome::Ok) {
      ++src.uplink.successes;
      src.backoff_exp = base_be;
      Packet pkt = head;
      src.queue.pop_front();
      deliver_or_forward(t.src, t.dst, pkt);
      continue;
    }
    if (t.contention && out == TxOutcome::Collision)
      src.backoff_exp = next_backoff(src.backoff_exp);
    ++head.attempts_this_hop;
    if (head.attempts_this_hop > sc_.max_retries) {
      ++dropped_retry_;
      trace_.events.push_back(
          {asn_, EventType::DropRetry, t.src, t.dst, -1, head.uid, 0, false});
      src.queue.pop_front();
      src.backoff_exp = base_be;
    }
  }
}

void Engine::adapt() {
  double demand = sc_.rate_ppm * update_period_ / kSlotsPerMinute;
  int l_g = sc_.rate_ppm <= 0 ? 0 : static_cast<int>(std::ceil(demand - 1e-9));

  for (std::size_t di = 0; di < forest_.size(); ++di) {
    const Dodag& d = forest_[di];
    const auto& order = d.bfs_order();

    // Leaves first: queue metric, ETX, demand, request decision.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId i = *it;
      NodeState& ns = nodes_[i];
      ns.demand = 0;
      ns.pending_add = 0;
      ns.pending_del = 0;
      if (d.is_root(i)) continue;
      ns.q_ewma = game::ewma_queue(ns.q_ewma, static_cast<int>(ns.queue.size()),
                                   sc_.game.zeta);
      ns.etx = estimate_etx(ns.uplink, sc_.etx_smoothing);
      int tx = frames_[i].count(SlotKind::UnicastData, SlotDir::Tx);
      int rx = frames_[i].count(SlotKind::UnicastData, SlotDir::Rx);
      // Children report their unmet need even when their own parent (this
      // node) cannot grant yet; that is what pulls capacity down the tree.
      int l_tx_children = 0;
      for (NodeId c : d.children(i)) l_tx_children += nodes_[c].demand;
      int l_tx_min = compute_l_tx_min(l_g, l_tx_children, tx - rx);
      ns.demand = std::max(0, l_tx_min);
      if (l_tx_min <= -2) {
        ns.pending_del = -l_tx_min - 1;
        continue;
      }
      RequestDecision dec = should_request(l_tx_min, nodes_[d.parent(i)].advert);
      switch (dec.kind) {
        case RequestDecision::Kind::None:
          break;
        case RequestDecision::Kind::Exact:
          ns.pending_add = dec.count;
          break;
        case RequestDecision::Kind::Band: {
          game::NodeGameView view{rank_bar(d, i), ns.etx, ns.q_ewma, dec.lo, dec.hi};
          ns.pending_add = game::optimal_l_tx(view, sc_.game);
          break;
        }
      }
    }

    // Root first: parents grant, then their children grant further down.
    for (NodeId p : order) {
      std::vector<std::pair<NodeId, int>> adds;
      for (NodeId c : d.children(p))
        if (nodes_[c].pending_add > 0) adds.push_back({c, nodes_[c].pending_add});
      if (!adds.empty()) {
        auto results = grant_rx_cells(frames_, d, plans_[di], p, adds);
        for (const auto& [c, requested] : adds) {
          trace_.events.push_back({asn_, EventType::SixP, c, p, 0, requested,
                                   results[c].granted_count, false});
          nodes_[c].six_p_pending = true;
        }
      }
      for (NodeId c : d.children(p)) {
        if (nodes_[c].pending_del <= 0) continue;
        SixPLinkState& link = six_p_links_[{c, p}];
        SixPRequest req{SixPRequest::Kind::Delete, c, p, nodes_[c].pending_del,
                        link.last_seq + 1};
        SixPResponse resp = apply_six_p(frames_, d, plans_[di], link, req);
        trace_.events.push_back({asn_, EventType::SixP, c, p, 1, req.cell_count,
                                 resp.grant.granted_count, false});
        nodes_[c].six_p_pending = true;
      }
    }
  }
  refresh_adverts();
}

void Engine::step() {
  if (sc_.scheduler == Scheduler::GtTsch && update_period_ > 0 &&
      asn_ % static_cast<std::uint64_t>(update_period_) == 0)
    adapt();
  gather_and_resolve();
  generate_traffic();
  ++asn_;
}

void Engine::run_slots(std::uint64_t n) {
  for (std::uint64_t s = 0; s < n; ++s) step();
}

long long Engine::resident() const {
  long long n = 0;
  for (const NodeState& ns : nodes_) n += static_cast<long long>(ns.queue.size());
  return n;
}

RunMetrics Engine::finalize() {
  if (finalized_) throw std::logic_error("finalize called twice");
  finalized_ = true;
  trace_.total_slots = asn_;
  trace_.simulated_minutes = static_cast<double>(asn_) / kSlotsPerMinute;
  long long balance = delivered_ + dropped_queue_ + dropped_retry_ + resident();
  if (generated_ != balance)
    throw std::logic_error("packet conservation violated: generated " +
                           std::to_string(generated_) + " != accounted " +
                           std::to_string(balance));
  return aggregate(trace_);
}

RunResult run(const Scenario& sc) {
  Engine e(sc);
  e.run_slots(static_cast<std::uint64_t>(std::llround(sc.duration_minutes * kSlotsPerMinute)));
  if (sc.drain_minutes > 0) {
    e.set_traffic_enabled(false);
    e.run_slots(static_cast<std::uint64_t>(std::llround(sc.drain_minutes * kSlotsPerMinute)));
  }
  RunMetrics m = e.finalize();
  return {m, e.trace()};
}

}  // namespace tsch
