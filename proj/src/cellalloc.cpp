#include "tscharena/cellalloc.hpp"

#include <algorithm>

namespace tsch {

int compute_l_tx_min(int l_g, int l_tx_children, int l_tx_free) {
  return l_g + l_tx_children - l_tx_free;
}

RequestDecision should_request(int l_tx_min, int l_rx_parent) {
  RequestDecision d;
  if (l_tx_min <= 0 || l_rx_parent <= 0) {
    d.kind = RequestDecision::Kind::None;
    return d;
  }
  if (l_rx_parent <= l_tx_min) {
    d.kind = RequestDecision::Kind::Exact;
    d.count = l_rx_parent;
    return d;
  }
  d.kind = RequestDecision::Kind::Band;
  d.lo = l_tx_min;
  d.hi = l_rx_parent;
  return d;
}

bool rx_spacing_ok(const Slotframe& f) {
  std::vector<int> rx = f.offsets_of(SlotKind::UnicastData, SlotDir::Rx);
  if (rx.size() < 1) return true;
  std::vector<int> tx = f.offsets_of(SlotKind::UnicastData, SlotDir::Tx);
  if (tx.empty()) return false;  // some Rx but nothing to drain with
  if (rx.size() == 1) return true;
  // For each cyclically consecutive Rx pair, a Tx must sit strictly between.
  int m = f.size();
  for (std::size_t i = 0; i < rx.size(); ++i) {
    int a = rx[i];
    int b = rx[(i + 1) % rx.size()];
    int gap = (b - a + m) % m;  // cyclic distance a -> b
    bool found = false;
    for (int t : tx) {
      int dt = (t - a + m) % m;
      if (dt > 0 && dt < gap) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace {

// Non-cyclic Rx neighbors of offset o (peers of the nearest UnicastData Rx
// below and above o). Placement proceeds in ascending offsets, so the
// wrap-around pair settles once the last waiting child is served; checking it
// mid-construction would block the alternating pattern the rule is after.
std::pair<NodeId, NodeId> rx_neighbors(const Slotframe& f, int o) {
  int best_prev = -1, best_next = -1;
  for (int r : f.offsets_of(SlotKind::UnicastData, SlotDir::Rx)) {
    if (r < o && r > best_prev) best_prev = r;
    if (r > o && (best_next < 0 || r < best_next)) best_next = r;
  }
  NodeId pn = best_prev >= 0 ? f.at(best_prev).peer : kNoNode;
  NodeId nn = best_next >= 0 ? f.at(best_next).peer : kNoNode;
  return {pn, nn};
}

struct GrantContext {
  std::vector<Slotframe>* frames;
  const Dodag* d;
  NodeId parent;
  bool root;
  ChannelOffset channel;
};

// Candidate offsets ordered farthest-first from the frame's existing data
// cells (ties to the lower offset). Spreading keeps room for the interleaved
// Tx/Rx pattern the drain rules require; packing everything at the bottom
// would make later placements geometrically impossible.
std::vector<int> spread_order(const Slotframe& f) {
  std::vector<int> data;
  for (int o = 0; o < f.size(); ++o)
    if (f.at(o).kind == SlotKind::UnicastData) data.push_back(o);
  int m = f.size();
  std::vector<std::pair<int, int>> scored;  // (-distance, offset)
  for (int o = 0; o < m; ++o) {
    if (!f.is_free(o)) continue;
    int dist = m;
    for (int c : data) {
      int fwd = (o - c + m) % m;
      dist = std::min(dist, std::min(fwd, m - fwd));
    }
    scored.push_back({-dist, o});
  }
  std::sort(scored.begin(), scored.end());
  std::vector<int> out;
  out.reserve(scored.size());
  for (auto& [negd, o] : scored) out.push_back(o);
  return out;
}

// Try to place one Rx cell for `child`; returns the offset or -1.
// `others_waiting` switches on the fairness rule (c).
int try_grant_one(GrantContext& ctx, NodeId child, bool others_waiting,
                  bool check_child_frame) {
  Slotframe& pf = (*ctx.frames)[ctx.parent];
  int tx = pf.count(SlotKind::UnicastData, SlotDir::Tx);
  int rx = pf.count(SlotKind::UnicastData, SlotDir::Rx);
  if (!ctx.root && tx <= rx + 1) return -1;  // rule (a) after adding one Rx
  for (int o : spread_order(pf)) {
    if (check_child_frame && !(*ctx.frames)[child].is_free(o)) continue;
    if (others_waiting) {
      auto [prev_peer, next_peer] = rx_neighbors(pf, o);
      if (prev_peer == child || next_peer == child) continue;  // rule (c)
    }
    pf.allocate(o, {SlotKind::UnicastData, SlotDir::Rx, child, ctx.channel});
    if (!ctx.root && !rx_spacing_ok(pf)) {  // rule (b)
      pf.clear(o);
      continue;
    }
    if (check_child_frame)
      (*ctx.frames)[child].allocate(
          o, {SlotKind::UnicastData, SlotDir::Tx, ctx.parent, ctx.channel});
    return o;
  }
  return -1;
}

}  // namespace

std::map<NodeId, GrantResult> grant_rx_cells(
    std::vector<Slotframe>& frames, const Dodag& d, const ChannelPlan& plan,
    NodeId parent, const std::vector<std::pair<NodeId, int>>& pending) {
  GrantContext ctx{&frames, &d, parent, d.is_root(parent), plan.to_children[parent]};

  std::map<NodeId, GrantResult> results;
  std::vector<std::pair<NodeId, int>> queue = pending;  // (child, cells left)
  std::sort(queue.begin(), queue.end());
  for (auto& [c, n] : queue) results[c];  // ensure an entry per child

  // Round-robin one cell at a time. A child blocked on one pass stays in the
  // rotation — another child's placement can unblock it. Stop once a full
  // pass grants nothing; whoever is still short retries next period.
  bool progress = true;
  while (progress) {
    progress = false;
    int waiting = 0;
    for (auto& [c, left] : queue)
      if (left > 0) ++waiting;
    for (auto& [child, left] : queue) {
      if (left <= 0) continue;
      int o = try_grant_one(ctx, child, waiting > 1, true);
      if (o >= 0) {
        results[child].granted_offsets.push_back(o);
        ++results[child].granted_count;
        --left;
        progress = true;
      }
    }
  }
  return results;
}

int l_rx_available(const std::vector<Slotframe>& frames, const Dodag& d,
                   NodeId parent) {
  // Dry-run generic grants on a copy of the parent frame only.
  std::vector<Slotframe> scratch{frames[parent]};
  GrantContext ctx{&scratch, &d, 0, d.is_root(parent), 0};
  ctx.parent = 0;
  int n = 0;
  while (try_grant_one(ctx, kNoNode, false, false) >= 0) ++n;
  return n;
}

SixPResponse apply_six_p(std::vector<Slotframe>& frames, const Dodag& d,
                         const ChannelPlan& plan, SixPLinkState& link,
                         const SixPRequest& req) {
  if (req.seq_num == link.last_seq) return link.cached;  // duplicate: re-send

  SixPResponse resp;
  resp.src = req.dst;
  resp.dst = req.src;
  resp.seq_num = req.seq_num;

  if (req.kind == SixPRequest::Kind::Add) {
    auto granted = grant_rx_cells(frames, d, plan, req.dst,
                                  {{req.src, req.cell_count}});
    resp.grant = granted[req.src];
  } else {
    // Remove cells lowest offsets first; skip a removal that would break the
    // child frame's drain rules.
    Slotframe& child = frames[req.src];
    Slotframe& par = frames[req.dst];
    for (int o = 0; o < child.size() && resp.grant.granted_count < req.cell_count;
         ++o) {
      const Slot& s = child.at(o);
      if (s.kind != SlotKind::UnicastData || s.dir != SlotDir::Tx || s.peer != req.dst)
        continue;
      Slot saved_c = child.at(o), saved_p = par.at(o);
      child.clear(o);
      par.clear(o);
      int ctx_ = child.count(SlotKind::UnicastData, SlotDir::Tx);
      int crx = child.count(SlotKind::UnicastData, SlotDir::Rx);
      bool ok = (crx == 0 || ctx_ > crx) && rx_spacing_ok(child);
      if (!ok) {
        child.allocate(o, saved_c);
        par.allocate(o, saved_p);
        continue;
      }
      resp.grant.granted_offsets.push_back(o);
      ++resp.grant.granted_count;
    }
  }

  link.last_seq = req.seq_num;
  link.cached = resp;
  return resp;
}

std::vector<std::string> lint_frames(const std::vector<Slotframe>& frames,
                                     const Dodag& d) {
  std::vector<std::string> out;
  for (NodeId i : d.members()) {
    const Slotframe& f = frames[i];
    int tx = f.count(SlotKind::UnicastData, SlotDir::Tx);
    int rx = f.count(SlotKind::UnicastData, SlotDir::Rx);
    if (!d.is_root(i)) {
      if (rx > 0 && tx <= rx)
        out.push_back("node " + std::to_string(i) + ": Tx (" + std::to_string(tx) +
                      ") not above Rx (" + std::to_string(rx) + ")");
      if (!rx_spacing_ok(f))
        out.push_back("node " + std::to_string(i) +
                      ": consecutive Rx offsets without a Tx between them");
    }
    // Parent Rx offsets must equal the union of children's Tx offsets.
    for (int o = 0; o < f.size(); ++o) {
      const Slot& s = f.at(o);
      if (s.kind == SlotKind::UnicastData && s.dir == SlotDir::Rx) {
        const Slot& cs = frames[s.peer].at(o);
        if (cs.kind != SlotKind::UnicastData || cs.dir != SlotDir::Tx ||
            cs.peer != i)
          out.push_back("node " + std::to_string(i) + " offset " + std::to_string(o) +
                        ": Rx has no matching Tx in child " + std::to_string(s.peer));
      }
      if (s.kind == SlotKind::UnicastData && s.dir == SlotDir::Tx) {
        const Slot& ps = frames[s.peer].at(o);
        if (ps.kind != SlotKind::UnicastData || ps.dir != SlotDir::Rx ||
            ps.peer != i)
          out.push_back("node " + std::to_string(i) + " offset " + std::to_string(o) +
                        ": Tx has no matching Rx in parent " + std::to_string(s.peer));
      }
    }
  }
  return out;
}

}  // namespace tsch
