#include "tscharena/channels.hpp"

#include <algorithm>
#include <sstream>

#include "tscharena/rng.hpp"

namespace tsch {

ChannelPlan allocate_channels(const Dodag& d, int num_channels, bool random_root,
                              std::uint64_t seed) {
  if (num_channels < 4)
    throw TooManyChildren("need at least 4 channels (broadcast + three-hop uniqueness)");
  for (NodeId i : d.members())
    if (static_cast<int>(d.children(i).size()) > num_channels - 3)
      throw TooManyChildren("node " + std::to_string(i) + " has " +
                            std::to_string(d.children(i).size()) +
                            " children, cap is " + std::to_string(num_channels - 3));

  ChannelPlan plan;
  plan.num_channels = num_channels;
  plan.f_bcast = 0;
  plan.to_parent.assign(d.total_nodes(), -1);
  plan.to_children.assign(d.total_nodes(), -1);

  // Root downlink: lowest offset in F \ {f_bcast}, or a seeded draw.
  if (random_root) {
    Rng rng(mix_seed(seed, d.root(), 0x6368616eull));
    plan.to_children[d.root()] = 1 + rng.next_int(num_channels - 1);
  } else {
    plan.to_children[d.root()] = 1;
  }

  for (NodeId i : d.bfs_order()) {
    // Children learn their uplink from i's EB, then ask for a downlink.
    std::vector<bool> taken(num_channels, false);
    taken[plan.f_bcast] = true;
    if (plan.to_parent[i] >= 0) taken[plan.to_parent[i]] = true;
    taken[plan.to_children[i]] = true;
    for (NodeId j : d.children(i)) {
      plan.to_parent[j] = plan.to_children[i];
      int offset = -1;
      for (int z = 0; z < num_channels; ++z)
        if (!taken[z]) {
          offset = z;
          break;
        }
      if (offset < 0) throw NoChannelAvailable("eligible channel set exhausted");
      taken[offset] = true;
      plan.to_children[j] = offset;
    }
  }
  return plan;
}

const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::ParentChildMismatch: return "ParentChildMismatch";
    case ViolationKind::BroadcastConflict: return "BroadcastConflict";
    case ViolationKind::SelfConflict: return "SelfConflict";
    case ViolationKind::SiblingConflict: return "SiblingConflict";
    case ViolationKind::ThreeHopConflict: return "ThreeHopConflict";
    case ViolationKind::MissingAssignment: return "MissingAssignment";
  }
  return "?";
}

std::vector<Violation> validate_channel_plan(const Dodag& d, const ChannelPlan& plan) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind k, NodeId a, NodeId b, std::string detail) {
    out.push_back({k, a, b, std::move(detail)});
  };
  for (NodeId i : d.members()) {
    bool has_children = !d.children(i).empty();
    if (!d.is_root(i) && plan.to_parent[i] < 0) {
      add(ViolationKind::MissingAssignment, i, kNoNode, "no uplink channel");
      continue;
    }
    if (!d.is_root(i)) {
      NodeId p = d.parent(i);
      if (plan.to_parent[i] != plan.to_children[p])
        add(ViolationKind::ParentChildMismatch, i, p,
            "uplink differs from parent's downlink");
      if (plan.to_parent[i] == plan.f_bcast)
        add(ViolationKind::BroadcastConflict, i, p, "uplink on broadcast channel");
    }
    if (has_children) {
      if (plan.to_children[i] < 0) {
        add(ViolationKind::MissingAssignment, i, kNoNode, "no downlink channel");
        continue;
      }
      if (plan.to_children[i] == plan.f_bcast)
        add(ViolationKind::BroadcastConflict, i, kNoNode,
            "downlink on broadcast channel");
      if (!d.is_root(i) && plan.to_children[i] == plan.to_parent[i])
        add(ViolationKind::SelfConflict, i, kNoNode, "downlink equals uplink");
      // three-hop uniqueness toward the grandparent side
      if (!d.is_root(i)) {
        NodeId p = d.parent(i);
        if (!d.is_root(p) && plan.to_children[i] == plan.to_parent[p])
          add(ViolationKind::ThreeHopConflict, i, p,
              "downlink equals parent's uplink");
        if (plan.to_children[i] == plan.to_children[p])
          add(ViolationKind::ThreeHopConflict, i, p,
              "downlink equals parent's downlink");
      }
      for (NodeId j : d.children(i))
        for (NodeId l : d.children(i)) {
          if (j >= l) continue;
          if (!d.children(j).empty() && !d.children(l).empty() &&
              plan.to_children[j] == plan.to_children[l])
            add(ViolationKind::SiblingConflict, j, l,
                "siblings share a downlink channel");
        }
    }
  }
  return out;
}

std::pair<AskChannelMessage, AskChannelMessage> ask_channel_exchange(
    const ChannelPlan& plan, NodeId parent, NodeId child, int seq) {
  if (plan.to_parent[child] < 0)
    throw NoChannelAvailable("child has not received the parent's EB yet");
  if (plan.to_children[child] < 0)
    throw NoChannelAvailable("no downlink channel assigned for child");
  AskChannelMessage req{AskChannelMessage::Kind::Request, child, parent, seq, -1};
  AskChannelMessage resp{AskChannelMessage::Kind::Response, parent, child, seq,
                         plan.to_children[child]};
  return {req, resp};
}

std::string plan_table(const ChannelPlan& plan, const Dodag& d) {
  std::ostringstream os;
  os << "node,parent,to_parent,to_children\n";
  for (NodeId i : d.bfs_order()) {
    os << i << ',';
    if (d.is_root(i))
      os << '-';
    else
      os << d.parent(i);
    os << ',' << plan.to_parent[i] << ',' << plan.to_children[i] << '\n';
  }
  return os.str();
}

}  // namespace tsch
