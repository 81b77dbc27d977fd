#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tscharena/topology.hpp"

namespace tsch {

// Channel offsets index the hopping sequence table F; value -1 means unassigned.
using ChannelOffset = int;

struct TooManyChildren : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoChannelAvailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-node frequency assignments. to_parent[i] is the offset node i uses
// toward its parent; to_children[i] the offset its children use toward i.
// Every node gets a to_children assignment so prospective children can be
// answered, even if it currently has none.
struct ChannelPlan {
  int num_channels = 0;
  ChannelOffset f_bcast = 0;
  std::vector<ChannelOffset> to_parent;    // -1 for roots / non-members
  std::vector<ChannelOffset> to_children;  // -1 for non-members
};

// Channel allocation walking the tree top-down: the root picks its receive
// channel from F minus the broadcast channel, then each parent hands every
// child the lowest offset outside {f_bcast, own uplink, own downlink} not
// taken by an earlier sibling. random_root draws the root channel from a
// seeded generator instead of taking the lowest eligible offset.
ChannelPlan allocate_channels(const Dodag& d, int num_channels,
                              bool random_root = false, std::uint64_t seed = 0);

enum class ViolationKind {
  ParentChildMismatch,  // to_parent[i] != to_children[parent(i)]
  BroadcastConflict,    // a unicast channel equals f_bcast
  SelfConflict,         // node receives from children on its own uplink channel
  SiblingConflict,      // two siblings share a downlink channel
  ThreeHopConflict,     // downlink collides with grandparent-side channels
  MissingAssignment,
};

struct Violation {
  ViolationKind kind;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  std::string detail;
};

const char* violation_name(ViolationKind k);

std::vector<Violation> validate_channel_plan(const Dodag& d, const ChannelPlan& plan);

struct AskChannelMessage {
  enum class Kind { Request, Response };
  Kind kind = Kind::Request;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  int seq_num = 0;
  ChannelOffset channel_offset = -1;  // Response only
};

// Models the EB / ASK-CHANNEL informing flow for one (parent, child) pair.
// The response carries the child's downlink channel from the plan; replaying
// the same seq yields an identical pair.
std::pair<AskChannelMessage, AskChannelMessage> ask_channel_exchange(
    const ChannelPlan& plan, NodeId parent, NodeId child, int seq);

// Human-readable table: node,parent,to_parent,to_children (one line per member).
std::string plan_table(const ChannelPlan& plan, const Dodag& d);

}  // namespace tsch
