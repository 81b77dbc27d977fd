#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tscharena/slotframe.hpp"
#include "tscharena/topology.hpp"

namespace tsch {

// Receiver-based Orchestra-style autonomous schedule: each node listens on its
// own hashed cell and transmits on its parent's; no 6P traffic, no adaptation.
struct OrchestraConfig {
  int unicast_len = 17;
  int broadcast_len = 31;
  int eb_len = 397;
};

// Fixed multiplicative mixer (splitmix-style constants), stable across runs.
std::uint64_t orchestra_hash(NodeId node);

// (slot offset, channel offset) of a node's receive cell in a frame of the
// given length; channels stay off the broadcast channel 0.
std::pair<int, int> orchestra_slot_of(NodeId node, int frame_len, int num_channels);

struct OrchestraSchedule {
  OrchestraConfig cfg;
  int num_channels = 0;
  // Per-node derived cells, indexed by NodeId.
  struct NodeCells {
    NodeId parent = kNoNode;                 // Tx peer (roots stay unset)
    int rx_offset = -1, rx_channel = 0;      // own unicast cell
    int tx_offset = -1, tx_channel = 0;      // parent's unicast cell (non-root)
    int bc_offset = -1;                      // broadcast frame listen cell
    int eb_offset = -1;                      // EB frame listen cell
  };
  std::vector<NodeCells> cells;

  // Resolved action for one node at an ASN. Unicast beats the control frames;
  // a Tx cell only fires when the caller reports a queued packet.
  Slot action_at(NodeId node, std::uint64_t asn, bool has_packet) const;

  std::string dump(const Dodag& d) const;
};

OrchestraSchedule build_orchestra_frames(const Dodag& d, const OrchestraConfig& cfg,
                                         int num_channels);

// Multi-DODAG variant; non-member entries of other trees must already be set.
void add_orchestra_frames(OrchestraSchedule& sched, const Dodag& d);

}  // namespace tsch
