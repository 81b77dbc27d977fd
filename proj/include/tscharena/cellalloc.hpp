#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscharena/slotframe.hpp"

namespace tsch {

struct SixPRequest {
  enum class Kind { Add, Delete };
  Kind kind = Kind::Add;
  NodeId src = kNoNode;  // child
  NodeId dst = kNoNode;  // parent
  int cell_count = 1;
  int seq_num = 0;
};

struct GrantResult {
  std::vector<int> granted_offsets;
  int granted_count = 0;
};

struct DioAdvert {
  NodeId src = kNoNode;
  int l_rx_available = 0;
};

struct SixPResponse {
  NodeId src = kNoNode;  // parent
  NodeId dst = kNoNode;  // child
  int seq_num = 0;
  GrantResult grant;  // for Delete: removed offsets
};

// Per-(child,parent) transaction bookkeeping: one in-flight transaction,
// duplicate seq resends the cached response.
struct SixPLinkState {
  int last_seq = -1;
  SixPResponse cached;
};

// Minimum required Tx cells: generation demand plus children's pending
// requests minus current surplus; negative means surplus.
int compute_l_tx_min(int l_g, int l_tx_children, int l_tx_free);

struct RequestDecision {
  enum class Kind { None, Exact, Band };
  Kind kind = Kind::None;
  int count = 0;  // Exact
  int lo = 0, hi = 0;  // Band: hand [lo,hi] to the game solver
};

RequestDecision should_request(int l_tx_min, int l_rx_parent);

// Parent-side grant of UnicastData cells to requesting children. Grants
// interleave round-robin in child-id order; each placement keeps the parent's
// frame rule-clean: Tx stays strictly above Rx (root exempt), every two
// cyclically consecutive Rx offsets keep a Tx between them, and no child
// takes two cyclically consecutive Rx offsets while another still waits.
// Offsets must be Sleep in both frames; lowest eligible offset wins.
// A child that cannot be granted ends with granted_count 0 (retries next
// period).
std::map<NodeId, GrantResult> grant_rx_cells(
    std::vector<Slotframe>& frames, const Dodag& d, const ChannelPlan& plan,
    NodeId parent, const std::vector<std::pair<NodeId, int>>& pending);

// Grantable Rx capacity the parent advertises in its DIO: how many further
// Rx cells fit its frame under the rules above, ignoring which child asks.
int l_rx_available(const std::vector<Slotframe>& frames, const Dodag& d, NodeId parent);

// One 6P transaction. Add routes through grant_rx_cells; Delete removes up to
// cell_count UnicastData cells from both frames, lowest offsets first,
// skipping removals that would break the child frame's rules.
SixPResponse apply_six_p(std::vector<Slotframe>& frames, const Dodag& d,
                         const ChannelPlan& plan, SixPLinkState& link,
                         const SixPRequest& req);

// Frame linter used by tests, the lint subcommand and debug assertions.
// Checks Tx>Rx (non-root frames with Rx>0), the cyclic Tx-between-Rx rule,
// and parent/child frame consistency. Returns one message per violation.
std::vector<std::string> lint_frames(const std::vector<Slotframe>& frames,
                                     const Dodag& d);

// Cyclic rule check for a single frame, exposed for grant-time filtering.
bool rx_spacing_ok(const Slotframe& f);

}  // namespace tsch
