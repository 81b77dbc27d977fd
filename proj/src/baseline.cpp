#include "tscharena/baseline.hpp"

#include <sstream>

namespace tsch {

std::uint64_t orchestra_hash(NodeId node) {
  std::uint64_t z = static_cast<std::uint64_t>(node) + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::pair<int, int> orchestra_slot_of(NodeId node, int frame_len, int num_channels) {
  std::uint64_t h = orchestra_hash(node);
  int offset = static_cast<int>(h % static_cast<std::uint64_t>(frame_len));
  int channel = 1 + static_cast<int>(h % static_cast<std::uint64_t>(num_channels - 1));
  return {offset, channel};
}

OrchestraSchedule build_orchestra_frames(const Dodag& d, const OrchestraConfig& cfg,
                                         int num_channels) {
  OrchestraSchedule s;
  s.cfg = cfg;
  s.num_channels = num_channels;
  s.cells.resize(d.total_nodes());
  add_orchestra_frames(s, d);
  return s;
}

void add_orchestra_frames(OrchestraSchedule& s, const Dodag& d) {
  for (NodeId i : d.members()) {
    auto& c = s.cells[i];
    auto [ro, rc] = orchestra_slot_of(i, s.cfg.unicast_len, s.num_channels);
    c.rx_offset = ro;
    c.rx_channel = rc;
    if (!d.is_root(i)) {
      auto [to, tc] = orchestra_slot_of(d.parent(i), s.cfg.unicast_len, s.num_channels);
      c.parent = d.parent(i);
      c.tx_offset = to;
      c.tx_channel = tc;
    }
    c.bc_offset = static_cast<int>(orchestra_hash(i) % s.cfg.broadcast_len);
    c.eb_offset = static_cast<int>(orchestra_hash(i) % s.cfg.eb_len);
  }
}

Slot OrchestraSchedule::action_at(NodeId node, std::uint64_t asn,
                                  bool has_packet) const {
  const NodeCells& c = cells[node];
  int uo = static_cast<int>(asn % cfg.unicast_len);
  // Tx with a pending packet beats the own Rx cell on a hash collision.
  if (c.tx_offset == uo && has_packet)
    return {SlotKind::UnicastData, SlotDir::Tx, c.parent, c.tx_channel};
  if (c.rx_offset == uo)
    return {SlotKind::UnicastData, SlotDir::Rx, kNoNode, c.rx_channel};
  if (static_cast<int>(asn % cfg.broadcast_len) == c.bc_offset)
    return {SlotKind::Broadcast, SlotDir::Rx, kNoNode, 0};
  if (static_cast<int>(asn % cfg.eb_len) == c.eb_offset)
    return {SlotKind::Broadcast, SlotDir::Rx, kNoNode, 0};
  return {};
}

std::string OrchestraSchedule::dump(const Dodag& d) const {
  std::ostringstream os;
  for (NodeId i : d.bfs_order()) {
    const NodeCells& c = cells[i];
    os << "#frame owner=" << i << " m=" << cfg.unicast_len << '\n';
    for (int o = 0; o < cfg.unicast_len; ++o) {
      if (o == c.rx_offset)
        os << o << ",unicastdata,rx,-," << c.rx_channel << '\n';
      else if (o == c.tx_offset)
        os << o << ",unicastdata,tx," << d.parent(i) << ',' << c.tx_channel << '\n';
      else
        os << o << ",sleep,-,-,0\n";
    }
  }
  return os.str();
}

}  // namespace tsch
