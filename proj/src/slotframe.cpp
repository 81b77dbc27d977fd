#include "tscharena/slotframe.hpp"

#include <cmath>
#include <sstream>

namespace tsch {

const char* slot_kind_name(SlotKind k) {
  switch (k) {
    case SlotKind::Broadcast: return "broadcast";
    case SlotKind::Unicast6P: return "unicast6p";
    case SlotKind::UnicastData: return "unicastdata";
    case SlotKind::Shared: return "shared";
    case SlotKind::Sleep: return "sleep";
  }
  return "?";
}

const char* slot_dir_name(SlotDir d) {
  switch (d) {
    case SlotDir::None: return "-";
    case SlotDir::Tx: return "tx";
    case SlotDir::Rx: return "rx";
  }
  return "?";
}

Slotframe::Slotframe(int m, NodeId owner) : m_(m), owner_(owner), slots_(m) {
  if (m < 1) throw BadParams("slotframe size must be positive");
}

void Slotframe::allocate(int offset, const Slot& s) {
  if (offset < 0 || offset >= m_) throw BadParams("offset out of range");
  if (slots_[offset].kind != SlotKind::Sleep)
    throw SlotframeFull("offset " + std::to_string(offset) + " already allocated");
  slots_[offset] = s;
}

void Slotframe::clear(int offset) {
  slots_[offset] = Slot{};
}

int Slotframe::count(SlotKind kind) const {
  int n = 0;
  for (const Slot& s : slots_)
    if (s.kind == kind) ++n;
  return n;
}

int Slotframe::count(SlotKind kind, SlotDir dir) const {
  int n = 0;
  for (const Slot& s : slots_)
    if (s.kind == kind && s.dir == dir) ++n;
  return n;
}

std::vector<int> Slotframe::offsets_of(SlotKind kind) const {
  std::vector<int> out;
  for (int i = 0; i < m_; ++i)
    if (slots_[i].kind == kind) out.push_back(i);
  return out;
}

std::vector<int> Slotframe::offsets_of(SlotKind kind, SlotDir dir) const {
  std::vector<int> out;
  for (int i = 0; i < m_; ++i)
    if (slots_[i].kind == kind && slots_[i].dir == dir) out.push_back(i);
  return out;
}

std::string Slotframe::dump() const {
  std::ostringstream os;
  for (int i = 0; i < m_; ++i) {
    const Slot& s = slots_[i];
    os << i << ',' << slot_kind_name(s.kind) << ',' << slot_dir_name(s.dir) << ',';
    if (s.peer == kNoNode)
      os << '-';
    else
      os << s.peer;
    os << ',' << s.channel << '\n';
  }
  return os.str();
}

std::vector<int> broadcast_offsets(int m, int k) {
  if (k < 1 || k >= m) throw BadParams("need 1 <= k < m");
  // The modular formula can yield more than k offsets; keep the first k.
  int step = m / k;
  std::vector<int> out;
  for (int x = 0; x < m && static_cast<int>(out.size()) < k; ++x)
    if (x % step == 0) out.push_back(x);
  return out;
}

Slotframe init_slotframe(int m, int k, NodeId owner, ChannelOffset f_bcast) {
  Slotframe sf(m, owner);
  for (int x : broadcast_offsets(m, k))
    sf.allocate(x, {SlotKind::Broadcast, SlotDir::None, kNoNode, f_bcast});
  return sf;
}

int default_per_link(int m) {
  return std::max(1, static_cast<int>(std::lround(m / 16.0)));
}

namespace {

// Lowest offset that is Sleep in every listed frame.
int lowest_common_free(const std::vector<Slotframe>& frames,
                       const std::vector<NodeId>& nodes) {
  int m = frames[nodes.front()].size();
  for (int o = 0; o < m; ++o) {
    bool ok = true;
    for (NodeId n : nodes)
      if (!frames[n].is_free(o)) {
        ok = false;
        break;
      }
    if (ok) return o;
  }
  return -1;
}

}  // namespace

void allocate_6p_slots(std::vector<Slotframe>& frames, const Dodag& d,
                       const ChannelPlan& plan, int per_link) {
  for (NodeId i : d.bfs_order()) {
    for (NodeId j : d.children(i)) {
      ChannelOffset ch = plan.to_children[i];
      for (int r = 0; r < per_link; ++r) {
        int o = lowest_common_free(frames, {i, j});
        if (o < 0)
          throw SlotframeFull("no common free offset for 6P slots on link " +
                              std::to_string(j) + "->" + std::to_string(i));
        frames[i].allocate(o, {SlotKind::Unicast6P, SlotDir::Rx, j, ch});
        frames[j].allocate(o, {SlotKind::Unicast6P, SlotDir::Tx, i, ch});
      }
    }
  }
}

void allocate_shared_slots(std::vector<Slotframe>& frames, const Dodag& d,
                           const ChannelPlan& plan, int max_children) {
  int per_parent = (max_children + 1) / 2;
  for (NodeId i : d.bfs_order()) {
    if (d.children(i).empty()) continue;
    ChannelOffset ch = plan.to_children[i];
    std::vector<NodeId> group{i};
    for (NodeId j : d.children(i)) group.push_back(j);
    for (int r = 0; r < per_parent; ++r) {
      int o = lowest_common_free(frames, group);
      if (o < 0)
        throw SlotframeFull("no common free offset for shared slots under node " +
                            std::to_string(i));
      frames[i].allocate(o, {SlotKind::Shared, SlotDir::Rx, kNoNode, ch});
      for (NodeId j : d.children(i))
        frames[j].allocate(o, {SlotKind::Shared, SlotDir::Tx, i, ch});
    }
  }
}

}  // namespace tsch
