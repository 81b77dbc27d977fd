#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscharena/channels.hpp"
#include "tscharena/topology.hpp"

namespace tsch {

struct BadParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SlotframeFull : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SlotKind { Broadcast, Unicast6P, UnicastData, Shared, Sleep };
enum class SlotDir { None, Tx, Rx };

const char* slot_kind_name(SlotKind k);
const char* slot_dir_name(SlotDir d);

struct Slot {
  SlotKind kind = SlotKind::Sleep;
  SlotDir dir = SlotDir::None;
  NodeId peer = kNoNode;
  ChannelOffset channel = 0;
};

// One node's cyclic schedule of m slots. Allocation into a non-Sleep offset
// fails instead of overwriting; clearing returns an offset to Sleep.
class Slotframe {
 public:
  Slotframe() = default;
  Slotframe(int m, NodeId owner);

  int size() const { return m_; }
  NodeId owner() const { return owner_; }

  const Slot& at(int offset) const { return slots_[offset]; }
  const Slot& action_at(std::uint64_t asn) const { return slots_[asn % m_]; }

  void allocate(int offset, const Slot& s);
  void clear(int offset);

  int count(SlotKind kind) const;
  int count(SlotKind kind, SlotDir dir) const;
  std::vector<int> offsets_of(SlotKind kind) const;
  std::vector<int> offsets_of(SlotKind kind, SlotDir dir) const;
  bool is_free(int offset) const { return slots_[offset].kind == SlotKind::Sleep; }

  // Dump format: offset,type,dir,peer,channel — one line per offset.
  std::string dump() const;

 private:
  int m_ = 0;
  NodeId owner_ = kNoNode;
  std::vector<Slot> slots_;
};

// Broadcast offsets: first k ascending elements of {x < m : x mod floor(m/k) == 0}.
std::vector<int> broadcast_offsets(int m, int k);

// All slots Sleep except k Broadcast slots on channel f_bcast.
Slotframe init_slotframe(int m, int k, NodeId owner = kNoNode, ChannelOffset f_bcast = 0);

// Fixed per-link slot count rule: two slots per link for a 32-slot frame.
int default_per_link(int m);

// Network-wide allocation passes. Parent and child mark the same offsets so
// frames agree by construction; placement is lowest offsets free on both
// sides, links visited root-first in child order.
void allocate_6p_slots(std::vector<Slotframe>& frames, const Dodag& d,
                       const ChannelPlan& plan, int per_link);
void allocate_shared_slots(std::vector<Slotframe>& frames, const Dodag& d,
                           const ChannelPlan& plan, int max_children);

}  // namespace tsch
