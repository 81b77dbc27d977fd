#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsch {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Directional link record; callers create links symmetrically.
struct Link {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  double prr = 1.0;  // packet reception ratio in (0,1]
};

struct DisconnectedTopology : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RootHasNoRankBar : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kRankMin = 256;
inline constexpr int kMinStepOfRank = 256;
inline constexpr double kEtxMax = 8.0;

// Routing tree over one connected component. Immutable after construction;
// node ids are global, non-member entries stay unset.
class Dodag {
 public:
  Dodag(std::size_t total_nodes, NodeId root, int max_children);

  NodeId root() const { return root_; }
  int max_children() const { return max_children_; }
  std::size_t total_nodes() const { return parent_.size(); }

  bool is_member(NodeId i) const { return member_[i]; }
  bool is_root(NodeId i) const { return i == root_; }
  const std::vector<NodeId>& members() const { return members_; }

  NodeId parent(NodeId i) const { return parent_[i]; }
  const std::vector<NodeId>& children(NodeId i) const { return children_[i]; }
  int hops(NodeId i) const { return hops_[i]; }
  int rank(NodeId i) const { return kRankMin + hops_[i] * kMinStepOfRank; }
  int rank_min() const { return kRankMin; }
  int min_step_of_rank() const { return kMinStepOfRank; }

  // Members ordered root-first by (hop count, id); grant and allocation
  // passes iterate this order for determinism.
  const std::vector<NodeId>& bfs_order() const { return bfs_order_; }

  void attach(NodeId child, NodeId parent);  // construction helper

 private:
  NodeId root_;
  int max_children_;
  std::vector<bool> member_;
  std::vector<NodeId> members_;
  std::vector<NodeId> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<int> hops_;
  std::vector<NodeId> bfs_order_;
};

// BFS hop-count parent selection with a per-parent children cap. When the
// nearest candidate parent is full the node takes the next-nearest eligible
// one; ties break on the smallest candidate id.
Dodag build_dodag(std::size_t nodes, const std::vector<Link>& links, NodeId root,
                  int max_children);

// Multi-root variant: every connected component must hold exactly one root.
std::vector<Dodag> build_forest(std::size_t nodes, const std::vector<Link>& links,
                                const std::vector<NodeId>& roots, int max_children);

// MinStepofRank / (Rank_i - Rank_min); equals 1/hops under hop-count ranks.
double rank_bar(const Dodag& d, NodeId i);

// 1/prr capped at etx_max; prr == 0 maps to the cap.
double etx_of(double prr, double etx_max = kEtxMax);

struct LinkHistory {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  double prev_etx = -1.0;  // negative: no prior estimate
};

// EWMA of attempts-per-delivered-packet; ETX_MAX before the first success.
double estimate_etx(const LinkHistory& h, double smoothing, double etx_max = kEtxMax);

// Unit-disk adjacency: link iff euclidean distance <= range.
struct Coord {
  double x = 0, y = 0;
};
std::vector<Link> links_from_coords(const std::vector<Coord>& coords, double range,
                                    double prr);

}  // namespace tsch
