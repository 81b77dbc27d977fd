#include "tscharena/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsch {

Dodag::Dodag(std::size_t total_nodes, NodeId root, int max_children)
    : root_(root),
      max_children_(max_children),
      member_(total_nodes, false),
      parent_(total_nodes, kNoNode),
      children_(total_nodes),
      hops_(total_nodes, -1) {
  member_[root] = true;
  members_.push_back(root);
  hops_[root] = 0;
  bfs_order_.push_back(root);
}

void Dodag::attach(NodeId child, NodeId parent) {
  member_[child] = true;
  members_.push_back(child);
  parent_[child] = parent;
  children_[parent].push_back(child);
  hops_[child] = hops_[parent] + 1;
  bfs_order_.push_back(child);
}

namespace {

std::vector<std::vector<NodeId>> adjacency(std::size_t nodes,
                                           const std::vector<Link>& links) {
  std::vector<std::vector<NodeId>> adj(nodes);
  for (const Link& l : links) {
    if (l.prr <= 0.0) continue;
    adj[l.src].push_back(l.dst);
    adj[l.dst].push_back(l.src);
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

// Grow the tree one node at a time. Each step joins the unjoined node whose
// best eligible parent sits at the smallest depth, tie-break by joining node
// id then parent id. Quadratic, but topologies here are tens of nodes.
void grow(Dodag& d, const std::vector<std::vector<NodeId>>& adj,
          const std::vector<NodeId>& component) {
  const int cap = d.max_children();
  std::size_t pending = component.size() - 1;  // root already joined
  while (pending > 0) {
    int best_depth = std::numeric_limits<int>::max();
    NodeId best_node = kNoNode, best_parent = kNoNode;
    for (NodeId u : component) {
      if (d.is_member(u)) continue;
      for (NodeId v : adj[u]) {
        if (!d.is_member(v)) continue;
        if (static_cast<int>(d.children(v).size()) >= cap) continue;
        int depth = d.hops(v) + 1;
        if (depth < best_depth ||
            (depth == best_depth && (u < best_node || (u == best_node && v < best_parent)))) {
          best_depth = depth;
          best_node = u;
          best_parent = v;
        }
      }
    }
    if (best_node == kNoNode)
      throw DisconnectedTopology("node unreachable under the children cap");
    d.attach(best_node, best_parent);
    --pending;
  }
}

}  // namespace

Dodag build_dodag(std::size_t nodes, const std::vector<Link>& links, NodeId root,
                  int max_children) {
  if (max_children < 1) throw DisconnectedTopology("max_children must be >= 1");
  std::vector<NodeId> all(nodes);
  for (std::size_t i = 0; i < nodes; ++i) all[i] = static_cast<NodeId>(i);
  Dodag d(nodes, root, max_children);
  grow(d, adjacency(nodes, links), all);
  return d;
}

std::vector<Dodag> build_forest(std::size_t nodes, const std::vector<Link>& links,
                                const std::vector<NodeId>& roots, int max_children) {
  auto adj = adjacency(nodes, links);
  std::vector<int> comp(nodes, -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < nodes; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<NodeId> stack{static_cast<NodeId>(s)};
    comp[s] = ncomp;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : adj[u])
        if (comp[v] < 0) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
    }
    ++ncomp;
  }
  std::vector<NodeId> root_of(ncomp, kNoNode);
  for (NodeId r : roots) {
    if (root_of[comp[r]] != kNoNode)
      throw DisconnectedTopology("two roots share one connected component");
    root_of[comp[r]] = r;
  }
  for (int c = 0; c < ncomp; ++c)
    if (root_of[c] == kNoNode)
      throw DisconnectedTopology("connected component without a root");

  std::vector<std::vector<NodeId>> comp_nodes(ncomp);
  for (std::size_t i = 0; i < nodes; ++i)
    comp_nodes[comp[i]].push_back(static_cast<NodeId>(i));

  std::vector<Dodag> out;
  out.reserve(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    Dodag d(nodes, root_of[c], max_children);
    grow(d, adj, comp_nodes[c]);
    out.push_back(std::move(d));
  }
  return out;
}

double rank_bar(const Dodag& d, NodeId i) {
  if (d.is_root(i)) throw RootHasNoRankBar("rank_bar undefined at the root");
  return static_cast<double>(d.min_step_of_rank()) /
         static_cast<double>(d.rank(i) - d.rank_min());
}

double etx_of(double prr, double etx_max) {
  if (prr <= 0.0) return etx_max;
  return std::min(std::max(1.0 / prr, 1.0), etx_max);
}

double estimate_etx(const LinkHistory& h, double smoothing, double etx_max) {
  if (h.successes == 0) return etx_max;
  double ratio = static_cast<double>(h.attempts) / static_cast<double>(h.successes);
  ratio = std::min(std::max(ratio, 1.0), etx_max);
  if (h.prev_etx < 0.0) return ratio;
  return smoothing * h.prev_etx + (1.0 - smoothing) * ratio;
}

std::vector<Link> links_from_coords(const std::vector<Coord>& coords, double range,
                                    double prr) {
  std::vector<Link> links;
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      double dx = coords[i].x - coords[j].x;
      double dy = coords[i].y - coords[j].y;
      if (std::hypot(dx, dy) <= range)
        links.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), prr});
    }
  return links;
}

}  // namespace tsch
