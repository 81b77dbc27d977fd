#pragma once

#include <stdexcept>

namespace tsch {
namespace game {

struct GameParams {
  double alpha = 1.0;   // utility weight, must be > 0
  double beta = 0.5;    // link-quality cost weight
  double gamma = 0.5;   // queue cost weight
  double zeta = 0.5;    // queue EWMA smoothing factor
  int q_max = 8;        // queue capacity, shared with the engine
};

struct NodeGameView {
  double rank_bar = 1.0;   // MinStepofRank / (Rank - Rank_min)
  double etx = 1.0;        // >= 1
  double q_ewma = 0.0;     // in [0, q_max]
  int l_tx_min = 0;
  int l_rx_parent = 0;
};

// Q(t) = zeta * Q(t-1) + (1 - zeta) * q(t)
double ewma_queue(double q_prev, int q_now, double zeta);

// rank_bar * ln(l + 1)
double utility(double l, double rank_bar);

// l * (etx - 1)
double link_cost(double l, double etx);

// l * (1 - q_ewma / q_max)
double queue_cost(double l, double q_ewma, int q_max);

// alpha * utility - beta * link_cost - gamma * queue_cost
double payoff(double l, const NodeGameView& view, const GameParams& p);

// Unclamped continuous optimum:
//   X = alpha * rank_bar / (gamma * (1 - q_ewma/q_max) + beta * (etx - 1)) - 1.
// Returns +infinity when the cost weights vanish (payoff strictly increasing).
double closed_form_x(const NodeGameView& view, const GameParams& p);

// Integer optimum over [l_tx_min, l_rx_parent]: clamp X, and for interior X
// pick the payoff-larger of floor/ceil, ties to the smaller count.
int optimal_l_tx(const NodeGameView& view, const GameParams& p);

// Independent oracle: evaluate the payoff at every integer in the band.
int brute_force_l_tx(const NodeGameView& view, const GameParams& p);

}  // namespace game
}  // namespace tsch
