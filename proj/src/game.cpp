#include "tscharena/game.hpp"

#include <cmath>
#include <limits>

namespace tsch {
namespace game {

double ewma_queue(double q_prev, int q_now, double zeta) {
  return zeta * q_prev + (1.0 - zeta) * static_cast<double>(q_now);
}

double utility(double l, double rank_bar) {
  return rank_bar * std::log(l + 1.0);
}

double link_cost(double l, double etx) {
  return l * (etx - 1.0);
}

double queue_cost(double l, double q_ewma, int q_max) {
  return l * (1.0 - q_ewma / static_cast<double>(q_max));
}

double payoff(double l, const NodeGameView& view, const GameParams& p) {
  return p.alpha * utility(l, view.rank_bar) - p.beta * link_cost(l, view.etx) -
         p.gamma * queue_cost(l, view.q_ewma, p.q_max);
}

double closed_form_x(const NodeGameView& view, const GameParams& p) {
  double denom = p.gamma * (1.0 - view.q_ewma / static_cast<double>(p.q_max)) +
                 p.beta * (view.etx - 1.0);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return p.alpha * view.rank_bar / denom - 1.0;
}

int optimal_l_tx(const NodeGameView& view, const GameParams& p) {
  int lo = view.l_tx_min;
  int hi = view.l_rx_parent;
  if (lo >= hi) return hi;  // degenerate band
  double x = closed_form_x(view, p);
  if (x <= static_cast<double>(lo)) return lo;
  if (x >= static_cast<double>(hi)) return hi;
  int below = static_cast<int>(std::floor(x));
  int above = below + 1;
  if (below < lo) below = lo;
  if (above > hi) above = hi;
  if (above == below) return below;
  // strictly greater: ties go to the smaller count (energy saving)
  return payoff(above, view, p) > payoff(below, view, p) ? above : below;
}

int brute_force_l_tx(const NodeGameView& view, const GameParams& p) {
  int best = view.l_tx_min;
  double best_v = payoff(best, view, p);
  for (int l = view.l_tx_min + 1; l <= view.l_rx_parent; ++l) {
    double v = payoff(l, view, p);
    if (v > best_v) {
      best_v = v;
      best = l;
    }
  }
  return best;
}

}  // namespace game
}  // namespace tsch
