#include <doctest.h>

#include <cmath>
#include <limits>

#include "tscharena/game.hpp"
#include "tscharena/rng.hpp"

using namespace tsch;
using namespace tsch::game;

TEST_CASE("queue EWMA blends previous and current occupancy") {
  CHECK(ewma_queue(2.0, 4, 0.5) == doctest::Approx(3.0));
  CHECK(ewma_queue(6.0, 0, 0.5) == doctest::Approx(3.0));
  CHECK(ewma_queue(5.0, 3, 1.0) == doctest::Approx(5.0));  // all history
  CHECK(ewma_queue(5.0, 3, 0.0) == doctest::Approx(3.0));  // all current
}

TEST_CASE("payoff terms evaluate their formulas") {
  CHECK(utility(3.0, 0.5) == doctest::Approx(0.5 * std::log(4.0)));
  CHECK(utility(0.0, 1.0) == doctest::Approx(0.0));
  CHECK(link_cost(4.0, 2.5) == doctest::Approx(6.0));
  CHECK(link_cost(4.0, 1.0) == doctest::Approx(0.0));  // perfect link costs nothing
  CHECK(queue_cost(4.0, 2.0, 8) == doctest::Approx(3.0));
  CHECK(queue_cost(4.0, 8.0, 8) == doctest::Approx(0.0));  // full queue: no brake

  GameParams p;  // alpha 1, beta 0.5, gamma 0.5, q_max 8
  NodeGameView v{1.0, 2.0, 4.0, 0, 0};
  double expect = std::log(4.0) - 0.5 * 3.0 * 1.0 - 0.5 * 3.0 * 0.5;
  CHECK(payoff(3.0, v, p) == doctest::Approx(expect));
}

TEST_CASE("closed-form optimum matches the derivative zero") {
  GameParams p;
  NodeGameView v{1.0, 1.0, 0.0, 0, 0};
  // X = 1 / (0.5 * 1 + 0) - 1 = 1
  CHECK(closed_form_x(v, p) == doctest::Approx(1.0));
  v.q_ewma = 8.0;  // queue term vanishes; etx term is already zero
  CHECK(closed_form_x(v, p) == std::numeric_limits<double>::infinity());
  // Marginal payoff changes sign at X.
  v = {0.7, 1.8, 3.0, 0, 0};
  double x = closed_form_x(v, p);
  double eps = 1e-3;
  CHECK(payoff(x + eps, v, p) < payoff(x, v, p));
  CHECK(payoff(x - eps, v, p) < payoff(x, v, p));
}

TEST_CASE("comparative statics of the continuous optimum") {
  GameParams p;
  NodeGameView v{0.5, 2.0, 3.0, 0, 0};
  double base = closed_form_x(v, p);
  NodeGameView hi_rank = v;
  hi_rank.rank_bar = 1.0;  // closer to the root: wants more cells
  CHECK(closed_form_x(hi_rank, p) > base);
  NodeGameView bad_link = v;
  bad_link.etx = 4.0;  // lossier link: wants fewer
  CHECK(closed_form_x(bad_link, p) < base);
  NodeGameView fuller = v;
  fuller.q_ewma = 6.0;  // backlog pressure: wants more
  CHECK(closed_form_x(fuller, p) > base);
}

TEST_CASE("integer optimum clamps to the negotiation band") {
  GameParams p;
  NodeGameView v{1.0, 1.0, 0.0, 3, 7};  // X = 1, below the band
  CHECK(optimal_l_tx(v, p) == 3);
  v.q_ewma = 8.0;  // X infinite, above the band
  CHECK(optimal_l_tx(v, p) == 7);
  v = {1.0, 1.0, 0.0, 1, 1};
  CHECK(optimal_l_tx(v, p) == 1);  // degenerate band
}

TEST_CASE("interior optimum compares floor and ceil payoffs") {
  GameParams p;
  p.alpha = 1.25;  // X = 1.25/0.5 - 1 = 1.5 with a perfect link, empty queue
  NodeGameView v{1.0, 1.0, 0.0, 0, 10};
  // payoff(1) = 1.25 ln2 - 0.5 = 0.3664; payoff(2) = 1.25 ln3 - 1.0 = 0.3733
  CHECK(optimal_l_tx(v, p) == 2);
  p.alpha = 1.15;  // X ~ 1.3: floor wins
  CHECK(optimal_l_tx(v, p) == 1);
}

TEST_CASE("closed-form optimizer agrees with brute force") {
  Rng rng(123);
  for (int t = 0; t < 2000; ++t) {
    GameParams p;
    p.alpha = 0.1 + 8.0 * rng.next_double();
    p.beta = 0.05 + 2.0 * rng.next_double();
    p.gamma = 0.05 + 2.0 * rng.next_double();
    p.q_max = 4 + rng.next_int(13);
    NodeGameView v;
    v.rank_bar = 1.0 / (1 + rng.next_int(6));
    v.etx = 1.0 + 7.0 * rng.next_double();
    v.q_ewma = p.q_max * rng.next_double();
    v.l_tx_min = rng.next_int(8);
    v.l_rx_parent = v.l_tx_min + rng.next_int(20);
    int fast = optimal_l_tx(v, p);
    int slow = brute_force_l_tx(v, p);
    CAPTURE(p.alpha);
    CAPTURE(v.etx);
    CAPTURE(v.q_ewma);
    CHECK(fast == slow);
  }
}

TEST_CASE("payoff is concave over the feasible counts") {
  Rng rng(321);
  for (int t = 0; t < 200; ++t) {
    GameParams p;
    p.alpha = 0.1 + 8.0 * rng.next_double();
    p.beta = 0.05 + 2.0 * rng.next_double();
    p.gamma = 0.05 + 2.0 * rng.next_double();
    NodeGameView v;
    v.rank_bar = 1.0 / (1 + rng.next_int(6));
    v.etx = 1.0 + 7.0 * rng.next_double();
    v.q_ewma = p.q_max * rng.next_double();
    double prev_diff = std::numeric_limits<double>::infinity();
    for (int l = 1; l <= 63; ++l) {
      double diff = payoff(l, v, p) - payoff(l - 1, v, p);
      CHECK(diff < prev_diff);
      prev_diff = diff;
    }
  }
}
