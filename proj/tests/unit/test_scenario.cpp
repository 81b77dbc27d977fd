#include <doctest.h>

#include <set>

#include "tscharena/scenario.hpp"

using namespace tsch;

TEST_CASE("minimal experiment parses with defaults filled in") {
  ExperimentPlan plan = parse_experiment(
      "[run]\n"
      "id = tiny\n");
  CHECK(plan.id == "tiny");
  CHECK(plan.seeds == 1);
  REQUIRE(plan.points.size() == 1);
  const RunPoint& pt = plan.points[0];
  CHECK(pt.sc.scheduler == Scheduler::GtTsch);
  CHECK(pt.sc.total_nodes == 7);  // balanced, one 7-node tree
  CHECK(pt.sc.roots == std::vector<NodeId>{0});
  CHECK(pt.sc.m == 32);
  CHECK(pt.sc.rate_ppm == doctest::Approx(60));
  CHECK(pt.scenario_id == "tiny_r60_n7_m32_u17");
  CHECK(pt.slotframe_len == 32);
}

TEST_CASE("unknown keys and sections are rejected by name") {
  try {
    parse_experiment("[traffic]\nrate_ppm = 60\nratep = 4\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("ratep") != std::string::npos);
    CHECK(msg.find("traffic") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);  // line number
  }
  CHECK_THROWS_AS(parse_experiment("[radios]\nnum_channels = 8\n"), ParseError);
  CHECK_THROWS_AS(parse_experiment("rate_ppm = 60\n"), ParseError);  // no section
  CHECK_THROWS_AS(parse_experiment(""), ParseError);
  CHECK_THROWS_AS(parse_experiment("# only a comment\n"), ParseError);
  CHECK_THROWS_AS(parse_experiment("[traffic]\nrate_ppm = sixty\n"), ParseError);
}

TEST_CASE("list values expand into a cartesian sweep") {
  ExperimentPlan plan = parse_experiment(
      "[schedule]\n"
      "scheduler = gt-tsch, orchestra\n"
      "[traffic]\n"
      "rate_ppm = 30, 60, 90\n"
      "[topology]\n"
      "size = 6, 8\n");
  CHECK(plan.points.size() == 2 * 3 * 2);
  std::set<std::string> ids;
  int orchestra_rows = 0;
  for (const RunPoint& pt : plan.points) {
    ids.insert(pt.scenario_id + scheduler_name(pt.sc.scheduler));
    if (pt.sc.scheduler == Scheduler::Orchestra) ++orchestra_rows;
  }
  CHECK(ids.size() == plan.points.size());
  CHECK(orchestra_rows == 6);
}

TEST_CASE("m and unicast_len lists pair element-wise") {
  ExperimentPlan plan = parse_experiment(
      "[schedule]\n"
      "scheduler = gt-tsch, orchestra\n"
      "m = 32, 64\n"
      "unicast_len = 8, 16\n");
  CHECK(plan.points.size() == 4);  // 2 schedulers x 2 frame points, not x4
  for (const RunPoint& pt : plan.points) {
    if (pt.sc.m == 32) CHECK(pt.sc.orchestra.unicast_len == 8);
    if (pt.sc.m == 64) CHECK(pt.sc.orchestra.unicast_len == 16);
    int expect = pt.sc.scheduler == Scheduler::GtTsch ? pt.sc.m
                                                      : pt.sc.orchestra.unicast_len;
    CHECK(pt.slotframe_len == expect);
  }
  CHECK_THROWS_AS(parse_experiment("[schedule]\nm = 32, 64\nunicast_len = 8, 16, 32\n"),
                  ParseError);
}

TEST_CASE("balanced generator lays out each tree the same way") {
  ExperimentPlan plan = parse_experiment(
      "[topology]\n"
      "size = 7\n"
      "dodags = 2\n"
      "root_children = 3\n"
      "prr = 0.9\n");
  const Scenario& sc = plan.points[0].sc;
  CHECK(sc.total_nodes == 14);
  CHECK(sc.roots == std::vector<NodeId>{0, 7});
  // 6 links per tree, both directions.
  CHECK(sc.links.size() == 2 * 6 * 2);
  CHECK(sc.links[0].prr == doctest::Approx(0.9));
  // Every link stays within its own tree.
  for (const Link& l : sc.links)
    CHECK((l.src < 7) == (l.dst < 7));
  // Remainder nodes hang under the root's children round-robin.
  Engine probe(sc);
  const Dodag& d = probe.forest()[0];
  CHECK(d.children(0).size() == 3);
  CHECK(d.children(1).size() == 1);
  CHECK(d.children(2).size() == 1);
  CHECK(d.children(3).size() == 1);
}

TEST_CASE("explicit links and coordinate generators are inferred") {
  ExperimentPlan explicit_plan = parse_experiment(
      "[topology]\n"
      "nodes = 3\n"
      "links = 0-1:0.8, 1-2\n"
      "prr = 0.7\n");
  const Scenario& e = explicit_plan.points[0].sc;
  CHECK(e.total_nodes == 3);
  REQUIRE(e.links.size() == 4);
  CHECK(e.links[0].prr == doctest::Approx(0.8));
  CHECK(e.links[2].prr == doctest::Approx(0.7));  // default prr fills in

  ExperimentPlan coord_plan = parse_experiment(
      "[topology]\n"
      "coords = 0:0, 1:0, 2:0\n"
      "range = 1.5\n"
      "prr = 0.95\n");
  const Scenario& c = coord_plan.points[0].sc;
  CHECK(c.total_nodes == 3);
  CHECK(c.coords.size() == 3);
  CHECK(c.range == doctest::Approx(1.5));
  CHECK(c.link_prr == doctest::Approx(0.95));

  CHECK_THROWS_AS(parse_experiment("[topology]\nlinks = 0-1\nsize = 5, 6\n"),
                  ParseError);  // size sweeps need the balanced generator
}

TEST_CASE("run section flows through to the scenario") {
  ExperimentPlan plan = parse_experiment(
      "[run]\n"
      "id = flows\n"
      "duration_minutes = 2.5\n"
      "drain_minutes = 0.5\n"
      "seeds = 4\n"
      "seed = 11\n"
      "update_period = 64\n"
      "max_retries = 6\n"
      "[game]\n"
      "alpha = 2\n"
      "q_max = 12\n");
  CHECK(plan.seeds == 4);
  CHECK(plan.base_seed == 11);
  const Scenario& sc = plan.points[0].sc;
  CHECK(sc.duration_minutes == doctest::Approx(2.5));
  CHECK(sc.drain_minutes == doctest::Approx(0.5));
  CHECK(sc.update_period == 64);
  CHECK(sc.max_retries == 6);
  CHECK(sc.game.alpha == doctest::Approx(2.0));
  CHECK(sc.game.q_max == 12);
}

TEST_CASE("missing files fail loudly") {
  CHECK_THROWS_AS(parse_experiment_file("/nonexistent/experiment.ini"), ParseError);
}

TEST_CASE("comments and blank lines are ignored") {
  ExperimentPlan plan = parse_experiment(
      "# leading comment\n"
      "\n"
      "[traffic]  ; trailing comment\n"
      "rate_ppm = 45  # inline comment\n");
  CHECK(plan.points[0].sc.rate_ppm == doctest::Approx(45));
}
