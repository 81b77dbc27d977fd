#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tscharena/simcore.hpp"

namespace tsch {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One resolved sweep point (seed still unset; the runner stamps seeds).
struct RunPoint {
  Scenario sc;
  std::string scenario_id;
  int dodag_size = 0;     // nodes per DODAG
  int slotframe_len = 0;  // m for gt-tsch rows, unicast length for orchestra
};

struct ExperimentPlan {
  std::string id = "experiment";
  int seeds = 1;
  std::uint64_t base_seed = 1;
  std::vector<RunPoint> points;
};

// Parse a structured-text experiment description:
//   key = value lines grouped under [topology] [radio] [schedule] [traffic]
//   [game] [run] headers; '#' and ';' start comments; unknown keys rejected.
// List-valued keys (rate_ppm, size, scheduler, m, unicast_len) expand into a
// cartesian sweep, except that list-valued m and unicast_len pair up
// element-wise.
ExperimentPlan parse_experiment(const std::string& text);
ExperimentPlan parse_experiment_file(const std::string& path);

}  // namespace tsch
