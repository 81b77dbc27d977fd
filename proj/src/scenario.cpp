#include "tscharena/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tsch {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct KeyValue {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, KeyValue>;

const std::set<std::string> kKnownKeys[] = {
    /* topology */ {"generator", "nodes", "dodags", "size", "root_children",
                    "links", "coords", "range", "roots", "prr", "max_children"},
    /* radio */ {"num_channels", "interference_multiplier"},
    /* schedule */ {"scheduler", "m", "k", "per_link", "shared_per_parent",
                    "unicast_len", "broadcast_len", "eb_len"},
    /* traffic */ {"rate_ppm"},
    /* game */ {"alpha", "beta", "gamma", "zeta", "q_max"},
    /* run */ {"id", "duration_minutes", "drain_minutes", "seeds", "seed",
               "update_period", "max_retries", "etx_smoothing"},
};
const char* kSectionNames[] = {"topology", "radio", "schedule",
                               "traffic",  "game",  "run"};
constexpr int kNumSections = 6;

struct Document {
  Section sections[kNumSections];
};

int section_index(const std::string& name) {
  for (int i = 0; i < kNumSections; ++i)
    if (name == kSectionNames[i]) return i;
  return -1;
}

Document tokenize(const std::string& text) {
  Document doc;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  int current = -1;
  bool any = false;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t c = line.find_first_of("#;");
    if (c != std::string::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    any = true;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("malformed section header at line " + std::to_string(lineno));
      std::string name = trim(line.substr(1, line.size() - 2));
      current = section_index(name);
      if (current < 0)
        throw ParseError("unknown section '" + name + "' at line " +
                         std::to_string(lineno));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value at line " + std::to_string(lineno));
    if (current < 0)
      throw ParseError("key outside any section at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys[current].count(key))
      throw ParseError("unknown key '" + key + "' in [" +
                       kSectionNames[current] + "] at line " + std::to_string(lineno));
    doc.sections[current][key] = {value, lineno};
  }
  if (!any) throw ParseError("empty experiment file");
  return doc;
}

class Reader {
 public:
  Reader(const Section& s, const char* name) : s_(s), name_(name) {}

  bool has(const std::string& key) const { return s_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& dflt) const {
    auto it = s_.find(key);
    return it == s_.end() ? dflt : it->second.value;
  }
  double num(const std::string& key, double dflt) const {
    auto it = s_.find(key);
    if (it == s_.end()) return dflt;
    return to_num(key, it->second.value);
  }
  long long integer(const std::string& key, long long dflt) const {
    double v = num(key, static_cast<double>(dflt));
    return static_cast<long long>(std::llround(v));
  }
  std::vector<double> num_list(const std::string& key, double dflt) const {
    auto it = s_.find(key);
    if (it == s_.end()) return {dflt};
    std::vector<double> out;
    for (const std::string& tok : split(it->second.value, ','))
      out.push_back(to_num(key, tok));
    if (out.empty())
      throw ParseError("empty list for key '" + key + "' in [" + name_ + "]");
    return out;
  }
  std::vector<std::string> str_list(const std::string& key,
                                    const std::string& dflt) const {
    auto it = s_.find(key);
    return split(it == s_.end() ? dflt : it->second.value, ',');
  }

 private:
  double to_num(const std::string& key, const std::string& tok) const {
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad numeric value '" + tok + "' for key '" + key +
                       "' in [" + name_ + "]");
    }
  }
  const Section& s_;
  const char* name_;
};

// Replicated tree: per DODAG a root, up to root_children direct children, and
// the remaining nodes attached round-robin beneath them.
void build_balanced(Scenario& sc, int size, int dodags, int root_children,
                    double prr) {
  if (size < 1) throw ParseError("size must be >= 1");
  if (dodags < 1) throw ParseError("dodags must be >= 1");
  if (root_children < 1) throw ParseError("root_children must be >= 1");
  sc.total_nodes = static_cast<std::size_t>(size) * dodags;
  for (int g = 0; g < dodags; ++g) {
    NodeId base = static_cast<NodeId>(g * size);
    sc.roots.push_back(base);
    int nc = std::min(root_children, size - 1);
    for (int c = 1; c <= nc; ++c) {
      sc.links.push_back({base, base + c, prr});
      sc.links.push_back({base + c, base, prr});
    }
    for (int r = 0; r < size - 1 - nc; ++r) {
      NodeId parent = base + 1 + static_cast<NodeId>(r % nc);
      NodeId id = base + 1 + static_cast<NodeId>(nc + r);
      sc.links.push_back({parent, id, prr});
      sc.links.push_back({id, parent, prr});
    }
  }
}

std::vector<Link> parse_links(const std::string& spec, double default_prr) {
  std::vector<Link> out;
  for (const std::string& tok : split(spec, ',')) {
    std::size_t dash = tok.find('-');
    if (dash == std::string::npos)
      throw ParseError("bad link '" + tok + "' (expected a-b or a-b:prr)");
    std::size_t colon = tok.find(':', dash);
    double prr = default_prr;
    std::string b_part;
    if (colon != std::string::npos) {
      prr = std::stod(tok.substr(colon + 1));
      b_part = tok.substr(dash + 1, colon - dash - 1);
    } else {
      b_part = tok.substr(dash + 1);
    }
    NodeId a = static_cast<NodeId>(std::stoul(tok.substr(0, dash)));
    NodeId b = static_cast<NodeId>(std::stoul(b_part));
    out.push_back({a, b, prr});
    out.push_back({b, a, prr});
  }
  return out;
}

std::vector<Coord> parse_coords(const std::string& spec) {
  std::vector<Coord> out;
  for (const std::string& tok : split(spec, ',')) {
    std::size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw ParseError("bad coordinate '" + tok + "' (expected x:y)");
    out.push_back({std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
  }
  return out;
}

Scheduler parse_scheduler(const std::string& s) {
  if (s == "gt-tsch") return Scheduler::GtTsch;
  if (s == "orchestra") return Scheduler::Orchestra;
  throw ParseError("unknown scheduler '" + s + "' (use gt-tsch or orchestra)");
}

std::string format_num(double v) {
  char buf[32];
  if (v == std::llround(v))
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(v)));
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ExperimentPlan parse_experiment(const std::string& text) {
  Document doc = tokenize(text);
  Reader topo(doc.sections[0], "topology");
  Reader radio(doc.sections[1], "radio");
  Reader sched(doc.sections[2], "schedule");
  Reader traffic(doc.sections[3], "traffic");
  Reader game(doc.sections[4], "game");
  Reader run(doc.sections[5], "run");

  ExperimentPlan plan;
  plan.id = run.str("id", "experiment");
  plan.seeds = static_cast<int>(run.integer("seeds", 1));
  plan.base_seed = static_cast<std::uint64_t>(run.integer("seed", 1));
  if (plan.seeds < 1) throw ParseError("seeds must be >= 1");

  std::string generator = topo.str("generator", "");
  if (generator.empty())
    generator = topo.has("links")    ? "explicit"
                : topo.has("coords") ? "coords"
                                     : "balanced";

  std::vector<double> sizes = topo.num_list("size", 7);
  std::vector<double> rates = traffic.num_list("rate_ppm", 60);
  std::vector<std::string> schedulers = sched.str_list("scheduler", "gt-tsch");
  std::vector<double> ms = sched.num_list("m", 32);
  std::vector<double> unicasts = sched.num_list("unicast_len", 17);
  if (ms.size() > 1 && unicasts.size() > 1 && ms.size() != unicasts.size())
    throw ParseError("m and unicast_len lists must pair up element-wise");
  std::size_t frame_points = std::max(ms.size(), unicasts.size());
  if (generator != "balanced" && sizes.size() > 1)
    throw ParseError("size sweeps need the balanced generator");

  for (const std::string& sch : schedulers) {
    Scheduler scheduler = parse_scheduler(sch);
    for (double rate : rates) {
      for (double size_d : sizes) {
        for (std::size_t fi = 0; fi < frame_points; ++fi) {
          int m = static_cast<int>(ms[std::min(fi, ms.size() - 1)]);
          int unicast = static_cast<int>(unicasts[std::min(fi, unicasts.size() - 1)]);
          int size = static_cast<int>(size_d);

          RunPoint pt;
          Scenario& sc = pt.sc;

          // topology
          int dodags = static_cast<int>(topo.integer("dodags", 1));
          sc.max_children = static_cast<int>(topo.integer("max_children", 5));
          double prr = topo.num("prr", 1.0);
          if (generator == "balanced") {
            build_balanced(sc, size, dodags,
                           static_cast<int>(topo.integer("root_children", 3)), prr);
            pt.dodag_size = size;
          } else if (generator == "explicit" || generator == "coords") {
            sc.total_nodes = static_cast<std::size_t>(topo.integer("nodes", 0));
            for (const std::string& tok : topo.str_list("roots", "0"))
              sc.roots.push_back(static_cast<NodeId>(std::stoul(tok)));
            if (generator == "explicit") {
              sc.links = parse_links(topo.str("links", ""), prr);
            } else {
              sc.coords = parse_coords(topo.str("coords", ""));
              sc.range = topo.num("range", 0.0);
              sc.link_prr = prr;
              if (sc.total_nodes == 0) sc.total_nodes = sc.coords.size();
            }
            pt.dodag_size =
                static_cast<int>(sc.total_nodes / std::max<std::size_t>(1, sc.roots.size()));
          } else {
            throw ParseError("unknown generator '" + generator + "'");
          }

          // radio
          sc.num_channels = static_cast<int>(radio.integer("num_channels", 8));
          sc.interference_multiplier = radio.num("interference_multiplier", 1.0);

          // schedule
          sc.scheduler = scheduler;
          sc.m = m;
          sc.k = static_cast<int>(sched.integer("k", 4));
          sc.per_link = static_cast<int>(sched.integer("per_link", 0));
          sc.shared_per_parent =
              static_cast<int>(sched.integer("shared_per_parent", -1));
          sc.orchestra.unicast_len = unicast;
          sc.orchestra.broadcast_len =
              static_cast<int>(sched.integer("broadcast_len", 31));
          sc.orchestra.eb_len = static_cast<int>(sched.integer("eb_len", 397));

          // traffic
          sc.rate_ppm = rate;

          // game
          sc.game.alpha = game.num("alpha", 1.0);
          sc.game.beta = game.num("beta", 0.5);
          sc.game.gamma = game.num("gamma", 0.5);
          sc.game.zeta = game.num("zeta", 0.5);
          sc.game.q_max = static_cast<int>(game.integer("q_max", 8));

          // run
          sc.duration_minutes = run.num("duration_minutes", 1.0);
          sc.drain_minutes = run.num("drain_minutes", 0.0);
          sc.update_period = static_cast<int>(run.integer("update_period", 0));
          sc.max_retries = static_cast<int>(run.integer("max_retries", 4));
          sc.etx_smoothing = run.num("etx_smoothing", 0.5);

          pt.slotframe_len = scheduler == Scheduler::GtTsch ? m : unicast;
          pt.scenario_id = plan.id + "_r" + format_num(rate) + "_n" +
                           std::to_string(pt.dodag_size) + "_m" + std::to_string(m) +
                           "_u" + std::to_string(unicast);
          sc.id = pt.scenario_id;
          plan.points.push_back(std::move(pt));
        }
      }
    }
  }
  return plan;
}

ExperimentPlan parse_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open experiment file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

}  // namespace tsch
