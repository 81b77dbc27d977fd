#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tscharena/cellalloc.hpp"
#include "tscharena/channels.hpp"
#include "tscharena/metrics.hpp"
#include "tscharena/scenario.hpp"
#include "tscharena/simcore.hpp"

namespace fs = std::filesystem;
using namespace tsch;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("TSCH_ARENA_OUT");
  return env && *env ? env : "out";
}

// ---------------------------------------------------------------- run

struct RunJob {
  std::size_t point = 0;
  std::uint64_t seed = 0;
};

int cmd_run(const std::string& file, int seeds_override, long long seed_override,
            std::string out_dir, int workers) {
  ExperimentPlan plan = parse_experiment_file(file);
  if (seeds_override > 0) plan.seeds = seeds_override;
  if (seed_override >= 0) plan.base_seed = static_cast<std::uint64_t>(seed_override);

  std::vector<RunJob> jobs;
  for (std::size_t p = 0; p < plan.points.size(); ++p)
    for (int s = 0; s < plan.seeds; ++s)
      jobs.push_back({p, plan.base_seed + static_cast<std::uint64_t>(s)});

  std::vector<RunMetrics> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      Scenario sc = plan.points[jobs[j].point].sc;
      sc.seed = jobs[j].seed;
      try {
        results[j] = run(sc).metrics;
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };
  if (workers < 1)
    workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t j = 0; j < jobs.size(); ++j)
    if (!errors[j].empty()) {
      std::cerr << "error: " << plan.points[jobs[j].point].scenario_id << " seed "
                << jobs[j].seed << ": " << errors[j] << "\n";
      return 1;
    }

  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "runs.csv");
  std::ofstream jsonl(fs::path(out_dir) / "runs.json");
  csv << metrics_csv_header() << "\n";
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const RunPoint& pt = plan.points[jobs[j].point];
    csv << metrics_csv_row(pt.scenario_id, scheduler_name(pt.sc.scheduler),
                           jobs[j].seed, pt.sc.rate_ppm, pt.dodag_size,
                           pt.slotframe_len, results[j])
        << "\n";
    jsonl << metrics_json_row(pt.scenario_id, scheduler_name(pt.sc.scheduler),
                              jobs[j].seed, pt.sc.rate_ppm, pt.dodag_size,
                              pt.slotframe_len, results[j])
          << "\n";
  }

  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  summary << "scenario_id,scheduler,rate_ppm,dodag_size,slotframe_len,"
             "pdr_mean,pdr_std,delay_ms_mean,delay_ms_std,lost_ppm_mean,"
             "duty_cycle_mean,received_mean,runs\n";
  for (std::size_t p = 0; p < plan.points.size(); ++p) {
    std::vector<RunMetrics> per_point;
    for (std::size_t j = 0; j < jobs.size(); ++j)
      if (jobs[j].point == p) per_point.push_back(results[j]);
    MetricsSummary s = summarize(per_point);
    const RunPoint& pt = plan.points[p];
    summary << pt.scenario_id << ',' << scheduler_name(pt.sc.scheduler) << ','
            << pt.sc.rate_ppm << ',' << pt.dodag_size << ',' << pt.slotframe_len
            << ',' << std::fixed << std::setprecision(6) << s.mean.pdr << ','
            << s.stddev.pdr << ',' << s.mean.mean_e2e_delay_ms << ','
            << s.stddev.mean_e2e_delay_ms << ',' << s.mean.lost_ppm << ','
            << s.mean.duty_cycle << ',' << s.mean.received_total << ','
            << s.runs << "\n";
    summary.unsetf(std::ios::fixed);
    std::cout << pt.scenario_id << " [" << scheduler_name(pt.sc.scheduler)
              << "] pdr=" << std::fixed << std::setprecision(4) << s.mean.pdr
              << " delay_ms=" << std::setprecision(1) << s.mean.mean_e2e_delay_ms
              << " duty=" << std::setprecision(4) << s.mean.duty_cycle << "\n";
    std::cout.unsetf(std::ios::fixed);
  }
  std::cout << jobs.size() << " runs -> " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- dump

int cmd_dump(const std::string& file, std::string out_dir, long long slots) {
  ExperimentPlan plan = parse_experiment_file(file);
  const RunPoint* pt = nullptr;
  for (const RunPoint& p : plan.points)
    if (p.sc.scheduler == Scheduler::GtTsch) {
      pt = &p;
      break;
    }
  if (!pt) {
    std::cerr << "error: no gt-tsch point in " << file << "\n";
    return 1;
  }
  Scenario sc = pt->sc;
  sc.seed = plan.base_seed;
  Engine e(sc);
  if (slots < 0) slots = 3LL * sc.m;
  e.run_slots(static_cast<std::uint64_t>(slots));

  fs::create_directories(out_dir);
  std::ofstream frames(fs::path(out_dir) / "frames.txt");
  for (const Dodag& d : e.forest())
    for (NodeId i : d.bfs_order()) {
      frames << "#frame owner=" << i << " m=" << e.frames()[i].size() << "\n";
      frames << e.frames()[i].dump();
    }
  std::ofstream plan_out(fs::path(out_dir) / "plan.txt");
  for (std::size_t di = 0; di < e.forest().size(); ++di)
    plan_out << plan_table(e.plan(di), e.forest()[di]);
  std::cout << "wrote " << (fs::path(out_dir) / "frames.txt").string() << " and "
            << (fs::path(out_dir) / "plan.txt").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- lint

struct ParsedPlan {
  std::vector<Dodag> forest;
  ChannelPlan plan;
};

ParsedPlan read_plan_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file: " + path);
  struct Row {
    NodeId node;
    NodeId parent;  // kNoNode for roots
    int to_parent, to_children;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("node,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string tok;
    Row r{};
    std::getline(ss, tok, ',');
    r.node = static_cast<NodeId>(std::stoul(tok));
    std::getline(ss, tok, ',');
    r.parent = tok == "-" ? kNoNode : static_cast<NodeId>(std::stoul(tok));
    std::getline(ss, tok, ',');
    r.to_parent = std::stoi(tok);
    std::getline(ss, tok, ',');
    r.to_children = std::stoi(tok);
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("empty plan file: " + path);

  std::size_t total = 0;
  for (const Row& r : rows) total = std::max<std::size_t>(total, r.node + 1);

  ParsedPlan out;
  out.plan.f_bcast = 0;
  out.plan.to_parent.assign(total, -1);
  out.plan.to_children.assign(total, -1);
  for (const Row& r : rows)
    if (r.parent == kNoNode)
      out.forest.emplace_back(total, r.node, static_cast<int>(total));
  // Rows list parents before children, so one pass attaches everything.
  for (const Row& r : rows) {
    out.plan.to_parent[r.node] = r.to_parent;
    out.plan.to_children[r.node] = r.to_children;
    if (r.parent == kNoNode) continue;
    bool attached = false;
    for (Dodag& d : out.forest)
      if (d.is_member(r.parent)) {
        d.attach(r.node, r.parent);
        attached = true;
        break;
      }
    if (!attached)
      throw ParseError("node " + std::to_string(r.node) +
                       " listed before its parent " + std::to_string(r.parent));
  }
  return out;
}

std::vector<Slotframe> read_frames(const std::string& path, std::size_t total) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open frame file: " + path);
  std::vector<Slotframe> frames(total);
  std::string line;
  NodeId owner = kNoNode;
  bool any = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#frame", 0) == 0) {
      std::size_t op = line.find("owner=");
      std::size_t mp = line.find("m=");
      if (op == std::string::npos || mp == std::string::npos)
        throw ParseError("malformed frame header: " + line);
      owner = static_cast<NodeId>(std::stoul(line.substr(op + 6)));
      int m = std::stoi(line.substr(mp + 2));
      if (owner >= total) throw ParseError("frame owner out of range: " + line);
      frames[owner] = Slotframe(m, owner);
      any = true;
      continue;
    }
    if (owner == kNoNode) throw ParseError("slot line before a frame header");
    std::stringstream ss(line);
    std::string off_s, kind_s, dir_s, peer_s, chan_s;
    std::getline(ss, off_s, ',');
    std::getline(ss, kind_s, ',');
    std::getline(ss, dir_s, ',');
    std::getline(ss, peer_s, ',');
    std::getline(ss, chan_s, ',');
    if (kind_s == "sleep") continue;
    Slot s;
    if (kind_s == "broadcast") s.kind = SlotKind::Broadcast;
    else if (kind_s == "unicast6p") s.kind = SlotKind::Unicast6P;
    else if (kind_s == "unicastdata") s.kind = SlotKind::UnicastData;
    else if (kind_s == "shared") s.kind = SlotKind::Shared;
    else throw ParseError("unknown slot kind '" + kind_s + "'");
    s.dir = dir_s == "tx" ? SlotDir::Tx : dir_s == "rx" ? SlotDir::Rx : SlotDir::None;
    s.peer = peer_s == "-" ? kNoNode : static_cast<NodeId>(std::stoul(peer_s));
    s.channel = std::stoi(chan_s);
    frames[owner].allocate(std::stoi(off_s), s);
  }
  if (!any) throw ParseError("empty frame file: " + path);
  return frames;
}

int cmd_lint(const std::string& frame_file, const std::string& plan_file) {
  ParsedPlan pp = read_plan_table(plan_file);
  std::vector<Slotframe> frames = read_frames(frame_file, pp.plan.to_parent.size());

  int violations = 0;
  for (const Dodag& d : pp.forest) {
    for (const Violation& v : validate_channel_plan(d, pp.plan)) {
      std::cout << violation_name(v.kind) << ": node " << v.a;
      if (v.b != kNoNode) std::cout << " / node " << v.b;
      std::cout << " (" << v.detail << ")\n";
      ++violations;
    }
    for (const std::string& msg : lint_frames(frames, d)) {
      std::cout << "FrameViolation: " << msg << "\n";
      ++violations;
    }
  }
  if (violations == 0) {
    std::cout << "clean: no violations\n";
    return 0;
  }
  std::cout << violations << " violation(s)\n";
  return 2;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "runs.csv");
  if (!in) {
    std::cerr << "error: cannot open " << (fs::path(dir) / "runs.csv").string() << "\n";
    return 1;
  }
  struct Acc {
    double pdr = 0, delay = 0, duty = 0, received = 0;
    int n = 0;
  };
  std::map<std::string, Acc> groups;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() < 12) continue;
    Acc& a = groups[f[0] + "," + f[1]];
    a.pdr += std::stod(f[6]);
    a.delay += std::stod(f[7]);
    a.duty += std::stod(f[9]);
    a.received += std::stod(f[11]);
    ++a.n;
  }
  std::cout << std::left << std::setw(44) << "scenario,scheduler" << std::right
            << std::setw(8) << "pdr" << std::setw(12) << "delay_ms" << std::setw(8)
            << "duty" << std::setw(10) << "received" << std::setw(6) << "runs"
            << "\n";
  for (const auto& [key, a] : groups)
    std::cout << std::left << std::setw(44) << key << std::right << std::fixed
              << std::setw(8) << std::setprecision(3) << a.pdr / a.n << std::setw(12)
              << std::setprecision(1) << a.delay / a.n << std::setw(8)
              << std::setprecision(3) << a.duty / a.n << std::setw(10)
              << std::setprecision(0) << a.received / a.n << std::setw(6) << a.n
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsch-arena: deterministic TSCH scheduling simulator"};
  app.require_subcommand(1);

  std::string file, out_dir = default_out_dir(), frame_file, plan_file, report_dir;
  int seeds = 0, workers = 0;
  long long seed = -1, slots = -1;

  CLI::App* c_run = app.add_subcommand("run", "execute an experiment sweep");
  c_run->add_option("file", file, "experiment description")->required();
  c_run->add_option("--seeds", seeds, "override number of seeds");
  c_run->add_option("--seed", seed, "override base seed");
  c_run->add_option("--out", out_dir, "output directory");
  c_run->add_option("--workers", workers, "parallel workers (0 = all cores)");

  CLI::App* c_dump = app.add_subcommand("dump", "write frame/plan dumps for lint");
  c_dump->add_option("file", file, "experiment description")->required();
  c_dump->add_option("--out", out_dir, "output directory");
  c_dump->add_option("--slots", slots, "slots to simulate before dumping");

  CLI::App* c_lint = app.add_subcommand("lint", "check frame and channel-plan dumps");
  c_lint->add_option("frames", frame_file, "frame dump file")->required();
  c_lint->add_option("plan", plan_file, "channel plan table")->required();

  CLI::App* c_report = app.add_subcommand("report", "summarize a run directory");
  c_report->add_option("dir", report_dir, "directory holding runs.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) return cmd_run(file, seeds, seed, out_dir, workers);
    if (c_dump->parsed()) return cmd_dump(file, out_dir, slots);
    if (c_lint->parsed()) return cmd_lint(frame_file, plan_file);
    if (c_report->parsed()) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
