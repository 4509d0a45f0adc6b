#include "plb/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "plb/error.h"
#include "plb/instance_io.h"
#include "plb/paths.h"

namespace plb {

using nlohmann::json;

namespace {

template <typename T>
std::vector<T> list_of(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<T>>();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ExperimentSpec read_experiment_spec(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid experiment spec: ") + e.what(), 0);
  }
  ExperimentSpec spec;
  try {
    spec.instances = list_of<std::string>(j, "instances", {});
    spec.q_values = list_of<int>(j, "q", spec.q_values);
    spec.paths_per_tunnel = list_of<int>(j, "n", spec.paths_per_tunnel);
    spec.protected_fractions = list_of<double>(j, "protected_fractions", spec.protected_fractions);
    spec.seeds = list_of<std::uint64_t>(j, "seeds", spec.seeds);
    spec.time_limit_s = j.value("time_limit_s", spec.time_limit_s);
    spec.tolerance = j.value("tolerance", spec.tolerance);
    spec.expansion = j.value("expansion", spec.expansion);
    spec.tunnel_count = j.value("tunnel_count", spec.tunnel_count);
    spec.demand_lo = j.value("demand_lo", spec.demand_lo);
    spec.demand_hi = j.value("demand_hi", spec.demand_hi);
    spec.surrogate = j.value("surrogate", std::string{});
    if (j.contains("baseline")) {
      const auto& b = j.at("baseline");
      spec.baseline = Plane{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>()};
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment spec: ") + e.what(), 0);
  }
  if (spec.instances.empty() || spec.q_values.empty() || spec.paths_per_tunnel.empty() ||
      spec.protected_fractions.empty() || spec.seeds.empty()) {
    throw InvalidParameter("experiment spec lists must be nonempty");
  }
  if (!(spec.time_limit_s > 0)) throw InvalidParameter("time limit must be positive");
  if (!base_dir.empty()) {
    for (std::string& path : spec.instances) {
      if (std::filesystem::path(path).is_relative()) {
        path = (std::filesystem::path(base_dir) / path).string();
      }
    }
    if (!spec.surrogate.empty() && std::filesystem::path(spec.surrogate).is_relative()) {
      spec.surrogate = (std::filesystem::path(base_dir) / spec.surrogate).string();
    }
  }
  return spec;
}

const char* to_string(Method m) { return m == Method::kNkcp ? "NKCP" : "NKCP-R"; }

NetworkInstance prepare_instance(const std::string& file, const ExperimentSpec& spec, int q,
                                 double fraction, std::uint64_t seed) {
  const std::string text = read_file(file);
  NetworkInstance g;
  if (ends_with(file, ".json")) {
    g = read_instance(text);
  } else if (ends_with(file, ".graphml")) {
    g = parse_graphml(text);
  } else {
    g = parse_sndlib(text);
  }
  if (g.tunnels.empty()) {
    DemandGenSpec d;
    d.tunnel_count = spec.tunnel_count;
    d.lo = spec.demand_lo;
    d.hi = spec.demand_hi;
    d.protected_fraction = fraction;
    d.seed = seed;
    g = generate_demands(std::move(g), d);
  } else {
    const int count = static_cast<int>(g.tunnels.size());
    const int protect = static_cast<int>(std::ceil(fraction * count - 1e-9));
    for (int k = 0; k < count; ++k) g.tunnels[k].is_protected = k < protect;
  }
  g.srlgs = enumerate_srlgs(g, q);
  return g;
}

bool is_nondecreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double slack = 1e-9 * std::max(1.0, std::abs(values[i - 1]));
    if (values[i] < values[i - 1] - slack) return false;
  }
  return true;
}

namespace {

ResultRow row_from(const SolveReport& r) {
  ResultRow row;
  row.ok = true;
  row.termination = to_string(r.termination);
  row.exact_objective = r.cost.total();
  row.reservation_cost = r.cost.reservation_cost;
  row.routing_cost = r.cost.routing_cost;
  row.surrogate_objective = r.surrogate_objective;
  row.iterations = r.iterations;
  row.reservation_cuts = r.reservation_cuts;
  row.capacity_cuts = r.capacity_cuts;
  row.wall_ms = r.wall_ms;
  row.feasible = r.feasible;
  row.final_max_violation = r.final_max_violation;
  row.objective_monotone = is_nondecreasing(r.objective_history);
  if (!r.message.empty()) row.error = r.message;
  return row;
}

struct Cell {
  std::string instance;
  int q;
  int n;
  double fraction;
  std::uint64_t seed;
};

std::pair<ResultRow, ResultRow> run_cell(const Cell& cell, const ExperimentSpec& spec,
                                         const ConvexSurrogate& nkcp,
                                         const ConvexSurrogate& baseline) {
  ResultRow a, b;
  try {
    const NetworkInstance g = prepare_instance(cell.instance, spec, cell.q, cell.fraction, cell.seed);
    PathGenConfig pg;
    pg.paths_per_tunnel = cell.n;
    pg.expansion = spec.expansion;
    pg.allow_fewer_paths = true;
    const PathSet ps = build_pathsets(g, pg);
    NkcpOptions opts;
    opts.time_limit_s = spec.time_limit_s;
    opts.separation.tolerance = spec.tolerance;
    opts.keep_cuts = false;
    a = row_from(solve_nkcp(g, ps, nkcp, opts));
    b = row_from(solve_nkcp(g, ps, baseline, opts));
    for (ResultRow* r : {&a, &b}) {
      r->links = static_cast<int>(g.links.size());
      r->srlgs = static_cast<int>(g.srlgs.size());
      r->tunnels = static_cast<int>(g.tunnels.size());
    }
    if (a.feasible && b.feasible && b.exact_objective != 0.0) {
      const double gap = (a.exact_objective - b.exact_objective) / b.exact_objective;
      a.gap = gap;
      b.gap = gap;
    }
  } catch (const std::exception& e) {
    a = ResultRow{};
    b = ResultRow{};
    a.error = b.error = e.what();
    a.termination = b.termination = "error";
  }
  for (ResultRow* r : {&a, &b}) {
    r->instance = cell.instance;
    r->q = cell.q;
    r->n = cell.n;
    r->fraction = cell.fraction;
    r->seed = cell.seed;
  }
  a.method = Method::kNkcp;
  b.method = Method::kNkcpR;
  return {a, b};
}

}  // namespace

std::vector<ResultRow> run_matrix(const ExperimentSpec& spec, int workers) {
  if (workers <= 0) {
    const char* env = std::getenv("PLB_WORKERS");
    workers = env ? std::max(1, std::atoi(env)) : 1;
  }
  const ConvexSurrogate nkcp = spec.surrogate.empty()
                                   ? train(build_training_grid(), TrainConfig{}).surrogate
                                   : read_surrogate(read_file(spec.surrogate));
  const ConvexSurrogate baseline = plane_surrogate(spec.baseline);

  std::vector<Cell> cells;
  for (const auto& inst : spec.instances) {
    for (int q : spec.q_values) {
      for (int n : spec.paths_per_tunnel) {
        for (double f : spec.protected_fractions) {
          for (auto seed : spec.seeds) cells.push_back(Cell{inst, q, n, f, seed});
        }
      }
    }
  }
  std::vector<std::pair<ResultRow, ResultRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      results[i] = run_cell(cells[i], spec, nkcp, baseline);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ResultRow> rows;
  for (auto& [a, b] : results) {
    rows.push_back(std::move(a));
    rows.push_back(std::move(b));
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(12);
  o << v;
  return o.str();
}

bool solved(const ResultRow& r) { return r.ok && r.termination == "converged" && r.feasible; }

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows, bool include_wall_clock) {
  std::ostringstream out;
  out << "instance,q,n,fraction,seed,method,status,termination,exact_objective,reservation_cost,"
         "routing_cost,surrogate_objective,iterations,cuts,reservation_cuts,capacity_cuts,";
  if (include_wall_clock) out << "wall_ms,";
  out << "feasible,max_violation,monotone,links,srlgs,tunnels,gap,error\n";
  for (const ResultRow& r : rows) {
    out << csv_field(r.instance) << ',' << r.q << ',' << r.n << ',' << num(r.fraction) << ','
        << r.seed << ',' << to_string(r.method) << ',' << (r.ok ? "ok" : "error") << ','
        << r.termination << ',' << num(r.exact_objective) << ',' << num(r.reservation_cost) << ','
        << num(r.routing_cost) << ',' << num(r.surrogate_objective) << ',' << r.iterations << ','
        << r.reservation_cuts + r.capacity_cuts << ',' << r.reservation_cuts << ','
        << r.capacity_cuts << ',';
    if (include_wall_clock) out << num(r.wall_ms) << ',';
    out << (r.feasible ? 1 : 0) << ',' << num(r.final_max_violation) << ','
        << (r.objective_monotone ? 1 : 0) << ',' << r.links << ',' << r.srlgs << ','
        << r.tunnels << ',' << (r.gap ? num(*r.gap) : "") << ',' << csv_field(r.error) << '\n';
  }
  return out.str();
}

void emit_plots(const std::vector<ResultRow>& rows, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream ranked;
  ranked << "method,rank,wall_ms\n";
  for (Method m : {Method::kNkcp, Method::kNkcpR}) {
    std::vector<double> times;
    for (const ResultRow& r : rows) {
      if (r.method == m && solved(r)) times.push_back(r.wall_ms);
    }
    std::sort(times.begin(), times.end());
    for (std::size_t i = 0; i < times.size(); ++i) {
      ranked << to_string(m) << ',' << i + 1 << ',' << num(times[i]) << '\n';
    }
  }
  write_file((std::filesystem::path(dir) / "cpu_ranked.csv").string(), ranked.str());

  std::ostringstream gap;
  gap << "instance,q,n,fraction,seed,links,srlgs,tunnels,gap,unsolved\n";
  for (const ResultRow& r : rows) {
    if (r.method != Method::kNkcp) continue;
    gap << csv_field(r.instance) << ',' << r.q << ',' << r.n << ',' << num(r.fraction) << ','
        << r.seed << ',' << r.links << ',' << r.srlgs << ',' << r.tunnels << ','
        << (r.gap ? num(*r.gap) : "") << ',' << (solved(r) ? 0 : 1) << '\n';
  }
  write_file((std::filesystem::path(dir) / "gap_scatter.csv").string(), gap.str());
}

}  // namespace plb
