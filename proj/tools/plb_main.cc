#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "plb/bench.h"
#include "plb/error.h"
#include "plb/evaluator.h"
#include "plb/instance_io.h"
#include "plb/nkcp.h"
#include "plb/paths.h"
#include "plb/surrogate.h"

namespace {

using nlohmann::json;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    plb::write_file(out, text);
  }
}

plb::NetworkInstance load_instance(const std::string& file, std::optional<int> q) {
  plb::NetworkInstance g = plb::read_instance(plb::read_file(file));
  if (q) g.srlgs = plb::enumerate_srlgs(g, *q);
  return g;
}

const std::map<std::string, plb::PathMetric> kMetrics{{"hops", plb::PathMetric::kHops},
                                                       {"cost", plb::PathMetric::kLinkCost}};

struct PathFlags {
  int per_tunnel = 3;
  int expansion = 30;
  plb::PathMetric metric = plb::PathMetric::kHops;

  void attach(CLI::App* cmd) {
    cmd->add_option("--paths-per-tunnel", per_tunnel)->check(CLI::Range(1, plb::kMaxPathsPerTunnel));
    cmd->add_option("--expansion", expansion)->check(CLI::PositiveNumber);
    cmd->add_option("--metric", metric)->transform(CLI::CheckedTransformer(kMetrics));
  }

  plb::PathGenConfig config() const {
    plb::PathGenConfig c;
    c.paths_per_tunnel = per_tunnel;
    c.expansion = expansion;
    c.metric = metric;
    return c;
  }
};

int train_approx(int epochs, std::uint64_t seed, double lambda_under, double lr,
                 const std::string& out) {
  plb::TrainConfig config;
  config.epochs = epochs;
  config.seed = seed;
  config.lambda_under = lambda_under;
  config.learning_rate = lr;
  const plb::TrainingGrid grid = plb::build_training_grid();
  const plb::TrainResult result = plb::train(grid, config);
  const plb::FitProfile fit = plb::fit_profile(result.surrogate, grid);
  std::cerr << "grid points " << grid.samples.size() << ", loss " << result.loss_history.front()
            << " -> " << result.loss_history.back() << "\n"
            << "max rel error " << fit.max_relative_error << " at (" << fit.worst_rel_x << ", "
            << fit.worst_rel_y << "), mean rel error " << fit.mean_relative_error << "\n";
  emit(out, plb::write_surrogate(result.surrogate));
  return 0;
}

int convert(const std::string& in, const std::string& format, const plb::DemandGenSpec& demands,
            bool generate, std::optional<int> q, const std::string& out) {
  const std::string text = plb::read_file(in);
  std::string fmt = format;
  if (fmt.empty()) fmt = ends_with(in, ".graphml") ? "graphml" : ends_with(in, ".json") ? "json" : "sndlib";
  plb::NetworkInstance g = fmt == "graphml" ? plb::parse_graphml(text)
                           : fmt == "json"  ? plb::read_instance(text)
                                            : plb::parse_sndlib(text);
  if (generate || g.tunnels.empty()) {
    g.tunnels.clear();
    g = plb::generate_demands(std::move(g), demands);
  }
  if (q) g.srlgs = plb::enumerate_srlgs(g, *q);
  for (const auto& v : plb::validate(g)) std::cerr << "warning: " << v.what << "\n";
  std::cerr << g.nodes.size() << " nodes, " << g.links.size() << " links, " << g.tunnels.size()
            << " tunnels (" << g.protected_count() << " protected), " << g.srlgs.size()
            << " srlgs\n";
  emit(out, plb::write_instance(g));
  return 0;
}

int make_paths(const std::string& instance_file, std::optional<int> q, const PathFlags& flags,
               const std::string& out) {
  const plb::NetworkInstance g = load_instance(instance_file, q);
  const plb::PathSet ps = plb::build_pathsets(g, flags.config());
  emit(out, plb::write_paths(g, ps));
  return 0;
}

int solve(const std::string& instance_file, const std::string& paths_file,
          const std::string& surrogate_file, bool baseline, std::optional<int> q, double tolerance,
          double time_limit, plb::Encoding encoding, const PathFlags& flags,
          const std::string& splits_out, const std::string& out) {
  const plb::NetworkInstance g = load_instance(instance_file, q);
  const plb::PathSet ps = paths_file.empty() ? plb::build_pathsets(g, flags.config())
                                             : plb::read_paths(g, plb::read_file(paths_file));
  plb::ConvexSurrogate surrogate;
  if (baseline) {
    surrogate = plb::plane_surrogate(plb::kReportedPlane);
  } else if (!surrogate_file.empty()) {
    surrogate = plb::read_surrogate(plb::read_file(surrogate_file));
  } else {
    std::cerr << "training surrogate with default settings\n";
    surrogate = plb::train(plb::build_training_grid(), plb::TrainConfig{}).surrogate;
  }
  plb::NkcpOptions options;
  options.encoding = encoding;
  options.separation.tolerance = tolerance;
  options.time_limit_s = time_limit;
  options.keep_cuts = false;
  const plb::SolveReport r = plb::solve_nkcp(g, ps, surrogate, options);

  std::cerr << "termination " << plb::to_string(r.termination) << " after " << r.iterations
            << " rounds, " << r.total_cuts() << " cuts, " << r.wall_ms << " ms\n";
  if (!r.message.empty()) std::cerr << r.message << "\n";
  if (!r.has_solution()) {
    json j{{"termination", plb::to_string(r.termination)},
           {"message", r.message},
           {"infeasible_iteration", r.infeasible_iteration},
           {"stats", {{"iterations", r.iterations}, {"cuts", r.total_cuts()}, {"wall_ms", r.wall_ms}}}};
    emit(out, j.dump(2));
    return 3;
  }
  std::cerr << "exact cost " << r.cost.total() << " (reservation " << r.cost.reservation_cost
            << ", routing " << r.cost.routing_cost << "), surrogate objective "
            << r.surrogate_objective << ", feasible " << (r.feasible ? "yes" : "no") << "\n";

  plb::SolutionRecord record;
  record.splits = r.splits;
  for (const auto& res : r.reservations) record.reservations.push_back(res.value);
  record.reservation_cost = r.cost.reservation_cost;
  record.routing_cost = r.cost.routing_cost;
  record.iterations = r.iterations;
  record.cuts = r.total_cuts();
  record.wall_ms = r.wall_ms;
  record.feasible = r.feasible;
  json j = json::parse(plb::write_solution(g, ps, record));
  j["termination"] = plb::to_string(r.termination);
  j["objective"]["surrogate"] = r.surrogate_objective;
  j["stats"]["reservation_cuts"] = r.reservation_cuts;
  j["stats"]["capacity_cuts"] = r.capacity_cuts;
  j["stats"]["max_violation"] = r.final_max_violation;
  if (!r.message.empty()) j["message"] = r.message;
  emit(out, j.dump(2));
  if (!splits_out.empty()) plb::write_file(splits_out, plb::write_splits(g, ps, r.splits));
  return 0;
}

int evaluate(const std::string& instance_file, const std::string& paths_file,
             const std::string& splits_file, std::optional<int> q, const std::string& out) {
  const plb::NetworkInstance g = load_instance(instance_file, q);
  const plb::PathSet ps = plb::read_paths(g, plb::read_file(paths_file));
  const plb::SplitAssignment splits = plb::read_splits(g, ps, plb::read_file(splits_file));
  plb::check_splits(ps, splits);
  const plb::Incidence inc(g, ps);
  const auto res = plb::exact_reservations(g, inc, splits);
  std::ostringstream csv;
  csv.precision(12);
  csv << "link_id,reservation,argmax_srlg\n";
  for (std::size_t e = 0; e < res.size(); ++e) {
    csv << g.links[e].id << ',' << res[e].value << ','
        << (res[e].argmax_srlg >= 0 ? g.srlgs[res[e].argmax_srlg].id : "") << '\n';
  }
  emit(out, csv.str());
  const plb::CostBreakdown cost = plb::total_cost(g, ps, res, splits);
  const auto violations = plb::check_capacity(g, inc, splits);
  std::cerr << "reservation cost " << cost.reservation_cost << ", routing cost "
            << cost.routing_cost << ", total " << cost.total() << ", capacity "
            << (violations.empty() ? "ok" : std::to_string(violations.size()) + " violations")
            << "\n";
  return 0;
}

int bench(const std::string& spec_file, const std::string& out, const std::string& plots) {
  const std::string base = std::filesystem::path(spec_file).parent_path().string();
  const plb::ExperimentSpec spec = plb::read_experiment_spec(plb::read_file(spec_file), base);
  const auto rows = plb::run_matrix(spec);
  emit(out, plb::results_csv(rows));
  if (!plots.empty()) plb::emit_plots(rows, plots);
  int failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  std::cerr << rows.size() << " rows, " << failed << " failed cells\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Protected load balancing with shared SRLG reservations"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train-approx", "train the convex surrogate of x/(1-y)");
  int epochs = 300;
  std::uint64_t seed = 7;
  double lambda_under = 0.0;
  double lr = 1e-3;
  std::string train_out;
  train_cmd->add_option("--epochs", epochs)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--lambda-under", lambda_under)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", lr)->check(CLI::PositiveNumber);
  train_cmd->add_option("--out", train_out, "surrogate JSON (stdout when omitted)");

  auto* convert_cmd = app.add_subcommand("convert", "SNDlib/GraphML to instance JSON");
  std::string convert_in, convert_format, convert_out;
  plb::DemandGenSpec demands;
  bool generate = false;
  std::optional<int> convert_q;
  convert_cmd->add_option("input", convert_in)->required()->check(CLI::ExistingFile);
  convert_cmd->add_option("--format", convert_format)->check(CLI::IsMember({"sndlib", "graphml", "json"}));
  convert_cmd->add_flag("--generate-demands", generate, "replace demands with random tunnels");
  convert_cmd->add_option("--tunnels", demands.tunnel_count)->check(CLI::PositiveNumber);
  convert_cmd->add_option("--protected-fraction", demands.protected_fraction)->check(CLI::Range(0.0, 1.0));
  convert_cmd->add_option("--demand-lo", demands.lo);
  convert_cmd->add_option("--demand-hi", demands.hi);
  convert_cmd->add_option("--seed", demands.seed);
  convert_cmd->add_option("--q", convert_q, "enumerate SRLGs of q links")->check(CLI::Range(1, 3));
  convert_cmd->add_option("--out", convert_out);

  auto* paths_cmd = app.add_subcommand("paths", "candidate paths per tunnel");
  std::string paths_instance, paths_out;
  std::optional<int> paths_q;
  PathFlags path_flags;
  paths_cmd->add_option("--instance", paths_instance)->required()->check(CLI::ExistingFile);
  paths_cmd->add_option("--q", paths_q)->check(CLI::Range(1, 3));
  path_flags.attach(paths_cmd);
  paths_cmd->add_option("--out", paths_out);

  auto* solve_cmd = app.add_subcommand("solve", "split ratios and reservations");
  std::string solve_instance, solve_paths, solve_surrogate, solve_out, solve_splits;
  std::optional<int> solve_q;
  double tolerance = 1e-6;
  double time_limit = 600.0;
  bool baseline = false;
  plb::Encoding encoding = plb::Encoding::kEquality;
  PathFlags solve_path_flags;
  solve_cmd->add_option("--instance", solve_instance)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--paths", solve_paths, "generated when omitted")->check(CLI::ExistingFile);
  solve_cmd->add_option("--surrogate", solve_surrogate, "trained when omitted")->check(CLI::ExistingFile);
  solve_cmd->add_flag("--regression", baseline, "use the linear regression plane (NKCP-R)");
  solve_cmd->add_option("--q", solve_q)->check(CLI::Range(1, 3));
  solve_cmd->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--time-limit", time_limit)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--encoding", encoding)
      ->transform(CLI::CheckedTransformer(std::map<std::string, plb::Encoding>{
          {"equality", plb::Encoding::kEquality}, {"inequality", plb::Encoding::kInequality}}));
  solve_path_flags.attach(solve_cmd);
  solve_cmd->add_option("--splits-out", solve_splits, "also write the splits JSON");
  solve_cmd->add_option("--out", solve_out, "report JSON (stdout when omitted)");

  auto* eval_cmd = app.add_subcommand("evaluate", "exact reservations of given splits");
  std::string eval_instance, eval_paths, eval_splits, eval_out;
  std::optional<int> eval_q;
  eval_cmd->add_option("--instance", eval_instance)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--paths", eval_paths)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--splits", eval_splits)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--q", eval_q)->check(CLI::Range(1, 3));
  eval_cmd->add_option("--out", eval_out, "CSV (stdout when omitted)");

  auto* bench_cmd = app.add_subcommand("bench", "run an experiment matrix (workers: PLB_WORKERS)");
  std::string spec_file, bench_out, plots;
  bench_cmd->add_option("--spec", spec_file)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench_out);
  bench_cmd->add_option("--plots", plots, "directory for plot data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return train_approx(epochs, seed, lambda_under, lr, train_out);
    if (*convert_cmd) return convert(convert_in, convert_format, demands, generate, convert_q, convert_out);
    if (*paths_cmd) return make_paths(paths_instance, paths_q, path_flags, paths_out);
    if (*solve_cmd) {
      return solve(solve_instance, solve_paths, solve_surrogate, baseline, solve_q, tolerance,
                   time_limit, encoding, solve_path_flags, solve_splits, solve_out);
    }
    if (*eval_cmd) return evaluate(eval_instance, eval_paths, eval_splits, eval_q, eval_out);
    if (*bench_cmd) return bench(spec_file, bench_out, plots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
