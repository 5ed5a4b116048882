#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowplan/config.hpp"
#include "flowplan/departure.hpp"
#include "flowplan/search.hpp"
#include "flowplan/validation.hpp"

namespace {

using namespace flowplan;

constexpr int kExitOk = 0;
constexpr int kExitNoPath = 2;
constexpr int kExitConfig = 3;
constexpr int kExitDomain = 4;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Everything a subcommand needs, assembled once from the config file.
class Scenario {
 public:
  RunConfig cfg;
  std::unique_ptr<FlowField> field;
  Graph graph;
  VertexId s = kInvalidVertex;
  VertexId g = kInvalidVertex;
  SearchConfig search_cfg;
  CostContext ctx;

  static Scenario make(const RunConfig& cfg) {
    validate_config(cfg);
    return Scenario(cfg);
  }

  std::filesystem::path out_dir() const {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
  }

 private:
  explicit Scenario(const RunConfig& c)
      : cfg(c),
        field(make_field(c.field)),
        graph(Graph::build_grid(c.region, c.grid_size, c.sectors)) {
    s = graph.nearest_vertex(cfg.start);
    g = graph.nearest_vertex(cfg.goal);
    search_cfg.preset = cfg.preset;
    search_cfg.dphi_max = deg_to_rad(cfg.dphi_max_deg);
    search_cfg.phi_max = deg_to_rad(cfg.phi_max_deg);
    search_cfg.v_min = cfg.v_min;
    search_cfg.v_current_max = resolve_current_bound(cfg, *field);
    search_cfg.opt_course = cfg.opt_course;
    ctx.field = field.get();
    ctx.v_veh_bf = cfg.v_veh_bf;
    ctx.integration = cfg.integration;
  }
};

std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

int cmd_plan(const RunConfig& cfg) {
  Scenario sc = Scenario::make(cfg);
  const SearchResult result = search(sc.graph, sc.search_cfg, sc.s, sc.g, cfg.t0, sc.ctx);
  const auto path = extract_path(result, sc.graph, sc.g);

  const auto dir = sc.out_dir();
  {
    auto csv = open_csv(dir / "counters.csv");
    const std::string line =
        std::string(preset_name(cfg.preset)) + "," + std::to_string(result.counters.cfc) + "," +
        std::to_string(result.counters.cmc) + "," + std::to_string(result.vertices_expanded) +
        "," + (path ? fmt(path->travel_time) : "inf");
    csv << "preset,cfc,cmc,vertices_expanded,travel_time\n" << line << "\n";
    std::cout << "preset,cfc,cmc,vertices_expanded,travel_time\n" << line << "\n";
  }
  if (!path) {
    std::cerr << "no path from start to goal\n";
    return kExitNoPath;
  }
  auto csv = open_csv(dir / "path.csv");
  csv << "index,x,y,arrival_time\n";
  for (std::size_t i = 0; i < path->waypoints.size(); ++i) {
    const auto& w = path->waypoints[i];
    csv << i << "," << fmt(w.pos.x) << "," << fmt(w.pos.y) << "," << fmt(w.arrival) << "\n";
  }
  return kExitOk;
}

int cmd_bench(const std::vector<std::string>& config_paths) {
  std::cout << "preset,grid_size,cfc,cmc,graph_ms,search_ms,total_ms\n";
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
  };
  for (const auto& path : config_paths) {
    const RunConfig cfg = load_config_file(path);
    validate_config(cfg);
    const auto field = make_field(cfg.field);

    const auto t0 = clock::now();
    const Graph graph = Graph::build_grid(cfg.region, cfg.grid_size, cfg.sectors);
    const auto t1 = clock::now();

    SearchConfig scfg;
    scfg.preset = cfg.preset;
    scfg.dphi_max = deg_to_rad(cfg.dphi_max_deg);
    scfg.phi_max = deg_to_rad(cfg.phi_max_deg);
    scfg.v_min = cfg.v_min;
    scfg.v_current_max = resolve_current_bound(cfg, *field);
    scfg.opt_course = cfg.opt_course;
    CostContext ctx;
    ctx.field = field.get();
    ctx.v_veh_bf = cfg.v_veh_bf;
    ctx.integration = cfg.integration;

    const auto t2 = clock::now();
    const SearchResult result = search(graph, scfg, graph.nearest_vertex(cfg.start),
                                       graph.nearest_vertex(cfg.goal), cfg.t0, ctx);
    const auto t3 = clock::now();

    std::cout << preset_name(cfg.preset) << "," << fmt(cfg.grid_size) << ","
              << result.counters.cfc << "," << result.counters.cmc << "," << fmt(ms(t1 - t0))
              << "," << fmt(ms(t3 - t2)) << "," << fmt(ms((t1 - t0) + (t3 - t2))) << "\n";
  }
  return kExitOk;
}

int cmd_departure(const RunConfig& cfg) {
  Scenario sc = Scenario::make(cfg);

  DepartureConfig dep;
  dep.t_lo = cfg.dep_window_start;
  dep.t_hi = cfg.dep_window_end;
  dep.dt_dep = cfg.dep_dt;
  dep.method = cfg.dep_method;
  dep.tol = cfg.dep_tol;
  dep.threads = cfg.dep_threads;

  const Planner fine = make_search_planner(sc.graph, sc.search_cfg, sc.s, sc.g, sc.ctx);

  // optional cheaper sampling stage on a coarser graph
  std::optional<Graph> coarse_graph;
  Planner coarse_planner;
  const Planner* coarse = nullptr;
  if (cfg.coarse_grid_size > 0 || cfg.coarse_sectors > 0) {
    const double gs = cfg.coarse_grid_size > 0 ? cfg.coarse_grid_size : cfg.grid_size;
    const int sect = cfg.coarse_sectors > 0 ? cfg.coarse_sectors : cfg.sectors;
    coarse_graph.emplace(Graph::build_grid(cfg.region, gs, sect));
    coarse_planner = make_search_planner(*coarse_graph, sc.search_cfg,
                                         coarse_graph->nearest_vertex(cfg.start),
                                         coarse_graph->nearest_vertex(cfg.goal), sc.ctx);
    coarse = &coarse_planner;
  }

  const auto result = optimal_departure(fine, dep, coarse);

  const auto dir = sc.out_dir();
  if (result) {
    auto curve = open_csv(dir / "curve.csv");
    curve << "t_dep,t_trav\n";
    for (const auto& p : result->samples) {
      curve << fmt(p.t_dep) << "," << fmt(p.t_trav) << "\n";
    }
  }

  const std::string header = "method,t_dep_opt,t_trav_opt,search_calls,cfc,cmc,flags";
  std::string flags;
  if (result) {
    if (result->boundary_minimum) flags += "boundary_minimum";
    if (result->linear_fallback) flags += std::string(flags.empty() ? "" : ";") + "linear_fallback";
  }
  const std::string line =
      result ? std::string(minimize_method_name(result->method)) + "," + fmt(result->t_dep_opt) +
                   "," + fmt(result->t_trav_opt) + "," + std::to_string(result->refine_calls) +
                   "," + std::to_string(result->counters.cfc) + "," +
                   std::to_string(result->counters.cmc) + "," + flags
             : std::string(minimize_method_name(cfg.dep_method)) + ",inf,inf,0,0,0,no_feasible_departure";
  {
    auto csv = open_csv(dir / "departure.csv");
    csv << header << "\n" << line << "\n";
  }
  std::cout << header << "\n" << line << "\n";
  return result ? kExitOk : kExitNoPath;
}

int cmd_shoot(const RunConfig& cfg, double theta0_deg, double t_end, double dt) {
  Scenario sc = Scenario::make(cfg);
  const double horizon = t_end > 0 ? t_end : cfg.t0 + 4.0 * distance(cfg.start, cfg.goal) / cfg.v_veh_bf;
  const Trajectory traj = shoot_trajectory(cfg.start, deg_to_rad(theta0_deg), cfg.t0, *sc.field,
                                           cfg.v_veh_bf, horizon, dt);
  const auto dir = sc.out_dir();
  auto csv = open_csv(dir / "trajectory.csv");
  csv << "t,x,y,theta\n";
  for (const auto& s : traj.samples) {
    csv << fmt(s.t) << "," << fmt(s.pos.x) << "," << fmt(s.pos.y) << "," << fmt(s.theta) << "\n";
  }
  const auto& last = traj.samples.back();
  std::cout << "final,t=" << fmt(last.t) << ",x=" << fmt(last.pos.x) << ",y=" << fmt(last.pos.y)
            << ",theta=" << fmt(last.theta) << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, double dt) {
  Scenario sc = Scenario::make(cfg);
  const SearchResult result = search(sc.graph, sc.search_cfg, sc.s, sc.g, cfg.t0, sc.ctx);
  const auto path = extract_path(result, sc.graph, sc.g);
  std::cout << "check,status,detail\n";
  if (!path) {
    std::cout << "search,no_path,goal unreached\n";
    return kExitNoPath;
  }
  const double sim_dt = dt > 0 ? dt : 1e-3 * sc.graph.min_edge_length() / cfg.v_veh_bf * 0.5;
  const SimulationReport report = simulate_path(*path, *sc.field, cfg.v_veh_bf, sim_dt);
  if (!report.ok()) {
    std::cout << "simulation,failed,t=" << fmt(report.failure->t) << " x="
              << fmt(report.failure->pos.x) << " y=" << fmt(report.failure->pos.y) << "\n";
    return kExitNoPath;
  }
  const double planned = result.d[static_cast<std::size_t>(sc.g)];
  const double rel = std::abs(report.arrival_time - planned) / path->travel_time;
  std::cout << "simulation,ok,arrival=" << fmt(report.arrival_time) << " planned=" << fmt(planned)
            << " rel_err=" << fmt(rel) << "\n";
  std::cout << "cross_track,ok,max=" << fmt(report.max_cross_track) << "\n";
  return kExitOk;
}

int cmd_graph_stats(const RunConfig& cfg) {
  validate_config(cfg);
  const Graph graph = Graph::build_grid(cfg.region, cfg.grid_size, cfg.sectors);
  std::cout << "vertices=" << graph.vertex_count() << " edges=" << graph.edge_count() << "\n";
  return kExitOk;
}

int cmd_field_export(const RunConfig& cfg, int nx, int ny, int nt, double t_start, double t_end) {
  Scenario sc = Scenario::make(cfg);
  const auto dir = sc.out_dir();
  auto csv = open_csv(dir / "field.csv");
  csv << "x,y,t,u,v\n";
  Counters scratch;
  const double t_lo = std::isfinite(t_start) ? t_start : cfg.dep_window_start;
  const double t_hi = std::isfinite(t_end) ? t_end : cfg.dep_window_end;
  for (int it = 0; it < nt; ++it) {
    const double t = nt > 1 ? t_lo + (t_hi - t_lo) * it / (nt - 1) : t_lo;
    for (int iy = 0; iy < ny; ++iy) {
      const double y = cfg.region.y_min + cfg.region.height() * iy / (ny - 1);
      for (int ix = 0; ix < nx; ++ix) {
        const double x = cfg.region.x_min + cfg.region.width() * ix / (nx - 1);
        const auto s = sc.field->sample({x, y}, t, scratch);
        csv << fmt(x) << "," << fmt(y) << "," << fmt(t) << "," << fmt(s.c.x) << ","
            << fmt(s.c.y) << "\n";
      }
    }
  }
  return kExitOk;
}

struct CommonOpts {
  std::string config_path;
  std::string preset_override;
  std::string method_override;
  std::string out_override;
  double t0_override = std::numeric_limits<double>::quiet_NaN();

  RunConfig load() const {
    RunConfig cfg = load_config_file(config_path);
    if (!preset_override.empty()) {
      const auto p = preset_from_name(preset_override);
      if (!p) throw ConfigError("unknown preset '" + preset_override + "'");
      cfg.preset = *p;
    }
    if (!method_override.empty()) {
      const auto m = minimize_method_from_name(method_override);
      if (!m) throw ConfigError("unknown method '" + method_override + "'");
      cfg.dep_method = *m;
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (!std::isnan(t0_override)) cfg.t0 = t0_override;
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_method = false) {
  cmd->add_option("-c,--config", opts.config_path, "scenario config file")->required();
  cmd->add_option("--preset", opts.preset_override, "override [search] preset");
  cmd->add_option("--out", opts.out_override, "override [output] dir");
  cmd->add_option("--t0", opts.t0_override, "override [mission] t0");
  if (with_method) cmd->add_option("--method", opts.method_override, "override [departure] method");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-varying flow-field path planning"};
  app.require_subcommand(1);

  CommonOpts plan_opts;
  auto* plan_cmd = app.add_subcommand("plan", "run one path search and export the path");
  add_common(plan_cmd, plan_opts);

  std::vector<std::string> bench_configs;
  auto* bench_cmd = app.add_subcommand("bench", "time graph build + search per config");
  bench_cmd->add_option("-c,--config", bench_configs, "scenario config file(s)")->required();

  CommonOpts dep_opts;
  auto* dep_cmd = app.add_subcommand("departure", "find the optimal departure time");
  add_common(dep_cmd, dep_opts, true);

  CommonOpts shoot_opts;
  double theta0_deg = 0;
  double shoot_t_end = -1;
  double shoot_dt = 0.01;
  auto* shoot_cmd = app.add_subcommand("shoot", "integrate one steered trajectory");
  add_common(shoot_cmd, shoot_opts);
  shoot_cmd->add_option("--theta0-deg", theta0_deg, "initial heading in degrees")->required();
  shoot_cmd->add_option("--t-end", shoot_t_end, "integration end time");
  shoot_cmd->add_option("--dt", shoot_dt, "integration step");

  CommonOpts val_opts;
  double val_dt = -1;
  auto* val_cmd = app.add_subcommand("validate", "fly the planned path with a fine simulator");
  add_common(val_cmd, val_opts);
  val_cmd->add_option("--dt", val_dt, "simulation step (default from grid)");

  CommonOpts stats_opts;
  auto* stats_cmd = app.add_subcommand("graph-stats", "print vertex/edge counts");
  add_common(stats_cmd, stats_opts);

  CommonOpts field_opts;
  int f_nx = 61, f_ny = 41, f_nt = 5;
  double f_t0 = std::numeric_limits<double>::quiet_NaN();
  double f_t1 = std::numeric_limits<double>::quiet_NaN();
  auto* field_cmd = app.add_subcommand("field-export", "sample the current field to CSV");
  add_common(field_cmd, field_opts);
  field_cmd->add_option("--nx", f_nx, "samples along x");
  field_cmd->add_option("--ny", f_ny, "samples along y");
  field_cmd->add_option("--nt", f_nt, "time slices");
  field_cmd->add_option("--t-start", f_t0, "first time slice");
  field_cmd->add_option("--t-end", f_t1, "last time slice");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed()) return cmd_plan(plan_opts.load());
    if (bench_cmd->parsed()) return cmd_bench(bench_configs);
    if (dep_cmd->parsed()) return cmd_departure(dep_opts.load());
    if (shoot_cmd->parsed()) return cmd_shoot(shoot_opts.load(), theta0_deg, shoot_t_end, shoot_dt);
    if (val_cmd->parsed()) return cmd_validate(val_opts.load(), val_dt);
    if (stats_cmd->parsed()) return cmd_graph_stats(stats_opts.load());
    if (field_cmd->parsed()) {
      return cmd_field_export(field_opts.load(), f_nx, f_ny, f_nt, f_t0, f_t1);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const IntegrationError& e) {
    std::cerr << "integration error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
