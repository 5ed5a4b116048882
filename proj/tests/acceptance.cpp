// Acceptance gate: ten scenario-level criteria, one PASS/FAIL line each.
// Exits nonzero when any criterion fails.  Runs the real engine end to end;
// expected values marked "frozen" were produced by the independent oracles in
// this binary and in tests/validation_tests.cpp, then pinned.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowplan/departure.hpp"
#include "flowplan/flow_field.hpp"
#include "flowplan/graph.hpp"
#include "flowplan/search.hpp"
#include "flowplan/validation.hpp"

using namespace flowplan;
using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

struct Fixture {
  const char* name;
  Vec2 start;
  double frozen_arrival;  // frozen ITVE arrival, departure t0 = 0
};

// Five start positions spread across the jet region, common goal (11.2, 0).
constexpr Fixture kFixtures[] = {
    {"SP1", {0.4, -2.4}, 11.979568}, {"SP2", {2.4, 2.4}, 9.890912},
    {"SP3", {4.0, -1.6}, 5.983083},  {"SP4", {6.0, 1.2}, 4.441964},
    {"SP5", {8.0, 1.6}, 3.025367},
};
constexpr Vec2 kGoal{11.2, 0};
constexpr double kVveh = 0.5;
constexpr double kCurrentBound = 1.05;

struct FixtureRuns {
  VertexId s = kInvalidVertex;
  VertexId g = kInvalidVertex;
  SearchResult tve, itve, astar, ztve, zastar, ztve_narrow;
};

SearchConfig preset_config(Preset p, double dphi_deg = 27.5) {
  SearchConfig cfg;
  cfg.preset = p;
  cfg.dphi_max = deg_to_rad(dphi_deg);
  cfg.v_current_max = kCurrentBound;
  return cfg;
}

std::vector<VertexId> chain_of(const SearchResult& r, const Graph& graph, VertexId g) {
  const auto path = extract_path(r, graph, g);
  std::vector<VertexId> chain;
  if (!path) return chain;
  for (const auto& w : path->waypoints) chain.push_back(w.vertex);
  return chain;
}

struct Criterion {
  int number;
  bool pass;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

Criterion criterion_1(const Graph& graph, std::vector<FixtureRuns>& runs, double elapsed_s) {
  bool pass = elapsed_s < 5.0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    const auto& r = runs[i];
    const double d = r.itve.d[static_cast<std::size_t>(r.g)];
    const bool same_d = r.tve.d[static_cast<std::size_t>(r.g)] == d &&
                        r.astar.d[static_cast<std::size_t>(r.g)] == d;
    const bool same_path = chain_of(r.tve, graph, r.g) == chain_of(r.itve, graph, r.g) &&
                           chain_of(r.astar, graph, r.g) == chain_of(r.itve, graph, r.g);
    const bool frozen_ok = std::abs(d - kFixtures[i].frozen_arrival) <= 1e-5;
    pass = pass && same_d && same_path && frozen_ok && std::isfinite(d);
    detail << kFixtures[i].name << "=" << fmt(d) << (same_d && same_path ? "" : "(MISMATCH)")
           << (frozen_ok ? "" : "(OFF-FROZEN)") << " ";
  }
  detail << "TVE/ITVE/A*TVE identical, " << fmt(elapsed_s, 2) << "s (< 5s)";
  return {1, pass, detail.str()};
}

Criterion criterion_2(const std::vector<FixtureRuns>& runs) {
  bool pass = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    const auto& r = runs[i];
    const auto check = [&](long long num, long long den, double bound) {
      const double ratio = static_cast<double>(num) / static_cast<double>(den);
      if (!(ratio <= bound)) pass = false;
      return ratio;
    };
    const double cfc_it = check(r.itve.counters.cfc, r.tve.counters.cfc, 0.6);
    const double cfc_zi = check(r.ztve.counters.cfc, r.itve.counters.cfc, 0.5);
    check(r.zastar.counters.cfc, std::min(r.astar.counters.cfc, r.ztve.counters.cfc), 1.0);
    check(r.zastar.counters.cfc * 8, r.tve.counters.cfc, 1.0);
    check(r.itve.counters.cmc, r.tve.counters.cmc, 0.6);
    check(r.ztve.counters.cmc, r.itve.counters.cmc, 0.5);
    check(r.zastar.counters.cmc, std::min(r.astar.counters.cmc, r.ztve.counters.cmc), 1.0);
    check(r.zastar.counters.cmc * 8, r.tve.counters.cmc, 1.0);
    detail << kFixtures[i].name << " cfc I/T=" << fmt(cfc_it, 3) << " Z/I=" << fmt(cfc_zi, 3)
           << " ";
  }
  detail << (pass ? "all CFC+CMC ratio bounds hold" : "RATIO BOUND VIOLATED");
  return {2, pass, detail.str()};
}

Criterion criterion_3(const Graph& graph, const CostContext& ctx,
                      const std::vector<FixtureRuns>& runs) {
  bool exact_at_default = true;
  int degraded = 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    const auto& r = runs[i];
    const auto g = static_cast<std::size_t>(r.g);
    if (r.ztve.d[g] != r.itve.d[g] || r.zastar.d[g] != r.itve.d[g]) {
      exact_at_default = false;
      detail << kFixtures[i].name << " NOT EXACT at 27.5deg ";
    }
    if (r.ztve_narrow.d[g] > r.itve.d[g] + 1e-12) {
      ++degraded;
      detail << kFixtures[i].name << "+" << fmt(r.ztve_narrow.d[g] - r.itve.d[g], 4)
             << "@17.5deg ";
    }
  }
  (void)graph;
  (void)ctx;
  const bool pass = exact_at_default && degraded >= 1;
  detail << (exact_at_default ? "ZTVE/ZA*TVE exact on all five at 27.5deg; " : "")
         << degraded << " fixture(s) degrade at 17.5deg";
  return {3, pass, detail.str()};
}

Criterion criterion_4(const FlowField& jet, const std::vector<FixtureRuns>& runs) {
  const auto start = clk::now();
  bool pass = true;
  std::ostringstream detail;
  ShootingOptions opts;
  opts.current_bound = kCurrentBound;
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    const auto ref = optimal_control_reference(kFixtures[i].start, kGoal, 0.0, jet, kVveh, opts);
    if (!ref) {
      pass = false;
      detail << kFixtures[i].name << " NO REFERENCE ";
      continue;
    }
    const double planned = runs[i].itve.d[static_cast<std::size_t>(runs[i].g)];
    const double gap = (planned - ref->arrival) / ref->arrival;
    if (!(gap >= -0.005 && gap <= 0.05)) pass = false;
    detail << kFixtures[i].name << "+" << fmt(gap * 100.0, 2) << "% ";
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) pass = false;
  detail << "vs shooting reference (each in [-0.5%, 5%]), " << fmt(elapsed, 1) << "s (< 30s)";
  return {4, pass, detail.str()};
}

Criterion criterion_5(const Graph& graph, const CostContext& ctx,
                      std::optional<Path>& departure_path_out) {
  const VertexId s = graph.nearest_vertex(kFixtures[0].start);
  const VertexId g = graph.nearest_vertex(kGoal);
  const SearchConfig scfg = preset_config(Preset::ITVE);
  const Planner planner = make_search_planner(graph, scfg, s, g, ctx);

  DepartureConfig dep;
  dep.t_lo = 0;
  dep.t_hi = 48;
  dep.dt_dep = 4;
  dep.tol = 0.01;
  dep.threads = 1;

  int calls[3] = {0, 0, 0};
  double t_dep_brent = kInfinity;
  const MinimizeMethod methods[] = {MinimizeMethod::Brent, MinimizeMethod::Fibonacci,
                                    MinimizeMethod::Golden};
  bool pass = true;
  for (int m = 0; m < 3; ++m) {
    dep.method = methods[m];
    const auto result = optimal_departure(planner, dep);
    if (!result) {
      return {5, false, "pipeline found no feasible departure"};
    }
    calls[m] = result->refine_calls;
    if (m == 0) t_dep_brent = result->t_dep_opt;
  }

  // Frozen dense-sweep reference (dt = 0.01 over [0, 48]): 42.4604.
  const double dense_ref = 42.4604;
  const double published = 42.591;
  pass = pass && std::abs(t_dep_brent - dense_ref) <= 0.05 &&
         std::abs(t_dep_brent - published) <= 1.0 && calls[0] < calls[1] && calls[1] < calls[2];

  {  // keep the optimal-departure path for criterion 7
    const auto r = search(graph, scfg, s, g, t_dep_brent, ctx);
    departure_path_out = extract_path(r, graph, g);
  }

  std::ostringstream detail;
  detail << "t_dep=" << fmt(t_dep_brent, 4) << " (dense sweep " << fmt(dense_ref, 4)
         << " +-0.05, published " << fmt(published, 3) << " +-1.0); calls brent " << calls[0]
         << " < fibonacci " << calls[1] << " < golden " << calls[2];
  return {5, pass, detail.str()};
}

Criterion criterion_6(const FlowField& jet) {
  std::mt19937 rng(20260816u);
  const auto uniform01 = [&] { return (rng() >> 5) * (1.0 / 134217728.0); };  // 27-bit mantissa

  int checked = 0;
  int feasible = 0;
  bool pass = true;
  std::ostringstream detail;
  for (int trial = 0; trial < 24; ++trial) {
    const int kind = trial % 3;  // 0 still, 1 uniform, 2 jet
    const int sectors = 1 + static_cast<int>(uniform01() * 2.0);

    std::unique_ptr<FlowField> owned;
    const FlowField* field = nullptr;
    double v_veh = kVveh;
    Box2 region{0, 1.2, 0, 1.2};
    if (kind == 0) {
      owned = std::make_unique<UniformField>(Vec2{0, 0});
      field = owned.get();
    } else if (kind == 1) {
      const double mag = 0.35 * uniform01();
      const double ang = 2.0 * std::numbers::pi * uniform01();
      owned = std::make_unique<UniformField>(Vec2{mag * std::cos(ang), mag * std::sin(ang)});
      field = owned.get();
    } else {
      const double x0 = 10.8 * uniform01();
      const double y0 = -4.0 + 6.8 * uniform01();
      region = {x0, x0 + 1.2, y0, y0 + 1.2};
      field = &jet;
      v_veh = 1.2;  // outruns the jet everywhere, keeps every edge feasible
    }

    const Graph graph = Graph::build_grid(region, 0.4, sectors);
    const auto n = graph.vertex_count();
    const auto s = static_cast<VertexId>(uniform01() * static_cast<double>(n));
    auto g = static_cast<VertexId>(uniform01() * static_cast<double>(n));
    if (g == s) g = static_cast<VertexId>((static_cast<std::size_t>(g) + 1) % n);
    const double t0 = 10.0 * uniform01();

    Counters tally;
    CostContext ctx{field, v_veh, {}, &tally};
    const auto ex = exhaustive_search(graph, s, g, t0, ctx);
    const auto r = search(graph, preset_config(Preset::ITVE), s, g, t0, ctx);
    const double d = r.d[static_cast<std::size_t>(g)];
    ++checked;
    if (ex.has_value() != std::isfinite(d) ||
        (ex && ex->waypoints.back().arrival != d)) {
      pass = false;
      detail << "instance " << trial << " MISMATCH ";
    }
    if (ex) ++feasible;
  }
  pass = pass && checked >= 20;
  detail << checked << " random instances (" << feasible
         << " feasible), exhaustive == ITVE arrival on each";
  return {6, pass, detail.str()};
}

Criterion criterion_7(const Graph& graph, const FlowField& jet,
                      const std::vector<FixtureRuns>& runs,
                      const std::optional<Path>& departure_path) {
  bool pass = true;
  std::ostringstream detail;
  const double dt = 4e-4;  // resolves the 0.4-length edges at v = 0.5
  double worst = 0;
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    const auto path = extract_path(runs[i].itve, graph, runs[i].g);
    if (!path) {
      pass = false;
      continue;
    }
    const auto sim = simulate_path(*path, jet, kVveh, dt);
    const double planned = runs[i].itve.d[static_cast<std::size_t>(runs[i].g)];
    const double rel = std::abs(sim.arrival_time - planned) / path->travel_time;
    worst = std::max(worst, rel);
    if (!sim.ok() || rel > 0.01) {
      pass = false;
      detail << kFixtures[i].name << " rel=" << fmt(rel, 5) << " ";
    }
  }
  if (departure_path) {
    const auto sim = simulate_path(*departure_path, jet, kVveh, dt);
    const double planned = departure_path->waypoints.back().arrival;
    const double rel = std::abs(sim.arrival_time - planned) / departure_path->travel_time;
    worst = std::max(worst, rel);
    if (!sim.ok() || rel > 0.01) pass = false;
  } else {
    pass = false;
  }
  detail << "all planned paths re-flown, worst |sim - planned| = " << fmt(worst * 100.0, 3)
         << "% of travel (<= 1%)";
  return {7, pass, detail.str()};
}

Criterion criterion_8(const Graph& graph, const CostContext& ctx,
                      const std::vector<FixtureRuns>& runs) {
  // For every vertex the forward pass reached, re-plan from that vertex at its
  // arrival time; the heuristic must not exceed the true remaining cost.
  const SearchConfig audit_cfg = preset_config(Preset::ITVE);
  const VertexId g = graph.nearest_vertex(kGoal);
  const Vec2 goal_pos = graph.position(g);
  long long audited = 0;
  long long violations = 0;
  double worst_margin = kInfinity;
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    const auto& d = runs[i].itve.d;
    for (std::size_t u = 0; u < d.size(); ++u) {
      if (!std::isfinite(d[u])) continue;
      const auto from = search(graph, audit_cfg, static_cast<VertexId>(u), g, d[u], ctx);
      const double remaining = from.d[static_cast<std::size_t>(g)] - d[u];
      if (!std::isfinite(remaining)) continue;  // goal unreachable from u: no bound to violate
      const double h =
          heuristic(graph.position(static_cast<VertexId>(u)), goal_pos, kVveh, kCurrentBound);
      ++audited;
      worst_margin = std::min(worst_margin, remaining - h);
      if (h > remaining + 1e-12) ++violations;
    }
  }
  std::ostringstream detail;
  detail << audited << " vertex audits across five fixtures, " << violations
         << " admissibility violations (slack min " << fmt(worst_margin, 6) << ")";
  return {8, violations == 0 && audited > 3000, detail.str()};
}

Criterion criterion_9() {
  bool pass = true;
  std::ostringstream detail;

  SearchConfig cfg;
  cfg.preset = Preset::HTTVE;
  cfg.v_min = 0.05;
  cfg.phi_max = deg_to_rad(60);

  const Box2 region{0, 8, -3, 3};
  const Graph graph = Graph::build_grid(region, 0.4, 3);

  {  // still water: the desired track is a lattice line, area must be exactly 0
    Counters tally;
    UniformField still({0, 0});
    CostContext ctx{&still, kVveh, {}, &tally};
    const VertexId s = graph.nearest_vertex({0.4, -2.0});
    const VertexId g = graph.nearest_vertex({7.6, 1.6});
    const auto r = search(graph, cfg, s, g, 0.0, ctx);
    const double area = r.area[static_cast<std::size_t>(g)];
    const double arrival = r.d[static_cast<std::size_t>(g)];
    const double straight = 9.0 * 0.4 * std::sqrt(5.0) / kVveh;
    // area is a sum of cross products of lattice coordinates; zero up to
    // floating-point accumulation (~1e-15 over nine edges)
    if (area > 1e-12 || std::abs(arrival - straight) > 1e-9) pass = false;
    detail << "still: area=" << fmt(area, 6) << " arrival=" << fmt(arrival, 4) << "; ";
  }

  {  // adverse band across the track: HTTVE holds the line, ITVE detours
    Counters tally;
    ShearBandField band(-0.4, 1.0);
    CostContext ctx{&band, kVveh, {}, &tally};
    const VertexId s = graph.nearest_vertex({0.4, 0});
    const VertexId g = graph.nearest_vertex({7.6, 0});
    const Vec2 track_a = graph.position(s);
    const Vec2 track_b = graph.position(g);

    const auto hold = search(graph, cfg, s, g, 0.0, ctx);
    const double hold_area = hold.area[static_cast<std::size_t>(g)];

    const auto fast = search(graph, preset_config(Preset::ITVE), s, g, 0.0, ctx);
    const auto fast_path = extract_path(fast, graph, g);
    double fast_area = 0;
    if (fast_path) {
      for (std::size_t i = 1; i < fast_path->waypoints.size(); ++i) {
        fast_area += afunc(fast_path->waypoints[i - 1].pos, fast_path->waypoints[i].pos, track_a,
                           track_b);
      }
    } else {
      pass = false;
    }
    if (!(hold_area <= fast_area + 1e-9)) pass = false;
    detail << "band: XTE area HTTVE=" << fmt(hold_area, 4) << " <= ITVE path " << fmt(fast_area, 4)
           << " (arrivals " << fmt(hold.d[static_cast<std::size_t>(g)], 2) << " vs "
           << fmt(fast.d[static_cast<std::size_t>(g)], 2) << ")";
  }
  return {9, pass, detail.str()};
}

Criterion criterion_10() {
  std::mt19937 rng(7u);
  const auto uniform01 = [&] { return (rng() >> 5) * (1.0 / 134217728.0); };
  bool pass = true;
  std::ostringstream detail;

  {  // Akima: exact on straight-line data
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const double a = 4.0 * uniform01() - 2.0;
      const double b = 4.0 * uniform01() - 2.0;
      std::vector<SupportPoint> pts;
      double x = 10.0 * uniform01();
      for (int i = 0; i < 7; ++i) {
        pts.push_back({x, a * x + b});
        x += 0.1 + 2.0 * uniform01();
      }
      const AkimaCurve curve = AkimaCurve::fit(pts);
      for (int k = 0; k < 50; ++k) {
        const double t = pts.front().t_dep + (pts.back().t_dep - pts.front().t_dep) * uniform01();
        worst = std::max(worst, std::abs(curve(t) - (a * t + b)));
      }
    }
    if (worst > 1e-9) pass = false;
    detail << "Akima linear-exactness err=" << fmt(worst, 12) << "; ";
  }

  {  // Akima: no overshoot on monotone data
    int overshoots = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<SupportPoint> pts;
      double x = 0, y = 0;
      const int n = 5 + static_cast<int>(uniform01() * 8.0);
      for (int i = 0; i < n; ++i) {
        pts.push_back({x, y});
        x += 0.1 + 2.0 * uniform01();
        y += 2.0 * uniform01();  // nondecreasing
      }
      const AkimaCurve curve = AkimaCurve::fit(pts);
      for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
        for (int k = 1; k < 20; ++k) {
          const double t =
              pts[seg].t_dep + (pts[seg + 1].t_dep - pts[seg].t_dep) * (k / 20.0);
          const double v = curve(t);
          if (v < pts[seg].t_trav - 1e-9 || v > pts[seg + 1].t_trav + 1e-9) ++overshoots;
        }
      }
    }
    if (overshoots != 0) pass = false;
    detail << overshoots << " overshoots on 1000 monotone sets; ";
  }

  {  // step-size controller clamps
    int clamp_violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const double h_min = 1e-5 + 1e-3 * uniform01();
      const double h_max = h_min * (2.0 + 100.0 * uniform01());
      const double h = h_min + (h_max - h_min) * uniform01();
      const double err = uniform01() < 0.1 ? 0.0 : std::pow(10.0, -8.0 + 10.0 * uniform01());
      const double eps = 1e-4;
      const double next = step_size_update(h, err, eps, 0.9, h_min, h_max);
      if (!(next >= h_min && next <= h_max)) ++clamp_violations;
      if (err <= 0.0 && next != h_max) ++clamp_violations;
    }
    if (clamp_violations != 0) pass = false;
    detail << clamp_violations << " step-clamp violations; ";
  }

  {  // integrator order on the jet (long arc: errors above the round-off floor)
    MeanderingJetField jet;
    const auto endpoint = [&](double dt) {
      return shoot_trajectory({0.4, -2.4}, 0.5, 0.0, jet, kVveh, 8.0, dt).samples.back();
    };
    const TrajectorySample ref = endpoint(0.00125);
    const auto err = [&](double dt) {
      const TrajectorySample s = endpoint(dt);
      return std::hypot(distance(s.pos, ref.pos), s.theta - ref.theta);
    };
    const double order12 = std::log2(err(0.04) / err(0.02));
    const double order23 = std::log2(err(0.02) / err(0.01));
    if (!(order12 > 3.5 && order23 > 3.5)) pass = false;
    detail << "integrator order " << fmt(order12, 2) << "/" << fmt(order23, 2) << " (> 3.5)";
  }
  return {10, pass, detail.str()};
}

}  // namespace

int main() {
  MeanderingJetField jet;
  const Graph graph = Graph::build_grid({0, 12, -4, 4}, 0.4, 3);
  Counters tally;
  const CostContext ctx{&jet, kVveh, {}, &tally};

  // Shared fixture runs (criteria 1-3, 7, 8).
  const auto t_runs = clk::now();
  std::vector<FixtureRuns> runs(std::size(kFixtures));
  const VertexId g = graph.nearest_vertex(kGoal);
  for (std::size_t i = 0; i < std::size(kFixtures); ++i) {
    auto& r = runs[i];
    r.s = graph.nearest_vertex(kFixtures[i].start);
    r.g = g;
    r.tve = search(graph, preset_config(Preset::TVE), r.s, g, 0.0, ctx);
    r.itve = search(graph, preset_config(Preset::ITVE), r.s, g, 0.0, ctx);
    r.astar = search(graph, preset_config(Preset::AStarTVE), r.s, g, 0.0, ctx);
  }
  const double core_elapsed = seconds_since(t_runs);
  for (auto& r : runs) {
    r.ztve = search(graph, preset_config(Preset::ZTVE), r.s, g, 0.0, ctx);
    r.zastar = search(graph, preset_config(Preset::ZAStarTVE), r.s, g, 0.0, ctx);
    r.ztve_narrow = search(graph, preset_config(Preset::ZTVE, 17.5), r.s, g, 0.0, ctx);
  }

  std::optional<Path> departure_path;
  std::vector<Criterion> results;
  results.push_back(criterion_1(graph, runs, core_elapsed));
  results.push_back(criterion_2(runs));
  results.push_back(criterion_3(graph, ctx, runs));
  results.push_back(criterion_4(jet, runs));
  results.push_back(criterion_5(graph, ctx, departure_path));
  results.push_back(criterion_6(jet));
  results.push_back(criterion_7(graph, jet, runs, departure_path));
  results.push_back(criterion_8(graph, ctx, runs));
  results.push_back(criterion_9());
  results.push_back(criterion_10());

  int failures = 0;
  for (const auto& c : results) {
    if (!c.pass) ++failures;
    std::printf("[%s] criterion %d: %s\n", c.pass ? "PASS" : "FAIL", c.number, c.detail.c_str());
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
