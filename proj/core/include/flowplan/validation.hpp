#pragma once

#include <optional>

#include "flowplan/search.hpp"
#include "flowplan/zermelo.hpp"

namespace flowplan {

struct SimulationFailure {
  Vec2 pos;
  double t = 0;
  enum class Reason { InfeasibleStep, WindowExceeded } reason = Reason::InfeasibleStep;
};

struct SimulationReport {
  double arrival_time = 0;
  double max_cross_track = 0;  // versus the straight start->goal reference line
  std::vector<double> edge_durations;
  std::optional<SimulationFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

// Flies the path edge by edge with a fine fixed time step, holding the ground
// course of each edge by re-solving the steering triangle every step.  This is
// a first-order independent check of wfunc/search arrival times.  dt must
// resolve the shortest edge: dt <= 1e-3 * (shortest edge length / v_veh_bf).
SimulationReport simulate_path(const Path& path, const FlowField& field, double v_veh_bf,
                               double dt);

// Enumerates every simple path s->g (branch-and-bound on arrival time) and
// returns the earliest-arrival path.  Only for tiny graphs.
std::optional<Path> exhaustive_search(const Graph& graph, VertexId s, VertexId g, double t0,
                                      const CostContext& ctx, std::size_t max_vertices = 30);

struct ShootingOptions {
  double dt = 0.005;          // step for the final reported trajectory
  double scan_dt = 0.02;      // step for survey shots (scan, bracketing, refinement)
  double t_max_factor = 6.0;  // horizon: t0 + factor * distance / v_veh_bf
  int scan_count = 720;       // initial-heading scan resolution
  double miss_tol = 0.01;     // required terminal miss distance
  double capture_radius = 1.0;  // closest-approach radius worth bracketing
  int max_bisections = 100;
  double current_bound = 0;  // max current speed if known (> 0 enables pruning
                             // shots that can no longer come near the goal)
};

// Time-optimal point-to-point reference by shooting: scans the initial
// heading, bisects sign-change brackets of the signed closest-approach offset,
// polishes non-crossing near misses by golden-section, and returns the
// earliest-arrival trajectory with miss <= miss_tol, trimmed at closest
// approach (arrival is the parabola-interpolated closest-approach time).
// Empty when no candidate converges.
std::optional<Trajectory> optimal_control_reference(Vec2 start, Vec2 goal, double t0,
                                                    const FlowField& field, double v_veh_bf,
                                                    const ShootingOptions& opts = {});

// Closed-form travel time across a uniform current (vehicle faster than the
// current), used as an oracle for the shooting method.
double exact_uniform_travel_time(Vec2 delta, Vec2 current, double v_veh_bf);

}  // namespace flowplan
