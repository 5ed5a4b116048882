#include "flowplan/cost.hpp"

#include <cmath>

#include "flowplan/zermelo.hpp"

namespace flowplan {

std::optional<HeadingSolution> solve_heading(double phi_path, Vec2 current, double v_veh) {
  if (!(v_veh > 0)) throw std::invalid_argument("solve_heading: vehicle speed must be positive");
  const Vec2 along = unit_from_heading(phi_path);
  const double c_along = along.dot(current);
  const double c_cross = along.cross(current);
  if (std::abs(c_cross) > v_veh) return std::nullopt;

  const double v_ground = c_along + std::sqrt(v_veh * v_veh - c_cross * c_cross);
  if (v_ground <= 0) return std::nullopt;

  const double theta = wrap_angle(phi_path + std::asin(-c_cross / v_veh));
  return HeadingSolution{theta, v_ground};
}

double wfunc(Vec2 from, Vec2 to, double t_start, const CostContext& ctx) {
  ctx.validate();
  Counters scratch;
  Counters& tally = ctx.counters != nullptr ? *ctx.counters : scratch;
  ++tally.cfc;

  const double length = distance(from, to);
  if (length == 0) return 0.0;

  const auto& window = ctx.field->window();
  if (!window.contains(t_start)) return kInfinity;

  const Vec2 dir = (to - from) / length;
  const double phi = dir.heading();
  const auto& sc = ctx.integration;

  double remaining = length;
  double t = t_start;
  Vec2 pos = from;
  double h = sc.h0;
  FlowSample start = ctx.field->sample(pos, t, tally);

  constexpr int kMaxIters = 100000;
  for (int iter = 0; remaining > length * 1e-12; ++iter) {
    if (iter >= kMaxIters) throw std::runtime_error("wfunc: sub-segment iteration cap exceeded");

    const double seg = h * remaining;

    const auto rough = solve_heading(phi, start.c, ctx.v_veh_bf);
    if (!rough) return kInfinity;  // infeasible at the start point at any step size
    const double dt_rough = seg / rough->v_ground;

    const double t_end = t + dt_rough;
    if (!window.contains(t_end)) return kInfinity;
    const Vec2 pos_end = pos + dir * seg;
    const FlowSample end = ctx.field->sample(pos_end, t_end, tally);

    const auto improved = solve_heading(phi, (start.c + end.c) * 0.5, ctx.v_veh_bf);
    if (!improved) {
      // the far half of the sub-segment is too adverse; retry at the floor
      if (h > sc.h_min) {
        h = sc.h_min;
        continue;
      }
      return kInfinity;
    }
    const double dt_improved = seg / improved->v_ground;

    const double error = std::abs(dt_rough - dt_improved);
    if (error < sc.eps || h <= sc.h_min) {
      t += dt_improved;
      pos = pos_end;
      remaining -= seg;
      start = end;  // times differ by < eps; reuse instead of resampling
    }
    h = step_size_update(h, error, sc.eps, sc.tau, sc.h_min, sc.h_max);
  }
  return t - t_start;
}

double afunc(Vec2 from, Vec2 to, Vec2 track_start, Vec2 track_goal) {
  if (track_start == track_goal) {
    throw std::invalid_argument("afunc: reference track is degenerate");
  }
  const double e_u = cross_track_error(from, track_start, track_goal);
  const double e_v = cross_track_error(to, track_start, track_goal);
  const double advance =
      std::abs(along_track(to, track_start, track_goal) - along_track(from, track_start, track_goal));

  if (e_u * e_v >= 0) {
    return 0.5 * std::abs(e_u + e_v) * advance;
  }
  // the segment crosses the track: two triangles on opposite sides
  return 0.5 * (e_u * e_u + e_v * e_v) / (std::abs(e_u) + std::abs(e_v)) * advance;
}

}  // namespace flowplan
