#include "flowplan/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <utility>

namespace flowplan {

SimulationReport simulate_path(const Path& path, const FlowField& field, double v_veh_bf,
                               double dt) {
  if (path.waypoints.size() < 2) throw std::invalid_argument("simulate_path: need >= 2 waypoints");
  if (!(v_veh_bf > 0)) throw std::invalid_argument("simulate_path: vehicle speed must be positive");
  double min_len = kInfinity;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    min_len = std::min(min_len, distance(path.waypoints[i - 1].pos, path.waypoints[i].pos));
  }
  if (!(dt > 0) || dt > 1e-3 * (min_len / v_veh_bf)) {
    throw std::invalid_argument("simulate_path: dt too coarse for the shortest edge");
  }

  const Vec2 ref_a = path.waypoints.front().pos;
  const Vec2 ref_b = path.waypoints.back().pos;
  const bool has_ref = distance(ref_a, ref_b) > 0;

  SimulationReport report;
  Counters scratch;
  double t = path.t0;

  for (std::size_t leg = 1; leg < path.waypoints.size(); ++leg) {
    const Vec2 a = path.waypoints[leg - 1].pos;
    const Vec2 b = path.waypoints[leg].pos;
    const double len = distance(a, b);
    const double phi = (b - a).heading();
    const Vec2 dir = (b - a) / len;
    const double t_leg_start = t;

    double advance = 0;
    while (advance < len) {
      if (!field.window().contains(t)) {
        report.failure = {{a + dir * advance}, t, SimulationFailure::Reason::WindowExceeded};
        report.arrival_time = t;
        report.edge_durations.push_back(t - t_leg_start);
        return report;
      }
      const Vec2 pos = a + dir * advance;
      if (has_ref) {
        report.max_cross_track =
            std::max(report.max_cross_track, std::abs(cross_track_error(pos, ref_a, ref_b)));
      }
      const auto sol = solve_heading(phi, field.sample(pos, t, scratch).c, v_veh_bf);
      if (!sol) {
        report.failure = {pos, t, SimulationFailure::Reason::InfeasibleStep};
        report.arrival_time = t;
        report.edge_durations.push_back(t - t_leg_start);
        return report;
      }
      const double step_advance = sol->v_ground * dt;
      if (advance + step_advance >= len) {
        // partial final step: land exactly on the waypoint
        t += dt * (len - advance) / step_advance;
        advance = len;
      } else {
        advance += step_advance;
        t += dt;
      }
    }
    report.edge_durations.push_back(t - t_leg_start);
  }

  if (has_ref) {
    report.max_cross_track =
        std::max(report.max_cross_track, std::abs(cross_track_error(ref_b, ref_a, ref_b)));
  }
  report.arrival_time = t;
  return report;
}

std::optional<Path> exhaustive_search(const Graph& graph, VertexId s, VertexId g, double t0,
                                      const CostContext& ctx, std::size_t max_vertices) {
  ctx.validate();
  if (graph.vertex_count() > max_vertices) {
    throw std::invalid_argument("exhaustive_search: graph exceeds the vertex budget");
  }
  if (!ctx.field->window().contains(t0)) {
    throw std::domain_error("exhaustive_search: departure time outside the field window");
  }

  const auto n = graph.vertex_count();
  std::vector<bool> on_path(n, false);
  std::vector<VertexId> chain{s};
  std::vector<VertexId> best_chain;
  std::vector<double> arrivals{t0};
  std::vector<double> best_arrivals;
  double best = kInfinity;

  const auto dfs = [&](auto&& self, VertexId u, double t) -> void {
    if (t >= best) return;  // cannot improve: wfunc is non-negative
    if (u == g) {
      best = t;
      best_chain = chain;
      best_arrivals = arrivals;
      return;
    }
    on_path[static_cast<std::size_t>(u)] = true;
    for (const VertexId v : graph.successors(u)) {
      if (on_path[static_cast<std::size_t>(v)]) continue;
      const double w = wfunc(graph.position(u), graph.position(v), t, ctx);
      if (!std::isfinite(w)) continue;
      chain.push_back(v);
      arrivals.push_back(t + w);
      self(self, v, t + w);
      chain.pop_back();
      arrivals.pop_back();
    }
    on_path[static_cast<std::size_t>(u)] = false;
  };
  dfs(dfs, s, t0);

  if (best_chain.empty()) return std::nullopt;
  Path path;
  path.t0 = t0;
  path.travel_time = best - t0;
  for (std::size_t i = 0; i < best_chain.size(); ++i) {
    path.waypoints.push_back({best_chain[i], graph.position(best_chain[i]), best_arrivals[i]});
    if (i > 0) {
      path.length += distance(graph.position(best_chain[i - 1]), graph.position(best_chain[i]));
    }
  }
  return path;
}

namespace {

struct ShotOutcome {
  double miss = kInfinity;         // closest-approach distance (interpolated)
  double signed_miss = kInfinity;  // lateral offset at closest approach
  double arrival = kInfinity;      // time of closest approach (interpolated)
  std::size_t closest_index = 0;
};

// Vertex of the parabola through three (t, gap^2) samples; refines both the
// closest-approach distance and its time below the sampling granularity.
// Falls back to the middle sample when the points are near-collinear.
void interpolate_vertex(const TrajectorySample* s, Vec2 goal, ShotOutcome& out) {
  const double x0 = s[0].t, x1 = s[1].t, x2 = s[2].t;
  const double y0 = (s[0].pos - goal).norm2();
  const double y1 = (s[1].pos - goal).norm2();
  const double y2 = (s[2].pos - goal).norm2();
  out.arrival = x1;
  out.miss = std::sqrt(y1);
  const double denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  const double scale = std::max({std::abs(y0), std::abs(y1), std::abs(y2), 1e-300});
  if (std::abs(denom) < 1e-12 * scale) return;
  double xs = x1 - 0.5 * ((x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0)) /
                       denom;
  xs = std::clamp(xs, x0, x2);
  const double ys = y0 * (xs - x1) * (xs - x2) / ((x0 - x1) * (x0 - x2)) +
                    y1 * (xs - x0) * (xs - x2) / ((x1 - x0) * (x1 - x2)) +
                    y2 * (xs - x0) * (xs - x1) / ((x2 - x0) * (x2 - x1));
  out.arrival = xs;
  out.miss = std::sqrt(std::max(0.0, ys));
}

// Earliest pass within miss_tol wins; otherwise the overall closest approach.
ShotOutcome assess(const Trajectory& traj, Vec2 start, Vec2 goal, double miss_tol) {
  ShotOutcome out;
  const Vec2 track = goal - start;
  const double track_len = track.norm();
  const auto side = [&](std::size_t i) {
    return track_len > 0 ? track.cross(traj.samples[i].pos - goal) / track_len
                         : distance(traj.samples[i].pos, goal);
  };

  double best_gap = kInfinity;
  std::size_t best_i = 0;
  double prev_gap = kInfinity;
  bool descending = false;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const double gap = distance(traj.samples[i].pos, goal);
    if (gap < best_gap) {
      best_gap = gap;
      best_i = i;
    }
    if (descending && gap > prev_gap && i >= 2 && prev_gap <= miss_tol + 0.1) {
      // local minimum at i-1 close enough to be worth interpolating
      ShotOutcome hit;
      interpolate_vertex(&traj.samples[i - 2], goal, hit);
      if (hit.miss <= miss_tol) {
        hit.closest_index = i - 1;
        hit.signed_miss = std::copysign(hit.miss, side(i - 1));
        return hit;  // earliest qualifying pass
      }
    }
    descending = gap < prev_gap;
    prev_gap = gap;
  }

  out.closest_index = best_i;
  if (best_i > 0 && best_i + 1 < traj.samples.size()) {
    interpolate_vertex(&traj.samples[best_i - 1], goal, out);
  } else if (!traj.samples.empty()) {
    out.miss = best_gap;
    out.arrival = traj.samples[best_i].t;
  }
  out.signed_miss = std::copysign(out.miss, traj.samples.empty() ? 1.0 : side(best_i));
  return out;
}

}  // namespace

std::optional<Trajectory> optimal_control_reference(Vec2 start, Vec2 goal, double t0,
                                                    const FlowField& field, double v_veh_bf,
                                                    const ShootingOptions& opts) {
  if (start == goal) throw std::invalid_argument("optimal_control_reference: degenerate pair");
  if (opts.scan_count < 8) throw std::invalid_argument("optimal_control_reference: scan too small");

  const double dist = distance(start, goal);
  double t_end = t0 + opts.t_max_factor * dist / v_veh_bf;
  if (std::isfinite(field.window().end())) t_end = std::min(t_end, field.window().end());
  if (!(t_end > t0)) throw std::domain_error("optimal_control_reference: empty integration span");

  Counters scratch;
  const double ground_bound = opts.current_bound > 0 ? v_veh_bf + opts.current_bound : 0;
  // offsets beyond this play no role in bracketing, so shots may be cut once
  // they cannot come closer (remaining distance shrinks at most at ground_bound)
  const double reach = std::max(2.5, opts.capture_radius);

  const Vec2 u_hat = (goal - start) / dist;
  const Vec2 n_hat{-u_hat.y, u_hat.x};

  // A shot is summarized by its closest approach and by the lateral offsets of
  // its first few crossings of the goal line (the line through the goal normal
  // to the track).  Sign changes of an offset across two initial headings
  // bracket an extremal through the goal and are bisected regardless of how
  // steeply the offset sweeps, which is what makes strongly sheared flows
  // tractable; closest-approach dips cover the tangential grazes.
  struct SurveyShot {
    ShotOutcome out;
    int n_cross = 0;
    std::array<double, 4> y{};
  };

  const auto survey = [&](double theta0, double dt) {
    ShotMonitor prune;
    if (ground_bound > 0) {
      prune = [&, t_end](const TrajectorySample& s) {
        return distance(s.pos, goal) - ground_bound * (t_end - s.t) > reach;
      };
    }
    const Trajectory traj =
        shoot_trajectory(start, theta0, t0, field, v_veh_bf, t_end, dt, &scratch, prune);
    SurveyShot shot;
    shot.out = assess(traj, start, goal, opts.miss_tol);
    double d_prev = (traj.samples.front().pos - goal).dot(u_hat);
    for (std::size_t i = 1;
         i < traj.samples.size() && shot.n_cross < static_cast<int>(shot.y.size()); ++i) {
      const double d = (traj.samples[i].pos - goal).dot(u_hat);
      if ((d_prev < 0) != (d < 0)) {
        const double f = d_prev / (d_prev - d);
        const Vec2 p =
            traj.samples[i - 1].pos + (traj.samples[i].pos - traj.samples[i - 1].pos) * f;
        shot.y[static_cast<std::size_t>(shot.n_cross++)] = (p - goal).dot(n_hat);
      }
      d_prev = d;
    }
    return shot;
  };

  struct Candidate {
    double theta = 0;
    double arrival = kInfinity;
    int cross = -1;     // crossing index that produced it (-1: dip polish)
    double halo = 0;    // half-width of the producing interval
  };
  std::vector<Candidate> converged;
  const double accept_tol = 0.9 * opts.miss_tol;  // slack for the fine-step re-check

  // initial full-circle scan
  std::map<double, SurveyShot> shots;
  for (int i = 0; i < opts.scan_count; ++i) {
    const double th = -std::numbers::pi + 2.0 * std::numbers::pi * i / opts.scan_count;
    shots.emplace(th, survey(th, opts.scan_dt));
  }

  // densify where the crossing pattern changes faster than the sampling: a
  // crossing appears/disappears, the first offset jumps, or a sign change sits
  // entirely outside the bracketing window
  {
    std::vector<std::pair<double, double>> work;
    for (auto it = shots.begin(); std::next(it) != shots.end(); ++it) {
      work.emplace_back(it->first, std::next(it)->first);
    }
    const double cell = 2.0 * std::numbers::pi / opts.scan_count;
    const double min_gap = cell / 64.0;
    while (!work.empty()) {
      const auto [lo, hi] = work.back();
      work.pop_back();
      if (hi - lo <= min_gap) continue;
      const SurveyShot& a = shots.at(lo);
      const SurveyShot& b = shots.at(hi);
      bool split = (a.n_cross > 0) != (b.n_cross > 0);
      if (!split && a.n_cross > 0 && b.n_cross > 0) {
        const double ya = a.y[0], yb = b.y[0];
        split = (std::abs(ya - yb) > 2.0 && std::min(std::abs(ya), std::abs(yb)) < 2.0 * reach) ||
                ((ya < 0) != (yb < 0) && std::min(std::abs(ya), std::abs(yb)) >= reach);
      }
      if (!split) continue;
      const double mid = 0.5 * (lo + hi);
      shots.emplace(mid, survey(mid, opts.scan_dt));
      work.emplace_back(lo, mid);
      work.emplace_back(mid, hi);
    }
  }

  // bisect an offset sign change down to a goal hit; sink returns true when a
  // shot has converged and the bracket can be abandoned
  const auto bisect = [&](double lo, double hi, double y_lo, int k, double dt,
                          const std::function<bool(double, const SurveyShot&, double)>& sink) {
    double best_seen = kInfinity;
    for (int it = 0; it < opts.max_bisections && hi - lo > 1e-14; ++it) {
      if (it == 24 && best_seen > 10.0 * opts.miss_tol) break;  // steep fold, not a hit
      const double mid = 0.5 * (lo + hi);
      const SurveyShot m = survey(mid, dt);
      best_seen = std::min(best_seen, m.out.miss);
      if (sink(mid, m, hi - lo)) return;
      const double side = m.n_cross > k ? m.y[static_cast<std::size_t>(k)] : m.out.signed_miss;
      if ((side < 0) == (y_lo < 0)) {
        lo = mid;
        y_lo = side;
      } else {
        hi = mid;
      }
    }
  };

  // golden-section polish of a close approach that need not cross the goal line
  const auto polish = [&](double lo, double hi, double dt,
                          const std::function<bool(double, const SurveyShot&, double)>& sink) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    SurveyShot s1 = survey(x1, dt);
    if (sink(x1, s1, hi - lo)) return;
    SurveyShot s2 = survey(x2, dt);
    if (sink(x2, s2, hi - lo)) return;
    for (int it = 0; it < 46 && hi - lo > 1e-13; ++it) {
      if (s1.out.miss <= s2.out.miss) {
        hi = x2;
        x2 = x1;
        s2 = s1;
        x1 = hi - kInvPhi * (hi - lo);
        s1 = survey(x1, dt);
        if (sink(x1, s1, hi - lo)) return;
      } else {
        lo = x1;
        x1 = x2;
        s1 = s2;
        x2 = lo + kInvPhi * (hi - lo);
        s2 = survey(x2, dt);
        if (sink(x2, s2, hi - lo)) return;
      }
    }
  };

  const auto collect = [&](int k) {
    return [&converged, accept_tol, k](double theta, const SurveyShot& s, double width) {
      if (s.out.miss > accept_tol) return false;
      converged.push_back({theta, s.out.arrival, k, 0.5 * width});
      return true;
    };
  };

  std::vector<std::pair<double, const SurveyShot*>> seq;
  seq.reserve(shots.size());
  for (const auto& [th, s] : shots) seq.emplace_back(th, &s);

  struct Bracket {
    double lo, hi, y_lo, score;
    int k;
  };
  std::vector<Bracket> brackets;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const SurveyShot& a = *seq[i].second;
    const SurveyShot& b = *seq[i + 1].second;
    for (int k = 0; k < std::min(a.n_cross, b.n_cross); ++k) {
      const double ya = a.y[static_cast<std::size_t>(k)];
      const double yb = b.y[static_cast<std::size_t>(k)];
      const double near = std::min(std::abs(ya), std::abs(yb));
      if ((ya < 0) != (yb < 0) && near < reach) {
        brackets.push_back({seq[i].first, seq[i + 1].first, ya, near, k});
      }
    }
  }
  std::sort(brackets.begin(), brackets.end(),
            [](const Bracket& a, const Bracket& b) { return a.score < b.score; });
  if (brackets.size() > 128) brackets.resize(128);
  for (const Bracket& br : brackets) {
    bisect(br.lo, br.hi, br.y_lo, br.k, opts.scan_dt, collect(br.k));
  }

  // dips below the capture radius and, failing everything else, the global
  // closest approach of the scan
  std::size_t global_min = 0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i].second->out.miss < seq[global_min].second->out.miss) global_min = i;
    if (i == 0) continue;
    const double miss = seq[i].second->out.miss;
    if (miss < opts.capture_radius && miss < seq[i - 1].second->out.miss &&
        miss <= seq[i + 1].second->out.miss) {
      polish(seq[i - 1].first, seq[i + 1].first, opts.scan_dt, collect(-1));
    }
  }
  if (converged.empty()) {
    const std::size_t lo = global_min > 0 ? global_min - 1 : 0;
    const std::size_t hi = std::min(global_min + 1, seq.size() - 1);
    polish(seq[lo].first, seq[hi].first, opts.scan_dt, collect(-1));
  }
  if (converged.empty()) return std::nullopt;

  std::sort(converged.begin(), converged.end(),
            [](const Candidate& a, const Candidate& b) { return a.arrival < b.arrival; });

  // earliest candidate that also converges on the fine reporting step; when
  // the coarse heading is not quite enough there, re-polish it at fine step
  std::optional<Trajectory> result;
  const auto finish = [&](double theta) {
    Trajectory traj =
        shoot_trajectory(start, theta, t0, field, v_veh_bf, t_end, opts.dt, &scratch);
    const ShotOutcome o = assess(traj, start, goal, opts.miss_tol);
    if (o.miss > opts.miss_tol) return false;
    traj.samples.resize(o.closest_index + 1);
    traj.arrival = o.arrival;
    result = std::move(traj);
    return true;
  };
  for (const Candidate& c : converged) {
    if (finish(c.theta)) return result;
    const double halo = std::max(c.halo, 1e-12);
    const auto accept_fine = [&](double theta, const SurveyShot& s, double) {
      return s.out.miss <= opts.miss_tol && finish(theta);
    };
    if (c.cross >= 0) {
      const SurveyShot lo = survey(c.theta - 4.0 * halo, opts.dt);
      const SurveyShot hi = survey(c.theta + 4.0 * halo, opts.dt);
      if (lo.n_cross > c.cross && hi.n_cross > c.cross) {
        const double y_lo = lo.y[static_cast<std::size_t>(c.cross)];
        const double y_hi = hi.y[static_cast<std::size_t>(c.cross)];
        if ((y_lo < 0) != (y_hi < 0)) {
          bisect(c.theta - 4.0 * halo, c.theta + 4.0 * halo, y_lo, c.cross, opts.dt, accept_fine);
          if (result) return result;
        }
      }
    } else {
      polish(c.theta - halo, c.theta + halo, opts.dt, accept_fine);
      if (result) return result;
    }
  }
  return std::nullopt;
}

double exact_uniform_travel_time(Vec2 delta, Vec2 current, double v_veh_bf) {
  const double a = v_veh_bf * v_veh_bf - current.norm2();
  if (!(a > 0)) {
    throw std::invalid_argument("exact_uniform_travel_time: vehicle must outrun the current");
  }
  const double b = delta.dot(current);
  return (std::sqrt(b * b + a * delta.norm2()) - b) / a;
}

}  // namespace flowplan
