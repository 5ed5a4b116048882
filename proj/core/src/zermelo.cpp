#include "flowplan/zermelo.hpp"

#include <cmath>

#include "flowplan/cost.hpp"

namespace flowplan {

double heading_rate(double theta, const FlowSample& s) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  return -s.u_y * ct * ct + (s.u_x - s.v_y) * ct * st + s.v_x * st * st;
}

double step_size_update(double h, double error_local, double eps, double tau, double h_min,
                        double h_max) {
  if (error_local <= 0) return h_max;
  return std::max(h_min, std::min(h_max, tau * h * std::sqrt(eps / error_local)));
}

namespace {

FlowSample mean_sample(const FlowSample& a, const FlowSample& b) {
  FlowSample m;
  m.c = (a.c + b.c) * 0.5;
  m.u_x = 0.5 * (a.u_x + b.u_x);
  m.u_y = 0.5 * (a.u_y + b.u_y);
  m.v_x = 0.5 * (a.v_x + b.v_x);
  m.v_y = 0.5 * (a.v_y + b.v_y);
  return m;
}

}  // namespace

double calc_opt_dir(Vec2 x_pre, Vec2 x_start, double t_pre, double t_start, double s_path_min,
                    const FlowField& field, double v_veh_bf, const OptCourseParams& params,
                    Counters& tally) {
  params.validate();
  if (x_pre == x_start) throw std::invalid_argument("calc_opt_dir: previous edge is degenerate");
  if (!(s_path_min > 0)) throw std::invalid_argument("calc_opt_dir: s_path_min must be positive");
  if (!(v_veh_bf > 0)) throw std::invalid_argument("calc_opt_dir: vehicle speed must be positive");

  const Vec2 s_pre = x_start - x_pre;
  const double phi_path = s_pre.heading();
  const Vec2 origin = x_pre + s_pre * 0.5;
  const double r_path = 0.25 * s_path_min + 0.5 * s_pre.norm();

  double t_local = 0.5 * (t_pre + t_start);
  const auto& window = field.window();
  Vec2 pos = origin;
  if (!window.contains(t_local)) {
    // seed time already outside the window: fall back to the edge course
    return phi_path;
  }

  FlowSample start = field.sample(pos, t_local, tally);
  const auto seed = solve_heading(phi_path, start.c, v_veh_bf);
  double theta = seed ? seed->theta : phi_path;

  // heading of the seed ground velocity; returned if no segment is accepted
  Vec2 v_og = start.c + v_veh_bf * unit_from_heading(theta);
  double h = params.h0;
  double r_travel = 0;

  constexpr int kMaxAccepted = 10000;
  constexpr int kMaxIters = 100000;
  int accepted = 0;
  for (int iter = 0; r_travel < r_path; ++iter) {
    if (accepted >= kMaxAccepted || iter >= kMaxIters) {
      throw IntegrationError("calc_opt_dir: step cap exceeded");
    }

    const double t_path = h * r_path / v_veh_bf;
    if (!window.contains(t_local + t_path)) {
      break;  // mission window ends mid-simulation; keep the last good course
    }

    const double theta_rough = theta + t_path * heading_rate(theta, start);
    const Vec2 end_rough = pos + t_path * (start.c + v_veh_bf * unit_from_heading(theta_rough));
    const FlowSample end = field.sample(end_rough, t_local + t_path, tally);

    const FlowSample mean = mean_sample(start, end);
    const double theta_improved = theta + t_path * heading_rate(theta, mean);
    v_og = mean.c + v_veh_bf * unit_from_heading(theta_improved);
    const Vec2 end_improved = pos + t_path * v_og;

    const double error_local = std::abs(theta_rough - theta_improved);
    h = step_size_update(h, error_local, params.eps, params.tau, params.h_min, params.h_max);
    if (error_local < params.eps || h == params.h_min) {
      start = end;
      pos = end_improved;
      t_local += t_path;
      theta = theta_improved;
      r_travel = distance(end_improved, origin);
      ++accepted;
    }
  }
  return v_og.heading();
}

Trajectory shoot_trajectory(Vec2 start, double theta0, double t0, const FlowField& field,
                            double v_veh_bf, double t_end, double dt, Counters* tally,
                            const ShotMonitor& stop) {
  if (!(dt > 0)) throw std::invalid_argument("shoot_trajectory: dt must be positive");
  if (!(t_end > t0)) throw std::invalid_argument("shoot_trajectory: t_end must exceed t0");
  if (!(v_veh_bf > 0)) throw std::invalid_argument("shoot_trajectory: vehicle speed must be positive");
  if (!field.window().contains(t0) || !field.window().contains(t_end)) {
    throw std::domain_error("shoot_trajectory: integration span leaves the field window");
  }

  Counters scratch;
  Counters& use = tally != nullptr ? *tally : scratch;

  struct State {
    Vec2 pos;
    double theta;
  };
  const auto deriv = [&](const State& s, double t) {
    const FlowSample f = field.sample(s.pos, t, use);
    return State{f.c + v_veh_bf * unit_from_heading(s.theta), heading_rate(s.theta, f)};
  };

  Trajectory out;
  State s{start, theta0};
  double t = t0;
  out.samples.push_back({s.pos, t, s.theta});

  const auto advance = [](const State& s, const State& k, double step) {
    return State{s.pos + k.pos * step, s.theta + k.theta * step};
  };

  while (t < t_end - 1e-15 * std::max(1.0, std::abs(t_end))) {
    const double step = std::min(dt, t_end - t);
    const State k1 = deriv(s, t);
    const State k2 = deriv(advance(s, k1, step * 0.5), t + step * 0.5);
    const State k3 = deriv(advance(s, k2, step * 0.5), t + step * 0.5);
    const State k4 = deriv(advance(s, k3, step), std::min(t + step, t_end));
    s.pos = s.pos + (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos) * (step / 6.0);
    s.theta = s.theta + (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta) * (step / 6.0);
    t = std::min(t + step, t_end);
    out.samples.push_back({s.pos, t, s.theta});
    if (stop && stop(out.samples.back())) break;
  }
  out.arrival = t;
  return out;
}

}  // namespace flowplan
