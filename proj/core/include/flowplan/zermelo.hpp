#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "flowplan/flow_field.hpp"
#include "flowplan/geometry.hpp"

namespace flowplan {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step control for the course optimizer.  h is dimensionless (fraction of the
// stop radius); eps is the permitted local heading discrepancy in radians.
struct OptCourseParams {
  // The error estimate below only senses field variation along a segment, not
  // the heading dependence of the turn rate, so h_max is the real accuracy
  // knob: the controller parks at h_max wherever the field is smooth.  These
  // defaults keep the returned course h0-independent to ~1e-3 rad.
  double h0 = 2e-3;
  double h_min = 2e-4;
  double h_max = 2e-3;
  double eps = 1e-4;
  double tau = 0.9;

  // Coarse profile for successor gating.  A gate cone is tens of degrees
  // wide, so the predicted course only has to be good to ~0.01 rad; running
  // the fine defaults there would multiply the per-expansion sampling cost
  // for no planning benefit.
  static OptCourseParams gate_profile() {
    OptCourseParams p;
    p.h0 = 0.05;
    p.h_min = 0.005;
    p.h_max = 0.05;
    return p;
  }

  void validate() const {
    if (!(h_min > 0 && h_min <= h0 && h0 <= h_max && h_max <= 1.0)) {
      throw std::invalid_argument("opt course params: need 0 < h_min <= h0 <= h_max <= 1");
    }
    if (!(eps > 0)) throw std::invalid_argument("opt course params: eps must be positive");
    if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("opt course params: tau must be in (0, 1]");
  }
};

// Steering rate that keeps a constant-speed vehicle on a time-optimal course:
//   d(theta)/dt = -u_y cos^2(theta) + (u_x - v_y) cos(theta) sin(theta) + v_x sin^2(theta)
double heading_rate(double theta, const FlowSample& s);

// Optimal step size for a second-order method: grows/shrinks the step by
// sqrt(eps/error), damped by tau and clamped to [h_min, h_max].  A vanishing
// error yields h_max.
double step_size_update(double h, double error_local, double eps, double tau, double h_min,
                        double h_max);

// Simulates a short stretch of the locally time-optimal trajectory, seeded on
// the midpoint of the previous edge x_pre -> x_start at the mid arrival time,
// and returns the ground-track heading of its last accepted segment.  This is
// the course a well-steered vehicle would hold next, used to preselect
// successor edges.  Samples taken on behalf of this call are charged to
// `tally`.  Throws IntegrationError when the step cap is exhausted.
double calc_opt_dir(Vec2 x_pre, Vec2 x_start, double t_pre, double t_start, double s_path_min,
                    const FlowField& field, double v_veh_bf, const OptCourseParams& params,
                    Counters& tally);

struct TrajectorySample {
  Vec2 pos;
  double t = 0;
  double theta = 0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // includes the initial state
  double arrival = 0;  // end of the integration; producers that trim the
                       // trajectory (e.g. a target-capture search) overwrite
                       // it with the time of the retained endpoint
};

// Optional observer for shoot_trajectory, called after every accepted step;
// returning true ends the integration early (the sample is still kept).
using ShotMonitor = std::function<bool(const TrajectorySample&)>;

// Integrates the controlled kinematics (x, y, theta) with classical fourth
// order Runge-Kutta at fixed step dt from t0 to t_end, holding the
// time-optimal steering law.  [t0, t_end] must lie inside the field window.
Trajectory shoot_trajectory(Vec2 start, double theta0, double t0, const FlowField& field,
                            double v_veh_bf, double t_end, double dt, Counters* tally = nullptr,
                            const ShotMonitor& stop = {});

}  // namespace flowplan
