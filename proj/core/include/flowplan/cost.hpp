#pragma once

#include <optional>
#include <stdexcept>

#include "flowplan/flow_field.hpp"
#include "flowplan/geometry.hpp"

namespace flowplan {

// Adaptive step control for the edge traversal integrator.  Step sizes are
// fractions of the *remaining* segment length; eps is the permitted local
// discrepancy (in time units) between the rough and improved step estimates.
struct StepControl {
  double h0 = 0.5;
  double h_min = 0.05;
  double h_max = 1.0;
  double eps = 1e-4;
  double tau = 0.9;
};

// Everything wfunc needs besides the edge itself.  `counters` is optional;
// when present it receives one cfc per wfunc call and one cmc per field
// sample made on wfunc's behalf.
struct CostContext {
  const FlowField* field = nullptr;
  double v_veh_bf = 0.5;
  StepControl integration{};
  Counters* counters = nullptr;

  void validate() const {
    if (field == nullptr) throw std::invalid_argument("cost context: field is null");
    if (!(v_veh_bf > 0)) throw std::invalid_argument("cost context: vehicle speed must be positive");
    const auto& s = integration;
    if (!(s.h_min > 0 && s.h_min <= s.h0 && s.h0 <= s.h_max && s.h_max <= 1.0)) {
      throw std::invalid_argument("cost context: need 0 < h_min <= h0 <= h_max <= 1");
    }
    if (!(s.eps > 0)) throw std::invalid_argument("cost context: eps must be positive");
    if (!(s.tau > 0 && s.tau <= 1)) throw std::invalid_argument("cost context: tau must be in (0, 1]");
  }
};

struct HeadingSolution {
  double theta;     // vehicle heading that keeps the ground track on course
  double v_ground;  // resulting speed made good along the course
};

// Solves the velocity triangle for a vehicle of through-water speed v_veh
// holding ground course phi_path in the given current.  Empty when the cross
// component exceeds v_veh or the along-track speed made good is not positive.
std::optional<HeadingSolution> solve_heading(double phi_path, Vec2 current, double v_veh);

// Travel time along the straight segment from->to departing at t_start, by
// adaptive sub-segmentation of the edge.  Returns +infinity when any
// sub-segment is infeasible or the traversal leaves the field's validity
// window.  Counts one cfc.
double wfunc(Vec2 from, Vec2 to, double t_start, const CostContext& ctx);

// Area enclosed between the segment from->to and the straight reference track
// track_start->track_goal: the trapezoid of the endpoint cross-track errors
// over the along-track advance, split into two triangles when the errors
// change sign.  Always >= 0.
double afunc(Vec2 from, Vec2 to, Vec2 track_start, Vec2 track_goal);

}  // namespace flowplan
