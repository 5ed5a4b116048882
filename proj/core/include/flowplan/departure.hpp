#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flowplan/search.hpp"

namespace flowplan {

enum class MinimizeMethod { Golden, Fibonacci, Brent };

std::string_view minimize_method_name(MinimizeMethod m);
std::optional<MinimizeMethod> minimize_method_from_name(std::string_view name);

struct SupportPoint {
  double t_dep = 0;
  double t_trav = 0;  // +infinity when no path exists for this departure
};

// One full path search for a given departure time.
struct PlannerOutcome {
  double t_trav = kInfinity;
  Counters counters;
};
using Planner = std::function<PlannerOutcome(double t_dep)>;

struct SampledCurve {
  std::vector<SupportPoint> points;
  Counters counters;
};

// Evaluates the planner on the inclusive lattice t_lo, t_lo+dt, ... <= t_hi.
// Evaluations are independent and run on up to `threads` workers (0 = one per
// hardware thread); results and counters are merged in lattice order, so the
// outcome is independent of scheduling.
SampledCurve sample_curve(const Planner& planner, double t_lo, double t_hi, double dt_dep,
                          unsigned threads = 0);

// Local-procedure interpolating spline: slope at each support point is the
// divided-difference blend of the four adjacent secants, then limited so that
// monotone stretches of data produce a monotone curve (no overshoot).  Fewer
// than five points fall back to piecewise linear interpolation.
class AkimaCurve {
 public:
  static AkimaCurve fit(std::span<const SupportPoint> points);

  // Evaluates the curve; arguments are clamped to the support range.
  double operator()(double t) const;

  bool linear_fallback() const { return linear_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
  bool linear_ = false;
};

struct Bracket {
  double lo = 0;
  double hi = 0;
  bool boundary = false;  // global minimum sits on the sampled window edge
};

// Locates the global minimizer of the interpolant by dense evaluation (1000
// points) and returns the support interval around the nearest support point,
// clamped at the window edges.
Bracket bracket_global_min(const AkimaCurve& curve, std::span<const SupportPoint> points);

struct MinimizeResult {
  double x = 0;
  double fx = kInfinity;
  int calls = 0;  // objective evaluations
};

// Derivative-free minimization of f over the bracket down to an interval of
// width tol.  Returns the best evaluated point.  Non-finite objective values
// are treated as a huge penalty so the interval shrinks toward finite ground;
// throws std::runtime_error when nothing finite is found.
MinimizeResult minimize(const std::function<double(double)>& f, const Bracket& bracket,
                        MinimizeMethod method, double tol = 0.01);

struct DepartureConfig {
  double t_lo = 0;
  double t_hi = 0;
  double dt_dep = 0;
  MinimizeMethod method = MinimizeMethod::Brent;
  double tol = 0.01;
  unsigned threads = 0;
};

struct DepartureResult {
  double t_dep_opt = 0;
  double t_trav_opt = kInfinity;
  std::vector<SupportPoint> samples;
  int refine_calls = 0;
  MinimizeMethod method = MinimizeMethod::Brent;
  Counters counters;  // sampling + refinement
  bool boundary_minimum = false;
  bool linear_fallback = false;
};

// Three-stage pipeline: sample the curve (optionally with a cheaper coarse
// planner), bracket each finite stretch via the interpolant, refine the best
// bracket with the full-fidelity planner.  Empty when no sampled departure
// admits a path.
std::optional<DepartureResult> optimal_departure(const Planner& fine, const DepartureConfig& cfg,
                                                 const Planner* coarse = nullptr);

// Convenience planner running `search` on the given graph/config.
Planner make_search_planner(const Graph& graph, const SearchConfig& cfg, VertexId s, VertexId g,
                            const CostContext& ctx);

}  // namespace flowplan
