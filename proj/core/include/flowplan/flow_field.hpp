#pragma once

#include <memory>
#include <stdexcept>

#include "flowplan/geometry.hpp"

namespace flowplan {

// Tally of the two cost drivers of a planning run: wfunc invocations (cfc) and
// flow-field samples (cmc).  Every model evaluation — including those made by
// the course optimizer on behalf of a search — goes through the same tally.
struct Counters {
  long long cfc = 0;
  long long cmc = 0;

  Counters& operator+=(const Counters& o) {
    cfc += o.cfc;
    cmc += o.cmc;
    return *this;
  }
};

// Closed validity interval for a field in time.  Sampling outside it throws.
class TimeWindow {
 public:
  constexpr TimeWindow(double start, double end) : start_(start), end_(end) {}
  static constexpr TimeWindow infinite() { return {-kInfinity, kInfinity}; }

  constexpr double start() const { return start_; }
  constexpr double end() const { return end_; }
  constexpr bool contains(double t) const { return t >= start_ && t <= end_; }
  constexpr bool is_finite() const { return std::isfinite(start_) && std::isfinite(end_); }

 private:
  double start_;
  double end_;
};

// Current vector and its spatial Jacobian at one sample point.
struct FlowSample {
  Vec2 c;          // current (u, v)
  double u_x = 0;  // du/dx
  double u_y = 0;  // du/dy
  double v_x = 0;  // dv/dx
  double v_y = 0;  // dv/dy
};

class FlowField {
 public:
  explicit FlowField(TimeWindow window = TimeWindow::infinite()) : window_(window) {}
  virtual ~FlowField() = default;

  // Samples the field; counts one model call.  Throws std::domain_error when t
  // lies outside the validity window.
  FlowSample sample(Vec2 p, double t, Counters& tally) const {
    if (!window_.contains(t)) {
      throw std::domain_error("flow field sampled outside its validity window");
    }
    ++tally.cmc;
    return evaluate(p, t);
  }

  const TimeWindow& window() const { return window_; }

 protected:
  virtual FlowSample evaluate(Vec2 p, double t) const = 0;

 private:
  TimeWindow window_;
};

class UniformField final : public FlowField {
 public:
  explicit UniformField(Vec2 current, TimeWindow window = TimeWindow::infinite())
      : FlowField(window), current_(current) {}

  Vec2 current() const { return current_; }

 protected:
  FlowSample evaluate(Vec2, double) const override { return {current_, 0, 0, 0, 0}; }

 private:
  Vec2 current_;
};

struct MeanderingJetParams {
  double b0 = 1.2;       // mean meander amplitude
  double eps = 0.3;      // amplitude modulation depth
  double omega = 0.4;    // amplitude modulation frequency
  double theta0 = std::numbers::pi / 2.0;  // amplitude modulation phase
  double k = 0.84;       // meander wavenumber
  double c = 0.12;       // downstream phase speed
};

// Time-dependent meandering-jet stream function; the velocity field is its
// skew gradient (u = -d(phi)/dy, v = d(phi)/dx), evaluated analytically
// together with the spatial Jacobian needed by the course optimizer.
class MeanderingJetField final : public FlowField {
 public:
  explicit MeanderingJetField(MeanderingJetParams params = {},
                              TimeWindow window = TimeWindow::infinite())
      : FlowField(window), p_(params) {}

  const MeanderingJetParams& params() const { return p_; }

  // Exposed so tests can check the analytic velocity against finite
  // differences of the scalar stream function.
  double stream_function(Vec2 p, double t) const;

 protected:
  FlowSample evaluate(Vec2 p, double t) const override;

 private:
  MeanderingJetParams p_;
};

// Zonal current concentrated in a Gaussian band around y = 0:
//   u(y) = amplitude * exp(-(y/width)^2), v = 0.
class ShearBandField final : public FlowField {
 public:
  ShearBandField(double amplitude, double width, TimeWindow window = TimeWindow::infinite())
      : FlowField(window), amplitude_(amplitude), width_(width) {
    if (width <= 0) throw std::invalid_argument("shear band width must be positive");
  }

  double amplitude() const { return amplitude_; }
  double width() const { return width_; }

 protected:
  FlowSample evaluate(Vec2 p, double t) const override;

 private:
  double amplitude_;
  double width_;
};

// Largest current magnitude found on a dense space-time lattice over
// region x window, scaled by a safety factor.  Used to keep the search
// heuristic admissible.  Lattice counts are per axis and must be >= 2.
double max_current_speed(const FlowField& field, const Box2& region, const TimeWindow& window,
                         int nx, int ny, int nt, double safety = 1.05);

}  // namespace flowplan
