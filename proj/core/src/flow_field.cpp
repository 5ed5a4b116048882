#include "flowplan/flow_field.hpp"

#include <algorithm>
#include <cmath>

namespace flowplan {

namespace {

double sech2(double a) {
  const double c = std::cosh(a);
  return 1.0 / (c * c);
}

}  // namespace

double MeanderingJetField::stream_function(Vec2 pos, double t) const {
  const double b = p_.b0 + p_.eps * std::cos(p_.omega * t + p_.theta0);
  const double xi = p_.k * (pos.x - p_.c * t);
  const double n = pos.y - b * std::cos(xi);
  const double s = std::sin(xi);
  const double d = std::sqrt(1.0 + p_.k * p_.k * b * b * s * s);
  return 1.0 - std::tanh(n / d);
}

FlowSample MeanderingJetField::evaluate(Vec2 pos, double t) const {
  const double b = p_.b0 + p_.eps * std::cos(p_.omega * t + p_.theta0);
  const double k = p_.k;
  const double xi = k * (pos.x - p_.c * t);
  const double s = std::sin(xi);
  const double c = std::cos(xi);

  const double n = pos.y - b * c;
  const double k2b2 = k * k * b * b;
  const double d = std::sqrt(1.0 + k2b2 * s * s);
  const double d2 = d * d;
  const double d3 = d2 * d;

  // First and second derivatives of the numerator and denominator of the
  // stream-function argument a = n / d with respect to x (d is independent
  // of y, so the y derivatives are trivial).
  const double n_x = b * k * s;
  const double n_xx = b * k * k * c;
  const double d_x = k * k2b2 * s * c / d;
  const double d_xx = k * k * k2b2 * (c * c - s * s) / d - (k * k2b2 * s * c) * (k * k2b2 * s * c) / d3;

  const double a = n / d;
  const double a_x = n_x / d - n * d_x / d2;
  const double a_y = 1.0 / d;
  const double a_xx = n_xx / d - 2.0 * n_x * d_x / d2 - n * d_xx / d2 + 2.0 * n * d_x * d_x / d3;
  const double a_xy = -d_x / d2;

  const double sh2 = sech2(a);
  const double th = std::tanh(a);

  FlowSample out;
  out.c = {sh2 * a_y, -sh2 * a_x};
  out.u_x = -2.0 * sh2 * th * a_x * a_y - sh2 * d_x / d2;
  out.u_y = -2.0 * sh2 * th * a_y * a_y;
  out.v_x = 2.0 * sh2 * th * a_x * a_x - sh2 * a_xx;
  out.v_y = 2.0 * sh2 * th * a_x * a_y - sh2 * a_xy;
  return out;
}

FlowSample ShearBandField::evaluate(Vec2 pos, double /*t*/) const {
  const double r = pos.y / width_;
  const double u = amplitude_ * std::exp(-r * r);
  FlowSample out;
  out.c = {u, 0.0};
  out.u_y = u * (-2.0 * pos.y / (width_ * width_));
  return out;
}

double max_current_speed(const FlowField& field, const Box2& region, const TimeWindow& window,
                         int nx, int ny, int nt, double safety) {
  if (!region.valid()) throw std::invalid_argument("max_current_speed: empty region");
  if (!window.is_finite()) throw std::invalid_argument("max_current_speed: window must be finite");
  if (nx < 2 || ny < 2 || nt < 2) {
    throw std::invalid_argument("max_current_speed: lattice counts must be >= 2 per axis");
  }

  Counters scratch;  // precomputation is not charged to any planning tally
  double best2 = 0.0;
  for (int it = 0; it < nt; ++it) {
    const double t = window.start() + (window.end() - window.start()) * it / (nt - 1);
    for (int iy = 0; iy < ny; ++iy) {
      const double y = region.y_min + region.height() * iy / (ny - 1);
      for (int ix = 0; ix < nx; ++ix) {
        const double x = region.x_min + region.width() * ix / (nx - 1);
        best2 = std::max(best2, field.sample({x, y}, t, scratch).c.norm2());
      }
    }
  }
  return safety * std::sqrt(best2);
}

}  // namespace flowplan
