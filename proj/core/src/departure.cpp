#include "flowplan/departure.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace flowplan {

namespace {

constexpr double kPenalty = 1e300;  // stands in for +inf inside the refiners

// candidate ordering: smaller value wins; near-ties go to the earlier abscissa
bool better_candidate(double x_new, double f_new, double x_old, double f_old) {
  const double tie = 1e-9 * std::max(1.0, std::min(std::abs(f_new), std::abs(f_old)));
  if (std::abs(f_new - f_old) <= tie) return x_new < x_old;
  return f_new < f_old;
}

}  // namespace

std::string_view minimize_method_name(MinimizeMethod m) {
  switch (m) {
    case MinimizeMethod::Golden: return "golden";
    case MinimizeMethod::Fibonacci: return "fibonacci";
    case MinimizeMethod::Brent: return "brent";
  }
  return "?";
}

std::optional<MinimizeMethod> minimize_method_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "golden") return MinimizeMethod::Golden;
  if (lower == "fibonacci") return MinimizeMethod::Fibonacci;
  if (lower == "brent") return MinimizeMethod::Brent;
  return std::nullopt;
}

SampledCurve sample_curve(const Planner& planner, double t_lo, double t_hi, double dt_dep,
                          unsigned threads) {
  if (!(dt_dep > 0)) throw std::invalid_argument("sample_curve: dt_dep must be positive");
  if (!(t_hi >= t_lo)) throw std::invalid_argument("sample_curve: empty window");

  const auto count = static_cast<std::size_t>(std::floor((t_hi - t_lo) / dt_dep + 1e-9)) + 1;
  std::vector<double> times(count);
  for (std::size_t i = 0; i < count; ++i) times[i] = t_lo + static_cast<double>(i) * dt_dep;

  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));

  struct Slice {
    std::vector<SupportPoint> points;
    Counters counters;
  };
  std::vector<std::future<Slice>> futures;
  futures.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w]() {
      Slice slice;
      for (std::size_t i = w; i < count; i += workers) {
        const PlannerOutcome out = planner(times[i]);
        slice.points.push_back({times[i], out.t_trav});
        slice.counters += out.counters;
      }
      return slice;
    }));
  }

  SampledCurve curve;
  curve.points.resize(count);
  for (unsigned w = 0; w < workers; ++w) {
    Slice slice = futures[w].get();
    std::size_t k = 0;
    for (std::size_t i = w; i < count; i += workers, ++k) curve.points[i] = slice.points[k];
    curve.counters += slice.counters;  // merge in worker order: deterministic
  }
  return curve;
}

AkimaCurve AkimaCurve::fit(std::span<const SupportPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("akima fit: need at least two points");

  AkimaCurve curve;
  curve.x_.resize(n);
  curve.y_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    curve.x_[i] = points[i].t_dep;
    curve.y_[i] = points[i].t_trav;
    if (!std::isfinite(points[i].t_trav)) {
      throw std::invalid_argument("akima fit: support values must be finite");
    }
    if (i > 0 && !(curve.x_[i] > curve.x_[i - 1])) {
      throw std::invalid_argument("akima fit: abscissae must be strictly increasing");
    }
  }

  if (n < 5) {
    curve.linear_ = true;
    return curve;
  }

  // secants with two quadratic-extrapolation ghosts on each side
  std::vector<double> m(n + 3);
  for (std::size_t i = 0; i < n - 1; ++i) {
    m[i + 2] = (curve.y_[i + 1] - curve.y_[i]) / (curve.x_[i + 1] - curve.x_[i]);
  }
  m[1] = 2.0 * m[2] - m[3];
  m[0] = 2.0 * m[1] - m[2];
  m[n + 1] = 2.0 * m[n] - m[n - 1];
  m[n + 2] = 2.0 * m[n + 1] - m[n];

  curve.slope_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w1 = std::abs(m[i + 3] - m[i + 2]);
    const double w2 = std::abs(m[i + 1] - m[i]);
    curve.slope_[i] =
        (w1 + w2) > 0 ? (w1 * m[i + 1] + w2 * m[i + 2]) / (w1 + w2) : 0.5 * (m[i + 1] + m[i + 2]);
  }

  // Limit each slope to the monotone box of its adjacent true secants so that
  // monotone data yields a monotone (overshoot-free) curve; collinear data is
  // untouched because every secant then equals the slope.
  for (std::size_t i = 0; i < n; ++i) {
    double lo = -kInfinity;
    double hi = kInfinity;
    const auto apply = [&](double secant) {
      lo = std::max(lo, std::min(0.0, 3.0 * secant));
      hi = std::min(hi, std::max(0.0, 3.0 * secant));
    };
    if (i > 0) apply(m[i + 1]);
    if (i + 1 < n) apply(m[i + 2]);
    curve.slope_[i] = std::clamp(curve.slope_[i], lo, hi);
  }
  return curve;
}

double AkimaCurve::operator()(double t) const {
  t = std::clamp(t, x_.front(), x_.back());
  // rightmost interval whose left abscissa is <= t
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = std::clamp<std::size_t>(
      static_cast<std::size_t>(it - x_.begin()), 1, x_.size() - 1) - 1;

  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  if (linear_) {
    return y_[i] + s * (y_[i + 1] - y_[i]);
  }
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

Bracket bracket_global_min(const AkimaCurve& curve, std::span<const SupportPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("bracket_global_min: need >= 2 points");

  constexpr int kDense = 1000;
  const double lo = curve.front();
  const double hi = curve.back();
  double best_t = lo;
  double best_y = curve(lo);
  for (int i = 1; i < kDense; ++i) {
    const double t = lo + (hi - lo) * i / (kDense - 1);
    const double y = curve(t);
    if (y < best_y) {  // strict: ties keep the earliest abscissa
      best_y = y;
      best_t = t;
    }
  }

  // nearest support point to the dense minimizer (ties toward the earlier one)
  std::size_t j = 0;
  double best_gap = kInfinity;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double gap = std::abs(points[i].t_dep - best_t);
    if (gap < best_gap) {
      best_gap = gap;
      j = i;
    }
  }

  Bracket out;
  out.boundary = (j == 0 || j + 1 == points.size());
  out.lo = points[j > 0 ? j - 1 : 0].t_dep;
  out.hi = points[std::min(j + 1, points.size() - 1)].t_dep;
  if (out.lo == out.hi) {  // degenerate single-sided bracket at a window edge
    out.lo = points[0].t_dep;
    out.hi = points[1].t_dep;
  }
  return out;
}

namespace {

struct BestTracker {
  double x = 0;
  double fx = kInfinity;
  int calls = 0;
  bool any_finite = false;

  double eval(const std::function<double(double)>& f, double t) {
    double y = f(t);
    ++calls;
    if (std::isfinite(y)) {
      any_finite = true;
    } else {
      y = kPenalty;
    }
    if (calls == 1 || better_candidate(t, y, x, fx)) {
      x = t;
      fx = y;
    }
    return y;
  }
};

MinimizeResult finish(const BestTracker& best) {
  if (!best.any_finite) {
    throw std::runtime_error("minimize: no finite objective value inside the bracket");
  }
  return {best.x, best.fx, best.calls};
}

MinimizeResult golden_section(const std::function<double(double)>& f, double a, double b,
                              double tol) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  BestTracker best;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = best.eval(f, x1);
  double f2 = best.eval(f, x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = best.eval(f, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = best.eval(f, x2);
    }
  }
  return finish(best);
}

MinimizeResult fibonacci_search(const std::function<double(double)>& f, double a, double b,
                                double tol) {
  std::vector<double> fib{1.0, 1.0};
  while (fib.back() < (b - a) / tol) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);

  BestTracker best;
  std::size_t k = fib.size() - 1;
  if (k < 2) {  // interval already within tolerance: one probe decides
    best.eval(f, 0.5 * (a + b));
    return finish(best);
  }

  double x1 = a + fib[k - 2] / fib[k] * (b - a);
  double x2 = a + fib[k - 1] / fib[k] * (b - a);
  double f1 = best.eval(f, x1);
  double f2 = best.eval(f, x2);
  while (k > 2) {
    --k;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + fib[k - 2] / fib[k] * (b - a);
      if (k > 2) f1 = best.eval(f, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + fib[k - 1] / fib[k] * (b - a);
      if (k > 2) f2 = best.eval(f, x2);
    }
  }
  return finish(best);
}

MinimizeResult brent_min(const std::function<double(double)>& f, double a, double b, double tol) {
  static const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0;
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const double t = tol / 2.0;  // Brent's |x - m| test works with half-widths

  BestTracker best;
  double x = a + invphi2 * (b - a);
  double w = x, v = x;
  double fx = best.eval(f, x);
  double fw = fx, fv = fx;
  double d = 0, e = 0;

  for (int iter = 0; iter < 200; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol1 = eps * std::abs(x) + t;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

    bool golden = true;
    if (std::abs(e) > tol1) {
      // parabola through x, v, w
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      const double e_old = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = x < m ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x < m ? b : a) - x;
      d = invphi2 * e;
    }

    const double u = x + (std::abs(d) >= tol1 ? d : (d > 0 ? tol1 : -tol1));
    const double fu = best.eval(f, u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return finish(best);
}

}  // namespace

MinimizeResult minimize(const std::function<double(double)>& f, const Bracket& bracket,
                        MinimizeMethod method, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("minimize: tol must be positive");
  if (!(bracket.hi > bracket.lo)) throw std::invalid_argument("minimize: empty bracket");
  switch (method) {
    case MinimizeMethod::Golden: return golden_section(f, bracket.lo, bracket.hi, tol);
    case MinimizeMethod::Fibonacci: return fibonacci_search(f, bracket.lo, bracket.hi, tol);
    case MinimizeMethod::Brent: return brent_min(f, bracket.lo, bracket.hi, tol);
  }
  throw std::invalid_argument("minimize: unknown method");
}

std::optional<DepartureResult> optimal_departure(const Planner& fine, const DepartureConfig& cfg,
                                                 const Planner* coarse) {
  const Planner& sampler = coarse != nullptr ? *coarse : fine;
  SampledCurve sampled = sample_curve(sampler, cfg.t_lo, cfg.t_hi, cfg.dt_dep, cfg.threads);

  DepartureResult res;
  res.method = cfg.method;
  res.samples = sampled.points;
  res.counters = sampled.counters;

  struct Candidate {
    double x = 0;
    double fx = kInfinity;
    bool boundary = false;
    bool linear = false;
    bool valid = false;
  };
  Candidate best;
  const auto offer = [&](double x, double fx, bool boundary, bool linear) {
    if (!std::isfinite(fx)) return;
    if (!best.valid || better_candidate(x, fx, best.x, best.fx)) {
      best = {x, fx, boundary, linear, true};
    }
  };

  // refinement objective: full-fidelity planner, counters folded into res
  const auto objective = [&](double t_dep) {
    const PlannerOutcome out = fine(t_dep);
    res.counters += out.counters;
    ++res.refine_calls;
    return out.t_trav;
  };

  // walk maximal stretches of finite supports; each is bracketed independently
  const auto& pts = sampled.points;
  std::size_t i = 0;
  while (i < pts.size()) {
    if (!std::isfinite(pts[i].t_trav)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < pts.size() && std::isfinite(pts[j + 1].t_trav)) ++j;
    const std::span<const SupportPoint> segment{pts.data() + i, j - i + 1};

    if (segment.size() == 1) {
      // isolated feasible departure: nothing to bracket, evaluate it directly
      const double fx = coarse != nullptr ? objective(segment[0].t_dep) : segment[0].t_trav;
      offer(segment[0].t_dep, fx, true, false);
    } else {
      const AkimaCurve curve = AkimaCurve::fit(segment);
      const Bracket bracket = bracket_global_min(curve, segment);
      const MinimizeResult refined = minimize(objective, bracket, cfg.method, cfg.tol);
      offer(refined.x, refined.fx, bracket.boundary, curve.linear_fallback());
    }
    i = j + 1;
  }

  // with same-fidelity sampling the supports themselves are candidates
  if (coarse == nullptr) {
    for (const auto& p : pts) offer(p.t_dep, p.t_trav, false, false);
  }

  if (!best.valid) return std::nullopt;
  res.t_dep_opt = best.x;
  res.t_trav_opt = best.fx;
  res.boundary_minimum = best.boundary;
  res.linear_fallback = best.linear;
  return res;
}

Planner make_search_planner(const Graph& graph, const SearchConfig& cfg, VertexId s, VertexId g,
                            const CostContext& ctx) {
  CostContext base = ctx;
  base.counters = nullptr;  // each planner call gets a private tally
  return [&graph, cfg, s, g, base](double t_dep) {
    PlannerOutcome out;
    if (!base.field->window().contains(t_dep)) return out;  // beyond horizon: no path
    const SearchResult r = search(graph, cfg, s, g, t_dep, base);
    out.counters = r.counters;
    if (r.reached(g)) out.t_trav = r.d[static_cast<std::size_t>(g)] - t_dep;
    return out;
  };
}

}  // namespace flowplan
