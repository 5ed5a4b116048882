#include "flowplan/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "flowplan/heap.hpp"

namespace flowplan {

namespace {

struct PresetTraits {
  bool improve_guard;  // skip successors whose label cannot improve
  bool astar;          // key d + h, stop when the goal is extracted
  enum class Gate { None, OptimalCourse, PredecessorCourse } gate;
  bool area_objective;  // order and relax on accumulated cross-track area
};

PresetTraits traits_of(Preset p) {
  using Gate = PresetTraits::Gate;
  switch (p) {
    case Preset::TVE:       return {false, false, Gate::None, false};
    case Preset::ITVE:      return {true, false, Gate::None, false};
    case Preset::AStarTVE:  return {true, true, Gate::None, false};
    case Preset::ZTVE:      return {true, false, Gate::OptimalCourse, false};
    case Preset::STVE:      return {true, false, Gate::PredecessorCourse, false};
    case Preset::ZAStarTVE: return {true, true, Gate::OptimalCourse, false};
    case Preset::SAStarTVE: return {true, true, Gate::PredecessorCourse, false};
    case Preset::HTTVE:     return {true, false, Gate::PredecessorCourse, true};
  }
  throw std::invalid_argument("unknown preset");
}

constexpr std::array<std::pair<Preset, std::string_view>, 8> kPresetNames{{
    {Preset::TVE, "TVE"},
    {Preset::ITVE, "ITVE"},
    {Preset::AStarTVE, "ASTAR-TVE"},
    {Preset::ZTVE, "ZTVE"},
    {Preset::STVE, "STVE"},
    {Preset::ZAStarTVE, "ZASTAR-TVE"},
    {Preset::SAStarTVE, "SASTAR-TVE"},
    {Preset::HTTVE, "HTTVE"},
}};

enum class Color : std::uint8_t { White, Gray, Black };

}  // namespace

std::string_view preset_name(Preset p) {
  for (const auto& [preset, name] : kPresetNames) {
    if (preset == p) return name;
  }
  return "?";
}

std::optional<Preset> preset_from_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& [preset, key] : kPresetNames) {
    if (upper == key) return preset;
  }
  return std::nullopt;
}

double heuristic(Vec2 from, Vec2 goal, double v_veh_bf, double v_current_max) {
  if (!(v_veh_bf > 0)) throw std::invalid_argument("heuristic: vehicle speed must be positive");
  if (!(v_current_max >= 0)) throw std::invalid_argument("heuristic: current bound must be >= 0");
  return distance(from, goal) / (v_veh_bf + v_current_max);
}

SearchResult search(const Graph& graph, const SearchConfig& cfg, VertexId s, VertexId g,
                    double t0, const CostContext& ctx) {
  ctx.validate();
  cfg.opt_course.validate();
  const auto traits = traits_of(cfg.preset);
  const auto n = graph.vertex_count();

  const auto valid = [&](VertexId v) { return v >= 0 && static_cast<std::size_t>(v) < n; };
  if (!valid(s)) throw std::invalid_argument("search: invalid source vertex");
  if (g != kInvalidVertex && !valid(g)) throw std::invalid_argument("search: invalid goal vertex");
  if ((traits.astar || traits.area_objective) && g == kInvalidVertex) {
    throw std::invalid_argument("search: this preset requires a goal vertex");
  }
  if (traits.astar && !(cfg.v_current_max >= 0)) {
    throw std::invalid_argument("search: heuristic presets need v_current_max >= 0");
  }
  if (traits.gate != PresetTraits::Gate::None && !traits.area_objective && !(cfg.dphi_max > 0)) {
    throw std::invalid_argument("search: gated presets need dphi_max > 0");
  }
  if (traits.area_objective && (!(cfg.phi_max > 0) || !(cfg.v_min >= 0))) {
    throw std::invalid_argument("search: HTTVE needs phi_max > 0 and v_min >= 0");
  }
  if (!ctx.field->window().contains(t0)) {
    throw std::domain_error("search: departure time outside the field window");
  }
  if (traits.area_objective && s == g) {
    throw std::invalid_argument("search: HTTVE needs distinct source and goal");
  }

  SearchResult res;
  res.preset = cfg.preset;
  res.source = s;
  res.goal = g;
  res.t0 = t0;
  res.d.assign(n, kInfinity);
  res.pi.assign(n, kInvalidVertex);
  if (traits.area_objective) res.area.assign(n, kInfinity);

  Counters tally;
  CostContext local = ctx;
  local.counters = &tally;

  std::vector<Color> color(n, Color::White);
  std::vector<double> h_cache;
  if (traits.astar) h_cache.assign(n, -1.0);
  const auto h_of = [&](VertexId v) {
    double& hv = h_cache[static_cast<std::size_t>(v)];
    if (hv < 0) hv = heuristic(graph.position(v), graph.position(g), local.v_veh_bf, cfg.v_current_max);
    return hv;
  };

  // queue key: arrival time, f = d + h, or accumulated area, by preset
  AddressableHeap<double> queue(n);
  res.d[static_cast<std::size_t>(s)] = t0;
  if (traits.area_objective) res.area[static_cast<std::size_t>(s)] = 0.0;
  color[static_cast<std::size_t>(s)] = Color::Gray;
  queue.insert(s, traits.astar ? t0 + h_of(s) : (traits.area_objective ? 0.0 : t0));

  const double gate_width = traits.area_objective ? cfg.phi_max : cfg.dphi_max;

  while (!queue.empty()) {
    const auto [u, key] = queue.extract_min();
    (void)key;
    const auto iu = static_cast<std::size_t>(u);
    if (traits.astar && u == g) {
      res.counters = tally;
      if (ctx.counters != nullptr) *ctx.counters += tally;
      return res;  // heuristic presets stop as soon as the goal is examined
    }
    color[iu] = Color::Black;
    ++res.vertices_expanded;

    // gate reference course, fixed per expansion
    double phi_ref = 0;
    bool gated = traits.gate != PresetTraits::Gate::None && u != s;
    if (gated) {
      const VertexId pre = res.pi[iu];
      if (traits.gate == PresetTraits::Gate::OptimalCourse) {
        phi_ref = calc_opt_dir(graph.position(pre), graph.position(u),
                               res.d[static_cast<std::size_t>(pre)], res.d[iu],
                               graph.min_edge_length(), *local.field, local.v_veh_bf,
                               cfg.opt_course, tally);
      } else {
        phi_ref = (graph.position(u) - graph.position(pre)).heading();
      }
    }

    for (const VertexId v : graph.successors(u)) {
      const auto iv = static_cast<std::size_t>(v);
      if (traits.improve_guard) {
        const bool can_improve = traits.area_objective ? res.area[iu] < res.area[iv]
                                                       : res.d[iu] < res.d[iv];
        if (!can_improve) continue;
      }

      if (gated) {
        const double phi_path = (graph.position(v) - graph.position(u)).heading();
        if (std::abs(wrap_angle(phi_ref - phi_path)) >= gate_width) {
          ++res.gate_rejections;
          continue;
        }
      }

      const double w = wfunc(graph.position(u), graph.position(v), res.d[iu], local);

      double candidate;  // new value of the ordering objective at v
      double d_v;
      if (traits.area_objective) {
        if (!std::isfinite(w)) continue;
        const double v_path = distance(graph.position(u), graph.position(v)) / w;
        if (!(v_path > cfg.v_min)) continue;  // too little progress along this edge
        candidate = afunc(graph.position(u), graph.position(v), graph.position(s),
                          graph.position(g)) +
                    res.area[iu];
        d_v = w + res.d[iu];
        if (!(candidate < res.area[iv])) continue;
        res.area[iv] = candidate;
      } else {
        candidate = w + res.d[iu];
        d_v = candidate;
        if (!(candidate < res.d[iv])) continue;
      }

      res.d[iv] = d_v;
      res.pi[iv] = u;
      const double queue_key = traits.astar ? candidate + h_of(v) : candidate;
      if (color[iv] == Color::Gray) {
        queue.decrease_key(v, queue_key);
      } else {
        color[iv] = Color::Gray;  // discover (White) or reopen (Black)
        queue.insert(v, queue_key);
      }
    }
  }

  res.counters = tally;
  if (ctx.counters != nullptr) *ctx.counters += tally;
  return res;
}

std::optional<Path> extract_path(const SearchResult& result, const Graph& graph, VertexId g) {
  if (!result.reached(g)) return std::nullopt;

  std::vector<VertexId> chain;
  for (VertexId v = g; v != kInvalidVertex; v = result.pi[static_cast<std::size_t>(v)]) {
    chain.push_back(v);
    if (chain.size() > graph.vertex_count()) {
      throw std::logic_error("extract_path: predecessor chain contains a cycle");
    }
  }
  std::reverse(chain.begin(), chain.end());
  if (chain.front() != result.source) return std::nullopt;

  Path path;
  path.t0 = result.t0;
  path.travel_time = result.d[static_cast<std::size_t>(g)] - result.t0;
  path.waypoints.reserve(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const VertexId v = chain[i];
    path.waypoints.push_back({v, graph.position(v), result.d[static_cast<std::size_t>(v)]});
    if (i > 0) path.length += distance(graph.position(chain[i - 1]), graph.position(v));
  }
  return path;
}

}  // namespace flowplan
