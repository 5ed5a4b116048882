#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "flowplan/cost.hpp"
#include "flowplan/graph.hpp"
#include "flowplan/zermelo.hpp"

namespace flowplan {

// Search presets, ordered roughly by increasing pruning aggressiveness.
//  TVE        label-correcting time-varying Dijkstra, no shortcuts
//  ITVE       TVE + skip successors that can no longer improve
//  AStarTVE   ITVE + admissible goal heuristic and early exit
//  ZTVE       ITVE + successor gate around the locally optimal course
//  STVE       ITVE + successor gate around the predecessor edge course
//  ZAStarTVE  AStarTVE + optimal-course gate
//  SAStarTVE  AStarTVE + predecessor-course gate
//  HTTVE      track-holding variant ordered by cross-track area
enum class Preset {
  TVE,
  ITVE,
  AStarTVE,
  ZTVE,
  STVE,
  ZAStarTVE,
  SAStarTVE,
  HTTVE,
};

std::string_view preset_name(Preset p);
std::optional<Preset> preset_from_name(std::string_view name);

struct SearchConfig {
  Preset preset = Preset::ITVE;
  // Half-width of the successor gate for the Z/S presets.
  double dphi_max = deg_to_rad(27.5);
  // Admissible bound on the current magnitude, for the heuristic presets.
  double v_current_max = 0.0;
  // HTTVE: minimum acceptable speed made good along an edge, and gate width.
  double v_min = 0.0;
  double phi_max = std::numbers::pi;
  OptCourseParams opt_course = OptCourseParams::gate_profile();
};

// Lower bound on the remaining travel time: straight-line distance at the
// best conceivable speed made good.
double heuristic(Vec2 from, Vec2 goal, double v_veh_bf, double v_current_max);

struct SearchResult {
  Preset preset{};
  VertexId source = kInvalidVertex;
  VertexId goal = kInvalidVertex;
  double t0 = 0;
  std::vector<double> d;       // arrival time per vertex (absolute)
  std::vector<VertexId> pi;    // predecessor per vertex
  std::vector<double> area;    // accumulated cross-track area (HTTVE only)
  Counters counters;           // model/cost calls made by this search alone
  long long vertices_expanded = 0;
  long long gate_rejections = 0;

  bool reached(VertexId v) const {
    return v != kInvalidVertex && std::isfinite(d[static_cast<std::size_t>(v)]);
  }
};

// Runs the selected preset from s departing at t0.  g may be kInvalidVertex
// for the full-sweep presets; the heuristic presets and HTTVE require it.
// Cost/model calls are recorded in the result and also added to
// ctx.counters when present.  Throws std::domain_error when t0 lies outside
// the field window.
SearchResult search(const Graph& graph, const SearchConfig& cfg, VertexId s, VertexId g,
                    double t0, const CostContext& ctx);

struct Waypoint {
  VertexId vertex = kInvalidVertex;
  Vec2 pos;
  double arrival = 0;
};

struct Path {
  std::vector<Waypoint> waypoints;  // source first
  double t0 = 0;
  double travel_time = 0;
  double length = 0;
};

// Reconstructs the s->g path from the predecessor chain; empty when g was
// never reached.
std::optional<Path> extract_path(const SearchResult& result, const Graph& graph, VertexId g);

}  // namespace flowplan
