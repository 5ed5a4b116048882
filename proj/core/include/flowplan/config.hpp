#pragma once

#include <memory>
#include <string>

#include "flowplan/cost.hpp"
#include "flowplan/departure.hpp"
#include "flowplan/flow_field.hpp"
#include "flowplan/search.hpp"

namespace flowplan {

struct ConfigError : std::runtime_error {
  ConfigError(int line, const std::string& message)
      : std::runtime_error("config line " + std::to_string(line) + ": " + message), line(line) {}
  explicit ConfigError(const std::string& message) : std::runtime_error(message), line(0) {}
  int line;
};

struct FieldConfig {
  enum class Kind { Jet, Uniform, ShearBand } kind = Kind::Jet;
  MeanderingJetParams jet{};
  Vec2 uniform_current{};
  double band_amplitude = -0.4;
  double band_width = 1.0;
  double window_start = -kInfinity;
  double window_end = kInfinity;
};

// One planning scenario: field, graph, vehicle, search tuning, mission
// endpoints, and the departure-time window.
struct RunConfig {
  FieldConfig field;

  Box2 region{0.0, 12.0, -4.0, 4.0};
  double grid_size = 0.4;
  int sectors = 3;

  double v_veh_bf = 0.5;
  StepControl integration{};
  // Scenario runs feed this to the search gates, so it starts from the
  // coarse gating profile rather than the fine standalone defaults.
  OptCourseParams opt_course = OptCourseParams::gate_profile();

  Preset preset = Preset::ITVE;
  double dphi_max_deg = 27.5;
  double phi_max_deg = 180.0;
  double v_min = 0.0;
  double v_current_max = -1.0;  // < 0: derive from the field over region x window

  Vec2 start{};
  Vec2 goal{};
  double t0 = 0.0;

  double dep_window_start = 0.0;
  double dep_window_end = 48.0;
  double dep_dt = 4.0;
  MinimizeMethod dep_method = MinimizeMethod::Brent;
  double dep_tol = 0.01;
  unsigned dep_threads = 0;
  double coarse_grid_size = 0.0;  // 0 = reuse the fine graph for sampling
  int coarse_sectors = 0;

  std::string output_dir = "out";
};

// Parses the INI-style config text.  Unknown sections or keys are errors, as
// are malformed numbers.  Line numbers in errors are 1-based.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical form: every section and key in fixed order.  Parsing the output
// and serializing again is byte-identical.
std::string serialize_config(const RunConfig& cfg);

std::unique_ptr<FlowField> make_field(const FieldConfig& cfg);

// Cross-field checks (start/goal inside region, usable windows, ...).
void validate_config(const RunConfig& cfg);

// v_current_max: configured value, or the dense-lattice bound for the
// region/window when the config requests derivation.
double resolve_current_bound(const RunConfig& cfg, const FlowField& field);

}  // namespace flowplan
