#include "flowplan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace flowplan {

namespace {

std::string trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& value, int line) {
  const std::string v = lower(trim(value));
  if (v == "inf" || v == "+inf") return kInfinity;
  if (v == "-inf") return -kInfinity;
  double out = 0;
  const char* begin = v.data();
  const char* end = begin + v.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(line, "malformed number '" + value + "'");
  return out;
}

long parse_integer(const std::string& value, int line) {
  long out = 0;
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(line, "malformed integer '" + value + "'");
  }
  return out;
}

// shortest decimal form that parses back to exactly the same double
std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    double back = 0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) break;
  }
  return buf;
}

struct Handler {
  std::function<void(RunConfig&, const std::string& value, int line)> set;
  std::function<std::string(const RunConfig&)> get;
};

using SectionMap = std::map<std::string, std::vector<std::pair<std::string, Handler>>>;

Handler num(double RunConfig::* field) {
  return {[field](RunConfig& c, const std::string& v, int line) { c.*field = parse_double(v, line); },
          [field](const RunConfig& c) { return format_double(c.*field); }};
}

const SectionMap& schema() {
  static const SectionMap sections = [] {
    SectionMap s;

    s["field"] = {
        {"kind",
         {[](RunConfig& c, const std::string& v, int line) {
            const std::string k = lower(trim(v));
            if (k == "jet") c.field.kind = FieldConfig::Kind::Jet;
            else if (k == "uniform") c.field.kind = FieldConfig::Kind::Uniform;
            else if (k == "shear-band") c.field.kind = FieldConfig::Kind::ShearBand;
            else throw ConfigError(line, "unknown field kind '" + v + "'");
          },
          [](const RunConfig& c) -> std::string {
            switch (c.field.kind) {
              case FieldConfig::Kind::Jet: return "jet";
              case FieldConfig::Kind::Uniform: return "uniform";
              case FieldConfig::Kind::ShearBand: return "shear-band";
            }
            return "jet";
          }}},
        {"b0", {[](RunConfig& c, const std::string& v, int l) { c.field.jet.b0 = parse_double(v, l); },
                [](const RunConfig& c) { return format_double(c.field.jet.b0); }}},
        {"eps", {[](RunConfig& c, const std::string& v, int l) { c.field.jet.eps = parse_double(v, l); },
                 [](const RunConfig& c) { return format_double(c.field.jet.eps); }}},
        {"omega",
         {[](RunConfig& c, const std::string& v, int l) { c.field.jet.omega = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.jet.omega); }}},
        {"theta0",
         {[](RunConfig& c, const std::string& v, int l) { c.field.jet.theta0 = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.jet.theta0); }}},
        {"k", {[](RunConfig& c, const std::string& v, int l) { c.field.jet.k = parse_double(v, l); },
               [](const RunConfig& c) { return format_double(c.field.jet.k); }}},
        {"c", {[](RunConfig& c, const std::string& v, int l) { c.field.jet.c = parse_double(v, l); },
               [](const RunConfig& c) { return format_double(c.field.jet.c); }}},
        {"u",
         {[](RunConfig& c, const std::string& v, int l) { c.field.uniform_current.x = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.uniform_current.x); }}},
        {"v",
         {[](RunConfig& c, const std::string& v, int l) { c.field.uniform_current.y = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.uniform_current.y); }}},
        {"amplitude",
         {[](RunConfig& c, const std::string& v, int l) { c.field.band_amplitude = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.band_amplitude); }}},
        {"width",
         {[](RunConfig& c, const std::string& v, int l) { c.field.band_width = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.band_width); }}},
        {"window_start",
         {[](RunConfig& c, const std::string& v, int l) { c.field.window_start = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.window_start); }}},
        {"window_end",
         {[](RunConfig& c, const std::string& v, int l) { c.field.window_end = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.field.window_end); }}},
    };

    s["graph"] = {
        {"x_min", {[](RunConfig& c, const std::string& v, int l) { c.region.x_min = parse_double(v, l); },
                   [](const RunConfig& c) { return format_double(c.region.x_min); }}},
        {"x_max", {[](RunConfig& c, const std::string& v, int l) { c.region.x_max = parse_double(v, l); },
                   [](const RunConfig& c) { return format_double(c.region.x_max); }}},
        {"y_min", {[](RunConfig& c, const std::string& v, int l) { c.region.y_min = parse_double(v, l); },
                   [](const RunConfig& c) { return format_double(c.region.y_min); }}},
        {"y_max", {[](RunConfig& c, const std::string& v, int l) { c.region.y_max = parse_double(v, l); },
                   [](const RunConfig& c) { return format_double(c.region.y_max); }}},
        {"grid_size", {num(&RunConfig::grid_size)}},
        {"sectors",
         {[](RunConfig& c, const std::string& v, int l) { c.sectors = static_cast<int>(parse_integer(v, l)); },
          [](const RunConfig& c) { return std::to_string(c.sectors); }}},
    };

    s["vehicle"] = {
        {"v_veh_bf", {num(&RunConfig::v_veh_bf)}},
    };

    s["integration"] = {
        {"h0", {[](RunConfig& c, const std::string& v, int l) { c.integration.h0 = parse_double(v, l); },
                [](const RunConfig& c) { return format_double(c.integration.h0); }}},
        {"h_min",
         {[](RunConfig& c, const std::string& v, int l) { c.integration.h_min = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.integration.h_min); }}},
        {"h_max",
         {[](RunConfig& c, const std::string& v, int l) { c.integration.h_max = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.integration.h_max); }}},
        {"eps", {[](RunConfig& c, const std::string& v, int l) { c.integration.eps = parse_double(v, l); },
                 [](const RunConfig& c) { return format_double(c.integration.eps); }}},
        {"tau", {[](RunConfig& c, const std::string& v, int l) { c.integration.tau = parse_double(v, l); },
                 [](const RunConfig& c) { return format_double(c.integration.tau); }}},
    };

    s["optcourse"] = {
        {"h0", {[](RunConfig& c, const std::string& v, int l) { c.opt_course.h0 = parse_double(v, l); },
                [](const RunConfig& c) { return format_double(c.opt_course.h0); }}},
        {"h_min",
         {[](RunConfig& c, const std::string& v, int l) { c.opt_course.h_min = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.opt_course.h_min); }}},
        {"h_max",
         {[](RunConfig& c, const std::string& v, int l) { c.opt_course.h_max = parse_double(v, l); },
          [](const RunConfig& c) { return format_double(c.opt_course.h_max); }}},
        {"eps", {[](RunConfig& c, const std::string& v, int l) { c.opt_course.eps = parse_double(v, l); },
                 [](const RunConfig& c) { return format_double(c.opt_course.eps); }}},
        {"tau", {[](RunConfig& c, const std::string& v, int l) { c.opt_course.tau = parse_double(v, l); },
                 [](const RunConfig& c) { return format_double(c.opt_course.tau); }}},
    };

    s["search"] = {
        {"preset",
         {[](RunConfig& c, const std::string& v, int line) {
            const auto p = preset_from_name(trim(v));
            if (!p) throw ConfigError(line, "unknown preset '" + v + "'");
            c.preset = *p;
          },
          [](const RunConfig& c) { return std::string(preset_name(c.preset)); }}},
        {"dphi_max_deg", {num(&RunConfig::dphi_max_deg)}},
        {"phi_max_deg", {num(&RunConfig::phi_max_deg)}},
        {"v_min", {num(&RunConfig::v_min)}},
        {"v_current_max",
         {[](RunConfig& c, const std::string& v, int line) {
            c.v_current_max = lower(trim(v)) == "auto" ? -1.0 : parse_double(v, line);
          },
          [](const RunConfig& c) -> std::string {
            return c.v_current_max < 0 ? "auto" : format_double(c.v_current_max);
          }}},
    };

    s["mission"] = {
        {"start_x", {[](RunConfig& c, const std::string& v, int l) { c.start.x = parse_double(v, l); },
                     [](const RunConfig& c) { return format_double(c.start.x); }}},
        {"start_y", {[](RunConfig& c, const std::string& v, int l) { c.start.y = parse_double(v, l); },
                     [](const RunConfig& c) { return format_double(c.start.y); }}},
        {"goal_x", {[](RunConfig& c, const std::string& v, int l) { c.goal.x = parse_double(v, l); },
                    [](const RunConfig& c) { return format_double(c.goal.x); }}},
        {"goal_y", {[](RunConfig& c, const std::string& v, int l) { c.goal.y = parse_double(v, l); },
                    [](const RunConfig& c) { return format_double(c.goal.y); }}},
        {"t0", {num(&RunConfig::t0)}},
    };

    s["departure"] = {
        {"window_start", {num(&RunConfig::dep_window_start)}},
        {"window_end", {num(&RunConfig::dep_window_end)}},
        {"dt", {num(&RunConfig::dep_dt)}},
        {"method",
         {[](RunConfig& c, const std::string& v, int line) {
            const auto m = minimize_method_from_name(trim(v));
            if (!m) throw ConfigError(line, "unknown method '" + v + "'");
            c.dep_method = *m;
          },
          [](const RunConfig& c) { return std::string(minimize_method_name(c.dep_method)); }}},
        {"tol", {num(&RunConfig::dep_tol)}},
        {"threads",
         {[](RunConfig& c, const std::string& v, int l) {
            const long n = parse_integer(v, l);
            if (n < 0) throw ConfigError(l, "threads must be >= 0");
            c.dep_threads = static_cast<unsigned>(n);
          },
          [](const RunConfig& c) { return std::to_string(c.dep_threads); }}},
        {"coarse_grid_size", {num(&RunConfig::coarse_grid_size)}},
        {"coarse_sectors",
         {[](RunConfig& c, const std::string& v, int l) {
            c.coarse_sectors = static_cast<int>(parse_integer(v, l));
          },
          [](const RunConfig& c) { return std::to_string(c.coarse_sectors); }}},
    };

    s["output"] = {
        {"dir",
         {[](RunConfig& c, const std::string& v, int) { c.output_dir = trim(v); },
          [](const RunConfig& c) { return c.output_dir; }}},
    };

    return s;
  }();
  return sections;
}

constexpr const char* kSectionOrder[] = {"field", "graph", "vehicle", "integration", "optcourse",
                                         "search", "mission", "departure", "output"};

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  const auto& sections = schema();

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of(";#");
    std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (sections.find(section) == sections.end()) {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "key outside any section");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));

    const auto& entries = sections.at(section);
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const auto& e) { return e.first == key; });
    if (it == entries.end()) {
      throw ConfigError(line_no, "unknown key '" + key + "' in section [" + section + "]");
    }
    it->second.set(cfg, value, line_no);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  const auto& sections = schema();
  std::string out;
  bool first = true;
  for (const char* name : kSectionOrder) {
    if (!first) out += "\n";
    first = false;
    out += "[";
    out += name;
    out += "]\n";
    for (const auto& [key, handler] : sections.at(name)) {
      out += key;
      out += " = ";
      out += handler.get(cfg);
      out += "\n";
    }
  }
  return out;
}

std::unique_ptr<FlowField> make_field(const FieldConfig& cfg) {
  const TimeWindow window{cfg.window_start, cfg.window_end};
  switch (cfg.kind) {
    case FieldConfig::Kind::Jet:
      return std::make_unique<MeanderingJetField>(cfg.jet, window);
    case FieldConfig::Kind::Uniform:
      return std::make_unique<UniformField>(cfg.uniform_current, window);
    case FieldConfig::Kind::ShearBand:
      return std::make_unique<ShearBandField>(cfg.band_amplitude, cfg.band_width, window);
  }
  throw ConfigError("unknown field kind");
}

void validate_config(const RunConfig& cfg) {
  if (!cfg.region.valid()) throw ConfigError("graph region is empty");
  if (!(cfg.grid_size > 0)) throw ConfigError("grid_size must be positive");
  if (cfg.sectors < 1 || cfg.sectors > 3) throw ConfigError("sectors must be 1..3");
  if (!(cfg.v_veh_bf > 0)) throw ConfigError("v_veh_bf must be positive");
  if (!(cfg.field.window_end >= cfg.field.window_start)) throw ConfigError("field window is inverted");
  if (cfg.field.kind == FieldConfig::Kind::ShearBand && !(cfg.field.band_width > 0)) {
    throw ConfigError("shear band width must be positive");
  }
  try {
    CostContext probe;
    UniformField nil({0, 0});
    probe.field = &nil;
    probe.v_veh_bf = cfg.v_veh_bf;
    probe.integration = cfg.integration;
    probe.validate();
    cfg.opt_course.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.region.contains(cfg.start)) throw ConfigError("mission start lies outside the region");
  if (!cfg.region.contains(cfg.goal)) throw ConfigError("mission goal lies outside the region");
  if (!(cfg.dphi_max_deg > 0)) throw ConfigError("dphi_max_deg must be positive");
  if (!(cfg.phi_max_deg > 0)) throw ConfigError("phi_max_deg must be positive");
  if (!(cfg.v_min >= 0)) throw ConfigError("v_min must be >= 0");
  if (!(cfg.dep_window_end >= cfg.dep_window_start)) throw ConfigError("departure window is inverted");
  if (!(cfg.dep_dt > 0)) throw ConfigError("departure dt must be positive");
  if (!(cfg.dep_tol > 0)) throw ConfigError("departure tol must be positive");
  if (cfg.coarse_grid_size < 0) throw ConfigError("coarse_grid_size must be >= 0");
  if (cfg.coarse_sectors < 0 || cfg.coarse_sectors > 3) throw ConfigError("coarse_sectors must be 0..3");
  if (cfg.output_dir.empty()) throw ConfigError("output dir must not be empty");
}

double resolve_current_bound(const RunConfig& cfg, const FlowField& field) {
  if (cfg.v_current_max >= 0) return cfg.v_current_max;
  // derive a bound over the region and the times a mission could plausibly
  // touch: departure window plus one modulation period of slack
  double t_lo = std::min(cfg.t0, cfg.dep_window_start);
  double t_hi = std::max(cfg.t0, cfg.dep_window_end) + 16.0;
  if (field.window().is_finite()) {
    t_lo = std::max(t_lo, field.window().start());
    t_hi = std::min(std::max(t_hi, t_lo), field.window().end());
  }
  const TimeWindow span{t_lo, std::max(t_hi, t_lo + 1e-6)};
  return max_current_speed(field, cfg.region, span, 121, 81, 33);
}

}  // namespace flowplan
