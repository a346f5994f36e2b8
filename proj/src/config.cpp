#include "holonomy/config.hpp"

#include "holonomy/spectral.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace holonomy {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      return false;
  }
  return true;
}

// One key = value entry with its source line.
struct Entry {
  std::string key, value;
  int line = 0;
  bool used = false;
};

struct RawJob {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

class Errors {
 public:
  void add(int line, const std::string& job, const std::string& msg) {
    std::string prefix = "line " + std::to_string(line) + ": ";
    if (!job.empty()) prefix += "[job " + job + "] ";
    items_.emplace_back(line, prefix + msg);
  }
  bool empty() const { return items_.empty(); }
  std::size_t count() const { return items_.size(); }
  std::string render() const {
    auto sorted = items_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = "config has " + std::to_string(sorted.size()) + " error(s):";
    for (const auto& [line, msg] : sorted) out += "\n  " + msg;
    return out;
  }

 private:
  std::vector<std::pair<int, std::string>> items_;
};

// Typed access to one job's entries; take() marks keys consumed so anything
// left over is reported as unknown for the job's kind.
class Keys {
 public:
  Keys(RawJob& job, Errors& errors) : job_(job), errors_(errors) {}

  Entry* find(std::string_view key) {
    for (auto& e : job_.entries)
      if (e.key == key) return &e;
    return nullptr;
  }

  std::optional<std::string> take(std::string_view key) {
    Entry* e = find(key);
    if (!e) return std::nullopt;
    e->used = true;
    last_line_ = e->line;
    return e->value;
  }

  // All entries whose key starts with `prefix.`, in file order.
  std::vector<Entry*> take_prefixed(std::string_view prefix) {
    std::vector<Entry*> out;
    for (auto& e : job_.entries) {
      if (e.key.size() > prefix.size() + 1 && e.key.compare(0, prefix.size(), prefix) == 0 &&
          e.key[prefix.size()] == '.') {
        e.used = true;
        out.push_back(&e);
      }
    }
    return out;
  }

  int line_of(std::string_view key) {
    Entry* e = find(key);
    return e ? e->line : job_.line;
  }
  int last_line() const { return last_line_; }
  int header_line() const { return job_.line; }

  void error(int line, const std::string& msg) { errors_.add(line, job_.name, msg); }
  void error_here(const std::string& msg) { errors_.add(last_line_, job_.name, msg); }

  double take_double(std::string_view key, double fallback, bool* present = nullptr) {
    auto v = take(key);
    if (present) *present = v.has_value();
    if (!v) return fallback;
    return parse_double(*v, fallback);
  }

  double parse_double(const std::string& text, double fallback) {
    errno = 0;
    char* end = nullptr;
    double d = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) {
      error_here("'" + text + "' is not a finite number");
      return fallback;
    }
    return d;
  }

  long long take_integer(std::string_view key, long long fallback, long long lo, long long hi,
                         bool* present = nullptr) {
    auto v = take(key);
    if (present) *present = v.has_value();
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    long long n = std::strtoll(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
      error_here("'" + *v + "' is not an integer");
      return fallback;
    }
    if (n < lo || n > hi) {
      error_here(std::string(key) + " = " + *v + " is outside the allowed range [" +
                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return fallback;
    }
    return n;
  }

  std::uint64_t take_u64(std::string_view key, std::uint64_t fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (!v->empty() && (*v)[0] == '-') {
      error_here(std::string(key) + " must be non-negative");
      return fallback;
    }
    errno = 0;
    char* end = nullptr;
    unsigned long long n = std::strtoull(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
      error_here("'" + *v + "' is not an unsigned integer");
      return fallback;
    }
    return n;
  }

  bool take_bool(std::string_view key, bool fallback, bool* present = nullptr) {
    auto v = take(key);
    if (present) *present = v.has_value();
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    error_here(std::string(key) + " must be 'true' or 'false', got '" + *v + "'");
    return fallback;
  }

  std::string take_choice(std::string_view key, std::string fallback,
                          std::initializer_list<const char*> allowed) {
    auto v = take(key);
    if (!v) return fallback;
    for (const char* a : allowed)
      if (*v == a) return *v;
    std::string list;
    for (const char* a : allowed) {
      if (!list.empty()) list += ", ";
      list += a;
    }
    error_here(std::string(key) + " must be one of {" + list + "}, got '" + *v + "'");
    return fallback;
  }

  void report_unused(std::string_view kind_name) {
    for (const auto& e : job_.entries) {
      if (!e.used)
        errors_.add(e.line, job_.name,
                    "unknown key '" + e.key + "' for kind '" + std::string(kind_name) + "'");
    }
  }

 private:
  RawJob& job_;
  Errors& errors_;
  int last_line_ = 0;
};

std::optional<JobKind> kind_from_name(std::string_view s) {
  if (s == "connection") return JobKind::connection;
  if (s == "holonomy") return JobKind::holonomy;
  if (s == "evolve") return JobKind::evolve;
  if (s == "anyon") return JobKind::anyon;
  if (s == "gates") return JobKind::gates;
  if (s == "landau") return JobKind::landau;
  return std::nullopt;
}

// "name:value, name:value" -> ParameterPoint; reports through keys on failure.
std::optional<ParameterPoint> parse_point_list(Keys& keys, const std::string& text) {
  ParameterPoint p;
  for (const std::string& tok : split(text, ',')) {
    if (tok.empty()) {
      keys.error_here("empty coordinate in '" + text + "'");
      return std::nullopt;
    }
    auto colon = tok.find(':');
    if (colon == std::string::npos) {
      keys.error_here("coordinate '" + tok + "' is not of the form name:value");
      return std::nullopt;
    }
    std::string name = trim(tok.substr(0, colon));
    double value = keys.parse_double(trim(tok.substr(colon + 1)), 0.0);
    try {
      p.set(name, value);
    } catch (const InvalidInput& e) {
      keys.error_here(e.what());
      return std::nullopt;
    }
  }
  return p;
}

double period_for(const std::vector<std::pair<std::string, double>>& periods,
                  const std::string& name) {
  for (const auto& [n, p] : periods)
    if (n == name) return p;
  return 0.0;
}

bool coords_close(double a, double b, double period) {
  double d = period > 0.0 ? std::remainder(a - b, period) : a - b;
  return std::abs(d) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

void parse_loop(Keys& keys, JobConfig& cfg) {
  auto kind = keys.take("loop");
  if (!kind) return;  // leaves cfg.loop.kind == "none"
  LoopSpec& loop = cfg.loop;
  if (*kind == "sweep") {
    loop.kind = "sweep";
    if (auto p = keys.take("loop_param"); p)
      loop.param = *p;
    else
      keys.error(keys.line_of("loop"), "loop = sweep requires loop_param");
    loop.from = keys.take_double("loop_from", 0.0);
    loop.to = keys.take_double("loop_to", 0.0);
    loop.period = keys.take_double("loop_period", 0.0);
    if (loop.period < 0.0) keys.error(keys.line_of("loop_period"), "loop_period must be >= 0");
    if (loop.to == loop.from) keys.error(keys.line_of("loop_to"), "sweep has zero extent");
  } else if (*kind == "rectangle") {
    loop.kind = "rectangle";
    auto p1 = keys.take("loop_param1"), p2 = keys.take("loop_param2");
    if (!p1 || !p2)
      keys.error(keys.line_of("loop"), "loop = rectangle requires loop_param1 and loop_param2");
    loop.param1 = p1.value_or("");
    loop.param2 = p2.value_or("");
    if (!loop.param1.empty() && loop.param1 == loop.param2)
      keys.error(keys.line_of("loop_param2"), "rectangle legs must use two distinct parameters");
    loop.a1 = keys.take_double("loop_a1", 0.0);
    loop.b1 = keys.take_double("loop_b1", 0.0);
    loop.a2 = keys.take_double("loop_a2", 0.0);
    loop.b2 = keys.take_double("loop_b2", 0.0);
    if (loop.a1 == loop.b1 || loop.a2 == loop.b2)
      keys.error(keys.line_of("loop"), "rectangle has a zero-length side");
  } else if (*kind == "circle") {
    loop.kind = "circle";
    auto p1 = keys.take("loop_param1"), p2 = keys.take("loop_param2");
    if (!p1 || !p2)
      keys.error(keys.line_of("loop"), "loop = circle requires loop_param1 and loop_param2");
    loop.param1 = p1.value_or("");
    loop.param2 = p2.value_or("");
    if (!loop.param1.empty() && loop.param1 == loop.param2)
      keys.error(keys.line_of("loop_param2"), "circle axes must use two distinct parameters");
    loop.center1 = keys.take_double("loop_center1", 0.0);
    loop.center2 = keys.take_double("loop_center2", 0.0);
    loop.radius = keys.take_double("loop_radius", 0.0);
    if (loop.radius <= 0.0) keys.error(keys.line_of("loop_radius"), "loop_radius must be > 0");
  } else if (*kind == "waypoints") {
    loop.kind = "waypoints";
    if (auto per = keys.take("periods"); per) {
      for (const std::string& tok : split(*per, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) {
          keys.error_here("period '" + tok + "' is not of the form name:value");
          continue;
        }
        double p = keys.parse_double(trim(tok.substr(colon + 1)), 0.0);
        if (p <= 0.0) keys.error_here("period for '" + trim(tok.substr(0, colon)) + "' must be > 0");
        loop.periods.emplace_back(trim(tok.substr(0, colon)), p);
      }
    }
    loop.closed = keys.take_bool("closed", true);
    auto wp = keys.take("waypoints");
    if (!wp) {
      keys.error(keys.line_of("loop"), "loop = waypoints requires a waypoints list");
      return;
    }
    int wp_line = keys.last_line();
    for (const std::string& point_text : split(*wp, ';')) {
      auto p = parse_point_list(keys, point_text);
      if (!p) return;
      loop.waypoints.push_back(*p);
    }
    if (loop.waypoints.size() < 2) {
      keys.error(wp_line, "waypoints needs at least two points");
      return;
    }
    const auto names0 = loop.waypoints.front().names();
    for (std::size_t i = 1; i < loop.waypoints.size(); ++i) {
      if (loop.waypoints[i].names() != names0) {
        keys.error(wp_line, "waypoint " + std::to_string(i) +
                                " names different coordinates than waypoint 0");
        return;
      }
    }
    if (loop.closed) {
      const ParameterPoint& first = loop.waypoints.front();
      const ParameterPoint& last = loop.waypoints.back();
      for (const auto& [name, v0] : first.coords()) {
        if (!coords_close(last.value(name), v0, period_for(loop.periods, name))) {
          keys.error(wp_line, "closed = true but waypoint " +
                                  std::to_string(loop.waypoints.size() - 1) +
                                  " does not return to waypoint 0 (" + name + ": " +
                                  format_double(last.value(name)) + " vs " + format_double(v0) +
                                  ")");
          break;
        }
      }
    }
  } else {
    keys.error(keys.line_of("loop"),
               "loop must be one of {sweep, rectangle, circle, waypoints}, got '" + *kind + "'");
    return;
  }
  long long seg = keys.take_integer("segments", 0, 1, 100000000);
  loop.segments = static_cast<std::size_t>(seg);
}

// Params the loop varies; they must belong to the job's coordinate schema.
std::vector<std::string> loop_params(const LoopSpec& loop) {
  if (loop.kind == "sweep") return {loop.param};
  if (loop.kind == "rectangle" || loop.kind == "circle") return {loop.param1, loop.param2};
  return {};
}

// Check the base point carries exactly `schema` (order-insensitive).
void check_point_schema(Keys& keys, const ParameterPoint& base,
                        const std::vector<std::string>& schema, const std::string& owner) {
  for (const std::string& name : schema) {
    if (!base.has(name))
      keys.error(keys.header_line(), "point." + name + " missing (required by " + owner + ")");
  }
  for (const auto& [name, value] : base.coords()) {
    (void)value;
    if (std::find(schema.begin(), schema.end(), name) == schema.end())
      keys.error(keys.header_line(), "point." + name + " is not a parameter of " + owner);
  }
}

void parse_family_block(Keys& keys, JobConfig& cfg, bool system_required) {
  bool have_system = false;
  if (auto sys = keys.take("system"); sys) {
    cfg.system = *sys;
    have_system = true;
  } else if (system_required) {
    keys.error(keys.header_line(), "missing required key 'system'");
  }
  for (Entry* e : keys.take_prefixed("constant")) {
    Keys* k = &keys;
    double v = [&] {
      errno = 0;
      char* end = nullptr;
      double d = std::strtod(e->value.c_str(), &end);
      if (end == e->value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) {
        k->error(e->line, "'" + e->value + "' is not a finite number");
        return 0.0;
      }
      return d;
    }();
    cfg.constants.emplace_back(e->key.substr(std::strlen("constant.")), v);
  }
  for (Entry* e : keys.take_prefixed("point")) {
    errno = 0;
    char* end = nullptr;
    double d = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) {
      keys.error(e->line, "'" + e->value + "' is not a finite number");
      continue;
    }
    try {
      cfg.base.set(e->key.substr(std::strlen("point.")), d);
    } catch (const InvalidInput& err) {
      keys.error(e->line, err.what());
    }
  }
  if (have_system) {
    try {
      HamiltonianFamily family = make_family(cfg.system, cfg.constants);
      std::vector<std::string> schema;
      for (const auto& spec : family.schema) schema.push_back(spec.name);
      check_point_schema(keys, cfg.base, schema, "system " + cfg.system);
      for (const std::string& p : loop_params(cfg.loop)) {
        if (!family.has_param(p))
          keys.error(keys.header_line(),
                     "loop parameter '" + p + "' is not a parameter of system " + cfg.system);
      }
    } catch (const InvalidInput& e) {
      keys.error(keys.line_of("system"), e.what());
    }
  }
}

void parse_frame_or_section(Keys& keys, JobConfig& cfg) {
  if (auto f = keys.take("frame"); f) {
    cfg.frame = *f;
    try {
      (void)find_frame(cfg.frame);
    } catch (const InvalidInput& e) {
      keys.error_here(e.what());
      cfg.frame.clear();
    }
  }
  if (auto s = keys.take("section"); s) {
    cfg.section = *s;
    try {
      (void)find_section(cfg.section);
    } catch (const InvalidInput& e) {
      keys.error_here(e.what());
      cfg.section.clear();
    }
  }
  if (!cfg.frame.empty() && !cfg.section.empty())
    keys.error(keys.header_line(), "give either 'frame' or 'section', not both");
}

void parse_numeric_knobs(Keys& keys, JobConfig& cfg) {
  cfg.gradient =
      keys.take_choice("gradient", cfg.gradient, {"automatic", "analytic", "finite_difference"});
  cfg.h = keys.take_double("h", cfg.h);
  if (cfg.h <= 0.0 || cfg.h > 0.1)
    keys.error(keys.line_of("h"), "h must lie in (0, 0.1]");
  cfg.tau_deg = keys.take_double("tau_deg", cfg.tau_deg);
  if (cfg.tau_deg <= 0.0 || cfg.tau_deg > 1e-2)
    keys.error(keys.line_of("tau_deg"), "tau_deg must lie in (0, 1e-2]");
  cfg.tau_overlap = keys.take_double("tau_overlap", cfg.tau_overlap);
  if (cfg.tau_overlap <= 0.0 || cfg.tau_overlap >= 1.0)
    keys.error(keys.line_of("tau_overlap"), "tau_overlap must lie in (0, 1)");
}

void validate_selector(Keys& keys, const std::string& text) {
  try {
    (void)parse_selector(text);
  } catch (const InvalidInput& e) {
    keys.error(keys.line_of("selector"), e.what());
  }
}

void parse_connection_job(Keys& keys, JobConfig& cfg) {
  parse_frame_or_section(keys, cfg);
  parse_family_block(keys, cfg, /*system_required=*/false);
  parse_numeric_knobs(keys, cfg);
  cfg.g = keys.take_double("g", cfg.g);
  if (cfg.g == 0.0) keys.error(keys.line_of("g"), "g must be nonzero");
  auto dirs = keys.take("direction");
  int dirs_line = keys.last_line();
  auto curve = keys.take("curvature");
  int curve_line = keys.last_line();
  if (cfg.frame.empty() && cfg.section.empty()) {
    keys.error(keys.header_line(), "connection jobs need a 'frame' or a 'section'");
    return;
  }
  const std::vector<std::string>& params =
      cfg.frame.empty() ? find_section(cfg.section).params : find_frame(cfg.frame).params;
  if (cfg.system.empty())
    check_point_schema(keys, cfg.base, params,
                       cfg.frame.empty() ? "section " + cfg.section : "frame " + cfg.frame);
  if (dirs) {
    for (const std::string& d : split(*dirs, ',')) {
      if (std::find(params.begin(), params.end(), d) == params.end())
        keys.error(dirs_line, "direction '" + d + "' is not a parameter of this frame/section");
      cfg.directions.push_back(d);
    }
  }
  if (curve) {
    auto parts = split(*curve, ',');
    if (parts.size() != 2) {
      keys.error(curve_line, "curvature needs exactly two directions, e.g. 'theta3,theta4'");
    } else {
      for (const std::string& d : parts)
        if (std::find(params.begin(), params.end(), d) == params.end())
          keys.error(curve_line,
                     "curvature direction '" + d + "' is not a parameter of this frame/section");
      cfg.curvature_mu = parts[0];
      cfg.curvature_nu = parts[1];
    }
  }
}

void parse_holonomy_job(Keys& keys, JobConfig& cfg) {
  parse_loop(keys, cfg);
  parse_frame_or_section(keys, cfg);
  cfg.method = keys.take_choice("method", cfg.method, {"transport", "ordered_exp", "both"});
  cfg.sign = keys.take_choice("sign", cfg.sign, {"minus_i", "plus_i"});
  cfg.g = keys.take_double("g", cfg.g);
  if (auto sel = keys.take("selector"); sel) {
    cfg.selector = *sel;
    validate_selector(keys, cfg.selector);
  }
  const bool needs_field = cfg.method != "transport";
  const bool needs_family = cfg.method != "ordered_exp";
  if (needs_field && cfg.frame.empty() && cfg.section.empty())
    keys.error(keys.header_line(),
               "method = " + cfg.method + " needs a 'frame' or 'section' to sample the connection");
  if (needs_field && cfg.g == 0.0)
    keys.error(keys.line_of("g"), "g must be nonzero for ordered exponentials");
  parse_family_block(keys, cfg, /*system_required=*/needs_family);
  parse_numeric_knobs(keys, cfg);

  if (cfg.loop.kind == "none") {
    keys.error(keys.header_line(), "holonomy jobs need a loop");
    return;
  }
  if (cfg.system.empty() && !needs_family && !(cfg.frame.empty() && cfg.section.empty())) {
    const std::vector<std::string>& params =
        cfg.frame.empty() ? find_section(cfg.section).params : find_frame(cfg.frame).params;
    check_point_schema(keys, cfg.base, params,
                       cfg.frame.empty() ? "section " + cfg.section : "frame " + cfg.frame);
    for (const std::string& p : loop_params(cfg.loop)) {
      if (std::find(params.begin(), params.end(), p) == params.end())
        keys.error(keys.header_line(), "loop parameter '" + p + "' is not a frame/section parameter");
    }
  }
  // holonomy is only defined on closed loops
  if (cfg.loop.kind == "sweep") {
    double span = cfg.loop.to - cfg.loop.from;
    bool closes = cfg.loop.period > 0.0 &&
                  std::abs(std::remainder(span, cfg.loop.period)) <=
                      1e-9 * std::max(1.0, std::abs(span));
    if (!closes)
      keys.error(keys.line_of("loop"),
                 "holonomy sweep must close: set loop_period and sweep a whole number of periods");
  } else if (cfg.loop.kind == "waypoints" && !cfg.loop.closed) {
    keys.error(keys.line_of("closed"), "holonomy loops must have closed = true");
  }
}

void parse_evolve_job(Keys& keys, JobConfig& cfg) {
  parse_family_block(keys, cfg, /*system_required=*/true);
  if (!cfg.system.empty() && cfg.system != "two_level")
    keys.error(keys.line_of("system"),
               "evolve drives the two_level family; system must be 'two_level'");
  cfg.t_final = keys.take_double("t_final", 0.0);
  if (cfg.t_final <= 0.0) keys.error(keys.line_of("t_final"), "t_final must be > 0");
  cfg.steps = static_cast<std::size_t>(keys.take_integer("steps", 0, 1, 100000000));
  cfg.turns = keys.take_double("turns", 1.0);
  if (cfg.turns <= 0.0 || cfg.turns != std::floor(cfg.turns))
    keys.error(keys.line_of("turns"), "turns must be a positive whole number of loops");
  parse_numeric_knobs(keys, cfg);
}

void parse_anyon_job(Keys& keys, JobConfig& cfg) {
  cfg.mode = keys.take_choice("mode", cfg.mode, {"uniform", "estimated"});
  cfg.l0 = keys.take_double("l0", cfg.l0);
  if (cfg.l0 <= 0.0) keys.error(keys.line_of("l0"), "l0 must be > 0");
  cfg.loop_radius = keys.take_double("loop_radius", cfg.loop_radius);
  if (cfg.loop_radius < 0.0) keys.error(keys.line_of("loop_radius"), "loop_radius must be >= 0");
  if (cfg.mode == "uniform") {
    cfg.filling = keys.take_double("filling", cfg.filling);
    if (!(cfg.filling > 0.0 && cfg.filling <= 1.0))
      keys.error(keys.line_of("filling"), "filling must lie in (0, 1]");
    cfg.flux_ratio = keys.take_double("flux_ratio", cfg.flux_ratio);
    if (cfg.flux_ratio < 0.0) keys.error(keys.line_of("flux_ratio"), "flux_ratio must be >= 0");
    if ((cfg.flux_ratio > 0.0) == (cfg.loop_radius > 0.0))
      keys.error(keys.header_line(),
                 "uniform mode needs exactly one of loop_radius or flux_ratio");
  } else {
    cfg.n_electrons = static_cast<int>(keys.take_integer("n_electrons", 0, 1, 10000));
    if (cfg.n_electrons == 0) keys.error(keys.header_line(), "missing required key 'n_electrons'");
    cfg.exponent = static_cast<int>(keys.take_integer("exponent", cfg.exponent, 1, 99));
    cfg.samples = static_cast<std::size_t>(keys.take_integer("samples", 0, 1000, 1000000000));
    if (cfg.samples == 0) keys.error(keys.header_line(), "missing required key 'samples'");
    cfg.burn_in = static_cast<std::size_t>(keys.take_integer("burn_in", 0, 0, 1000000000));
    cfg.seed = keys.take_u64("seed", cfg.seed);
    cfg.proposal_step = keys.take_double("proposal_step", cfg.proposal_step);
    if (cfg.proposal_step < 0.0)
      keys.error(keys.line_of("proposal_step"), "proposal_step must be >= 0 (0 = auto)");
    if (cfg.loop_radius == 0.0)
      keys.error(keys.header_line(), "estimated mode needs loop_radius > 0");
    cfg.r_max = keys.take_double("r_max", cfg.r_max);
    if (cfg.r_max < 0.0) keys.error(keys.line_of("r_max"), "r_max must be >= 0 (0 = auto)");
    cfg.bins = static_cast<std::size_t>(keys.take_integer("bins", 0, 0, 100000));
    cfg.blocks = static_cast<std::size_t>(keys.take_integer("blocks", cfg.blocks, 2, 4096));
    cfg.bulk_lo = keys.take_double("bulk_lo", cfg.bulk_lo);
    cfg.bulk_hi = keys.take_double("bulk_hi", cfg.bulk_hi);
    if (cfg.bulk_lo < 0.0 || cfg.bulk_hi < cfg.bulk_lo)
      keys.error(keys.line_of("bulk_hi"), "bulk window needs 0 <= bulk_lo <= bulk_hi");
    bool have_x = false, have_y = false;
    double hx = keys.take_double("hole_x", 0.0, &have_x);
    double hy = keys.take_double("hole_y", 0.0, &have_y);
    if (have_x != have_y)
      keys.error(keys.header_line(), "hole needs both hole_x and hole_y");
    else if (have_x)
      cfg.hole = std::make_pair(hx, hy);
  }
}

void parse_gates_job(Keys& keys, JobConfig& cfg) {
  cfg.phi = keys.take_double("phi", cfg.phi);
}

void parse_landau_job(Keys& keys, JobConfig& cfg) {
  cfg.l0 = keys.take_double("l0", cfg.l0);
  if (cfg.l0 <= 0.0) keys.error(keys.line_of("l0"), "l0 must be > 0");
  cfg.b_field = keys.take_double("b_field", cfg.b_field);
  if (cfg.b_field <= 0.0) keys.error(keys.line_of("b_field"), "b_field must be > 0");
  cfg.n_electrons = static_cast<int>(keys.take_integer("n_electrons", 0, 1, 100000000));
  if (cfg.n_electrons == 0) keys.error(keys.header_line(), "missing required key 'n_electrons'");
  cfg.area = keys.take_double("area", cfg.area);
  if (cfg.area < 0.0) keys.error(keys.line_of("area"), "area must be >= 0 (0 = droplet area)");
  cfg.exponent = static_cast<int>(keys.take_integer("exponent", cfg.exponent, 1, 99));
  if (cfg.area == 0.0 && cfg.exponent == 0)
    keys.error(keys.header_line(), "give area or a Laughlin exponent for the droplet area");
}

}  // namespace

std::string_view job_kind_name(JobKind kind) {
  switch (kind) {
    case JobKind::connection: return "connection";
    case JobKind::holonomy: return "holonomy";
    case JobKind::evolve: return "evolve";
    case JobKind::anyon: return "anyon";
    case JobKind::gates: return "gates";
    case JobKind::landau: return "landau";
  }
  return "unknown";
}

bool LoopSpec::operator==(const LoopSpec& o) const {
  return kind == o.kind && param == o.param && from == o.from && to == o.to &&
         period == o.period && param1 == o.param1 && param2 == o.param2 && a1 == o.a1 &&
         b1 == o.b1 && a2 == o.a2 && b2 == o.b2 && center1 == o.center1 &&
         center2 == o.center2 && radius == o.radius && waypoints == o.waypoints &&
         closed == o.closed && periods == o.periods && segments == o.segments;
}

bool JobConfig::operator==(const JobConfig& o) const {
  return name == o.name && kind == o.kind && system == o.system && constants == o.constants &&
         base == o.base && loop == o.loop && frame == o.frame && section == o.section &&
         selector == o.selector && method == o.method && sign == o.sign && g == o.g &&
         gradient == o.gradient && h == o.h && tau_deg == o.tau_deg &&
         tau_overlap == o.tau_overlap && steps == o.steps && seed == o.seed &&
         directions == o.directions && curvature_mu == o.curvature_mu &&
         curvature_nu == o.curvature_nu && t_final == o.t_final && turns == o.turns &&
         mode == o.mode && filling == o.filling && flux_ratio == o.flux_ratio &&
         loop_radius == o.loop_radius && l0 == o.l0 && n_electrons == o.n_electrons &&
         exponent == o.exponent && samples == o.samples && burn_in == o.burn_in &&
         bins == o.bins && blocks == o.blocks && r_max == o.r_max && bulk_lo == o.bulk_lo &&
         bulk_hi == o.bulk_hi && proposal_step == o.proposal_step && hole == o.hole &&
         phi == o.phi && area == o.area && b_field == o.b_field;
}

SubspaceSelector parse_selector(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string head;
  in >> head;
  if (head == "lowest" || head == "kernel") {
    std::string rest;
    if (in >> rest) throw InvalidInput("trailing text in selector '" + std::string(text) + "'");
    return head == "lowest" ? SubspaceSelector::lowest() : SubspaceSelector::kernel();
  }
  if (head == "index") {
    long lo = 0, hi = 0;
    if (!(in >> lo >> hi) || lo < 0 || hi < lo)
      throw InvalidInput("selector 'index' needs two indices 0 <= LO <= HI, got '" +
                         std::string(text) + "'");
    std::string rest;
    if (in >> rest) throw InvalidInput("trailing text in selector '" + std::string(text) + "'");
    return SubspaceSelector::index_range(static_cast<int>(lo), static_cast<int>(hi));
  }
  if (head == "window") {
    double lo = 0, hi = 0;
    if (!(in >> lo >> hi) || !(lo < hi))
      throw InvalidInput("selector 'window' needs two energies LO < HI, got '" +
                         std::string(text) + "'");
    std::string rest;
    if (in >> rest) throw InvalidInput("trailing text in selector '" + std::string(text) + "'");
    return SubspaceSelector::energy_window(lo, hi);
  }
  throw InvalidInput("selector must be 'lowest', 'kernel', 'index LO HI' or 'window LO HI', got '" +
                     std::string(text) + "'");
}

std::vector<JobConfig> parse_config(std::string_view text) {
  Errors errors;
  std::vector<RawJob> raw;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') {
      if (pos > text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.add(line_no, "", "unterminated section header '" + line + "'");
      } else {
        std::string inner = trim(line.substr(1, line.size() - 2));
        if (inner.rfind("job", 0) != 0 || (inner.size() > 3 && !std::isspace(static_cast<unsigned char>(inner[3])))) {
          errors.add(line_no, "", "section must look like [job NAME], got '" + line + "'");
        } else {
          std::string name = trim(inner.substr(3));
          if (!valid_name(name)) {
            errors.add(line_no, "",
                       "job name '" + name + "' must be non-empty [A-Za-z0-9_.-] text");
          } else {
            for (const RawJob& j : raw)
              if (j.name == name)
                errors.add(line_no, "", "duplicate job name '" + name + "' (first at line " +
                                            std::to_string(j.line) + ")");
            raw.push_back(RawJob{name, line_no, {}});
          }
        }
      }
    } else {
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors.add(line_no, raw.empty() ? "" : raw.back().name,
                   "expected 'key = value', got '" + line + "'");
      } else if (raw.empty()) {
        errors.add(line_no, "", "key outside any [job NAME] section");
      } else {
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
          errors.add(line_no, raw.back().name, "empty key");
        } else {
          for (const Entry& e : raw.back().entries)
            if (e.key == key)
              errors.add(line_no, raw.back().name,
                         "duplicate key '" + key + "' (first at line " + std::to_string(e.line) +
                             ")");
          raw.back().entries.push_back(Entry{key, value, line_no, false});
        }
      }
    }
    if (pos > text.size()) break;
  }

  std::vector<JobConfig> jobs;
  for (RawJob& rj : raw) {
    Keys keys(rj, errors);
    JobConfig cfg;
    cfg.name = rj.name;
    auto kind_text = keys.take("kind");
    if (!kind_text) {
      errors.add(rj.line, rj.name, "missing required key 'kind'");
      continue;
    }
    auto kind = kind_from_name(*kind_text);
    if (!kind) {
      errors.add(keys.last_line(), rj.name,
                 "kind must be one of {connection, holonomy, evolve, anyon, gates, landau}, got '" +
                     *kind_text + "'");
      continue;
    }
    cfg.kind = *kind;
    std::size_t before = errors.count();
    switch (cfg.kind) {
      case JobKind::connection: parse_connection_job(keys, cfg); break;
      case JobKind::holonomy: parse_holonomy_job(keys, cfg); break;
      case JobKind::evolve: parse_evolve_job(keys, cfg); break;
      case JobKind::anyon: parse_anyon_job(keys, cfg); break;
      case JobKind::gates: parse_gates_job(keys, cfg); break;
      case JobKind::landau: parse_landau_job(keys, cfg); break;
    }
    keys.report_unused(job_kind_name(cfg.kind));
    if (errors.count() == before) jobs.push_back(std::move(cfg));
  }
  if (!errors.empty()) throw InvalidInput(errors.render());
  return jobs;
}

namespace {

class Writer {
 public:
  void section(const std::string& name) { out_ += "[job " + name + "]\n"; }
  void kv(std::string_view key, const std::string& value) {
    out_ += std::string(key) + " = " + value + "\n";
  }
  void kv(std::string_view key, double value) { kv(key, format_double(value)); }
  void kv(std::string_view key, std::size_t value) { kv(key, std::to_string(value)); }
  void kv(std::string_view key, bool value) { kv(key, std::string(value ? "true" : "false")); }
  void blank() { out_ += "\n"; }
  std::string str() && { return std::move(out_); }

 private:
  std::string out_;
};

void emit_loop(Writer& w, const LoopSpec& loop) {
  if (loop.kind == "none") return;
  w.kv("loop", loop.kind);
  if (loop.kind == "sweep") {
    w.kv("loop_param", loop.param);
    w.kv("loop_from", loop.from);
    w.kv("loop_to", loop.to);
    if (loop.period != 0.0) w.kv("loop_period", loop.period);
  } else if (loop.kind == "rectangle") {
    w.kv("loop_param1", loop.param1);
    w.kv("loop_a1", loop.a1);
    w.kv("loop_b1", loop.b1);
    w.kv("loop_param2", loop.param2);
    w.kv("loop_a2", loop.a2);
    w.kv("loop_b2", loop.b2);
  } else if (loop.kind == "circle") {
    w.kv("loop_param1", loop.param1);
    w.kv("loop_param2", loop.param2);
    w.kv("loop_center1", loop.center1);
    w.kv("loop_center2", loop.center2);
    w.kv("loop_radius", loop.radius);
  } else if (loop.kind == "waypoints") {
    std::string wp;
    for (const ParameterPoint& p : loop.waypoints) {
      if (!wp.empty()) wp += "; ";
      std::string coords;
      for (const auto& [name, value] : p.coords()) {
        if (!coords.empty()) coords += ",";
        coords += name + ":" + format_double(value);
      }
      wp += coords;
    }
    w.kv("waypoints", wp);
    w.kv("closed", loop.closed);
    if (!loop.periods.empty()) {
      std::string per;
      for (const auto& [name, p] : loop.periods) {
        if (!per.empty()) per += ",";
        per += name + ":" + format_double(p);
      }
      w.kv("periods", per);
    }
  }
  if (loop.segments != 0) w.kv("segments", loop.segments);
}

void emit_family(Writer& w, const JobConfig& c) {
  if (!c.system.empty()) w.kv("system", c.system);
  for (const auto& [name, value] : c.constants) w.kv("constant." + name, value);
  for (const auto& [name, value] : c.base.coords()) w.kv("point." + name, value);
}

void emit_knobs(Writer& w, const JobConfig& c) {
  w.kv("gradient", c.gradient);
  w.kv("h", c.h);
  w.kv("tau_deg", c.tau_deg);
  w.kv("tau_overlap", c.tau_overlap);
}

}  // namespace

std::string emit_config(const JobConfig& c) {
  Writer w;
  w.section(c.name);
  w.kv("kind", std::string(job_kind_name(c.kind)));
  switch (c.kind) {
    case JobKind::connection: {
      if (!c.frame.empty()) w.kv("frame", c.frame);
      if (!c.section.empty()) w.kv("section", c.section);
      emit_family(w, c);
      emit_loop(w, c.loop);
      if (!c.directions.empty()) {
        std::string d;
        for (const std::string& dir : c.directions) {
          if (!d.empty()) d += ",";
          d += dir;
        }
        w.kv("direction", d);
      }
      if (!c.curvature_mu.empty()) w.kv("curvature", c.curvature_mu + "," + c.curvature_nu);
      w.kv("g", c.g);
      emit_knobs(w, c);
      break;
    }
    case JobKind::holonomy: {
      emit_family(w, c);
      emit_loop(w, c.loop);
      if (!c.frame.empty()) w.kv("frame", c.frame);
      if (!c.section.empty()) w.kv("section", c.section);
      w.kv("selector", c.selector);
      w.kv("method", c.method);
      w.kv("sign", c.sign);
      w.kv("g", c.g);
      emit_knobs(w, c);
      break;
    }
    case JobKind::evolve: {
      emit_family(w, c);
      w.kv("t_final", c.t_final);
      if (c.steps != 0) w.kv("steps", c.steps);
      w.kv("turns", c.turns);
      emit_knobs(w, c);
      break;
    }
    case JobKind::anyon: {
      w.kv("mode", c.mode);
      w.kv("l0", c.l0);
      if (c.mode == "uniform") {
        w.kv("filling", c.filling);
        if (c.loop_radius != 0.0) w.kv("loop_radius", c.loop_radius);
        if (c.flux_ratio != 0.0) w.kv("flux_ratio", c.flux_ratio);
      } else {
        w.kv("n_electrons", static_cast<std::size_t>(c.n_electrons));
        w.kv("exponent", static_cast<std::size_t>(c.exponent));
        w.kv("samples", c.samples);
        if (c.burn_in != 0) w.kv("burn_in", c.burn_in);
        w.kv("seed", std::to_string(c.seed));
        if (c.proposal_step != 0.0) w.kv("proposal_step", c.proposal_step);
        w.kv("loop_radius", c.loop_radius);
        if (c.r_max != 0.0) w.kv("r_max", c.r_max);
        if (c.bins != 0) w.kv("bins", c.bins);
        w.kv("blocks", c.blocks);
        if (c.bulk_lo != 0.0) w.kv("bulk_lo", c.bulk_lo);
        if (c.bulk_hi != 0.0) w.kv("bulk_hi", c.bulk_hi);
        if (c.hole) {
          w.kv("hole_x", c.hole->first);
          w.kv("hole_y", c.hole->second);
        }
      }
      break;
    }
    case JobKind::gates: {
      w.kv("phi", c.phi);
      break;
    }
    case JobKind::landau: {
      w.kv("l0", c.l0);
      w.kv("b_field", c.b_field);
      w.kv("n_electrons", static_cast<std::size_t>(c.n_electrons));
      w.kv("exponent", static_cast<std::size_t>(c.exponent));
      if (c.area != 0.0) w.kv("area", c.area);
      break;
    }
  }
  return std::move(w).str();
}

std::string emit_config(const std::vector<JobConfig>& jobs) {
  std::string out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (i) out += "\n";
    out += emit_config(jobs[i]);
  }
  return out;
}

const std::vector<FrameCatalogEntry>& frame_catalog() {
  static const std::vector<FrameCatalogEntry> entries = {
      {"dark",
       "zero-energy manifold {D1, D2, D3, D4} of the five-level coupled system, real gauge",
       {"theta3", "theta4"},
       &dark_section},
      {"dark_gate",
       "dark manifold {D1, D2, D3, i*D4}: the gauge whose loop transport lands on the "
       "controlled gate",
       {"theta3", "theta4"},
       &dark_gate_section},
  };
  return entries;
}

const std::vector<SectionCatalogEntry>& section_catalog() {
  static const std::vector<SectionCatalogEntry> entries = {
      {"two_level_lower_real",
       "lower eigenstate (-sin phi/2, cos phi/2): real gauge, sign flip after one turn",
       {"phi"},
       &two_level_lower_real},
      {"two_level_lower_single_valued",
       "lower eigenstate e^{i phi/2} (-sin phi/2, cos phi/2): periodic gauge, A_phi = 1/2",
       {"phi"},
       &two_level_lower_single_valued},
      {"two_level_upper_real",
       "upper eigenstate (cos phi/2, sin phi/2): real gauge",
       {"phi"},
       &two_level_upper_real},
  };
  return entries;
}

const FrameCatalogEntry& find_frame(std::string_view id) {
  for (const auto& e : frame_catalog())
    if (e.id == id) return e;
  std::string list;
  for (const auto& e : frame_catalog()) {
    if (!list.empty()) list += ", ";
    list += e.id;
  }
  throw InvalidInput("unknown frame '" + std::string(id) + "'; registered frames: " + list);
}

const SectionCatalogEntry& find_section(std::string_view id) {
  for (const auto& e : section_catalog())
    if (e.id == id) return e;
  std::string list;
  for (const auto& e : section_catalog()) {
    if (!list.empty()) list += ", ";
    list += e.id;
  }
  throw InvalidInput("unknown section '" + std::string(id) + "'; registered sections: " + list);
}

}  // namespace holonomy
