// Job configuration: a flat, human-writable key-value text format with one
// [job NAME] section per computation. parse_config validates everything it
// can statically (registered systems, schema-complete points, loop closure,
// knob ranges) and reports *all* errors at once, each tagged with its line.
// emit_config writes the canonical form; parse(emit(c)) == c for configs that
// leave kind-irrelevant fields at their defaults (every parsed config does).
#pragma once

#include "holonomy/model.hpp"
#include "holonomy/spectral.hpp"

#include <cstdint>
#include <optional>

namespace holonomy {

enum class JobKind { connection, holonomy, evolve, anyon, gates, landau };

std::string_view job_kind_name(JobKind kind);

// Loop / path request. `kind` is one of "sweep", "rectangle", "circle",
// "waypoints", or "none" (jobs without a path). Only the fields of the active
// kind are meaningful; the rest stay at defaults.
struct LoopSpec {
  std::string kind = "none";
  // sweep: one parameter from -> to, optionally on a circle of given period
  std::string param;
  double from = 0.0, to = 0.0, period = 0.0;
  // rectangle: param1 a1->b1 at a2, param2 a2->b2 at b1, back; closed
  std::string param1, param2;
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  // circle in the (param1, param2) plane
  double center1 = 0.0, center2 = 0.0, radius = 0.0;
  // explicit polyline
  std::vector<ParameterPoint> waypoints;
  bool closed = true;
  std::vector<std::pair<std::string, double>> periods;
  // segments: sweep/circle total, rectangle per leg; 0 = kind default (2000,
  // rectangle 500 per leg)
  std::size_t segments = 0;

  bool operator==(const LoopSpec& o) const;
};

struct JobConfig {
  std::string name;
  JobKind kind = JobKind::holonomy;

  // family-backed jobs (connection / holonomy / evolve)
  std::string system;
  std::vector<std::pair<std::string, double>> constants;
  ParameterPoint base;  // full schema point; loops override coordinates
  LoopSpec loop;

  // frame/section selection (connection, and ordered_exp holonomy)
  std::string frame;    // basis-section id, e.g. "dark", "dark_gate"
  std::string section;  // state-section id, e.g. "two_level_lower_single_valued"

  // holonomy route
  std::string selector = "lowest";  // lowest | kernel | index LO HI | window LO HI
  std::string method = "transport";  // transport | ordered_exp | both
  std::string sign = "minus_i";      // ordered-exponential convention
  double g = 1.0;

  // shared numerical knobs
  std::string gradient = "automatic";  // automatic | analytic | finite_difference
  double h = 1e-6;
  double tau_deg = 1e-8;
  double tau_overlap = 1e-8;
  std::size_t steps = 0;  // evolve integrator steps; 0 = default 50000
  std::uint64_t seed = 1;

  // connection extras
  std::vector<std::string> directions;  // empty = all frame/section params
  std::string curvature_mu, curvature_nu;  // both set -> also report curvature

  // evolve extras (two_level adiabatic drive)
  double t_final = 0.0;
  double turns = 1.0;

  // anyon extras
  std::string mode = "uniform";  // uniform | estimated
  double filling = 0.0;
  double flux_ratio = 0.0;   // alternative to loop_radius: R = l0*sqrt(2*ratio)
  double loop_radius = 0.0;  // quasihole loop radius, units of length
  double l0 = 1.0;
  int n_electrons = 0;
  int exponent = 1;
  std::size_t samples = 0, burn_in = 0, bins = 0, blocks = 32;
  double r_max = 0.0, bulk_lo = 0.0, bulk_hi = 0.0, proposal_step = 0.0;
  std::optional<std::pair<double, double>> hole;

  // gates extras
  double phi = 0.0;

  // landau extras
  double area = 0.0;  // 0 with n_electrons>0: use the droplet area
  double b_field = 1.0;

  bool operator==(const JobConfig& o) const;
};

// Parses a whole config file. Throws InvalidInput whose message lists every
// error found (one per line, each prefixed "line N:"), never just the first.
std::vector<JobConfig> parse_config(std::string_view text);

// Canonical text form: one section per job, keys in fixed order, doubles at
// full round-trip precision.
std::string emit_config(const std::vector<JobConfig>& jobs);
std::string emit_config(const JobConfig& job);

// Parses "lowest" | "kernel" | "index LO HI" | "window LO HI".
SubspaceSelector parse_selector(std::string_view text);

// --- string registries used by configs and the CLI ---------------------------

struct FrameCatalogEntry {
  std::string id;
  std::string description;
  std::vector<std::string> params;
  BasisSection (*make)();
};

struct SectionCatalogEntry {
  std::string id;
  std::string description;
  std::vector<std::string> params;
  StateSection (*make)();
};

const std::vector<FrameCatalogEntry>& frame_catalog();
const std::vector<SectionCatalogEntry>& section_catalog();

// Lookup helpers; throw InvalidInput listing the registered ids.
const FrameCatalogEntry& find_frame(std::string_view id);
const SectionCatalogEntry& find_section(std::string_view id);

}  // namespace holonomy
