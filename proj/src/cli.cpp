#include "holonomy/cli.hpp"

#include "holonomy/acceptance.hpp"
#include "holonomy/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace holonomy {
namespace {

void list_systems(std::ostream& out) {
  out << "Hamiltonian families:\n";
  for (const auto& [id, description] : family_catalog()) {
    out << "  " << id << " - " << description << "\n";
    HamiltonianFamily family = make_family(id, {});
    out << "    parameters:";
    for (const ParamSpec& p : family.schema) {
      out << " " << p.name;
      if (p.period > 0.0) out << " (period " << p.period << ")";
    }
    out << "\n";
    if (!family.constants.empty()) {
      out << "    constants:";
      for (const auto& [name, value] : family.constants)
        out << " " << name << " = " << value;
      out << "\n";
    }
  }
  out << "Frame sections (degenerate manifolds):\n";
  for (const auto& entry : frame_catalog()) {
    out << "  " << entry.id << " - " << entry.description << "\n    parameters:";
    for (const std::string& p : entry.params) out << " " << p;
    out << "\n";
  }
  out << "State sections (single-state gauges):\n";
  for (const auto& entry : section_catalog()) {
    out << "  " << entry.id << " - " << entry.description << "\n    parameters:";
    for (const std::string& p : entry.params) out << " " << p;
    out << "\n";
  }
  out << "Gates: I, sigma1, sigma2, sigma3, CNOT, SWAP, PHASE(phi), CNOT_I\n";
}

int run_command(const std::string& config_path, const std::string& output_dir,
                const std::string& format, bool quiet, bool seed_given, std::uint64_t seed,
                bool steps_given, std::size_t steps) {
  std::ifstream in(config_path);
  if (!in) throw InvalidInput("cannot read config file '" + config_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();

  std::vector<JobConfig> jobs = parse_config(buffer.str());
  for (JobConfig& job : jobs) {
    if (seed_given) job.seed = seed;
    if (steps_given) {
      if (job.kind == JobKind::evolve) job.steps = steps;
      if (job.loop.kind != "none") job.loop.segments = steps;
    }
  }

  std::vector<JobReport> reports = run_jobs(jobs);
  if (!quiet) std::cout << render_reports(reports, /*include_timing=*/true);

  if (!output_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + output_dir + "'");
    for (const JobReport& report : reports) {
      if (format == "report" || format == "both") {
        fs::path path = fs::path(output_dir) / (report.name + ".report.txt");
        std::ofstream file(path);
        file << render_report(report, /*include_timing=*/false);
        if (!file) throw InvalidInput("cannot write '" + path.string() + "'");
        if (!quiet) std::cout << "wrote " << path.string() << "\n";
      }
      if (format == "csv" || format == "both") {
        for (const auto& [id, csv] : report.tables) {
          namespace fs = std::filesystem;
          fs::path path = fs::path(output_dir) / (report.name + "." + id + ".csv");
          std::ofstream file(path);
          file << csv;
          if (!file) throw InvalidInput("cannot write '" + path.string() + "'");
          if (!quiet) std::cout << "wrote " << path.string() << "\n";
        }
      }
    }
  }
  return 0;
}

int verify_command(bool quiet) {
  AcceptanceReport report = run_acceptance(quiet ? nullptr : &std::cout);
  int passed = 0;
  for (const CriterionResult& c : report.criteria)
    if (c.passed) ++passed;
  std::cout << "acceptance: " << passed << "/" << report.criteria.size() << " criteria passed\n";
  if (quiet) {
    for (const CriterionResult& c : report.criteria)
      if (!c.passed) std::cout << format_criterion(c) << "\n";
  }
  return report.all_passed() ? 0 : 2;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Geometric-phase engine: connections, curvatures, loop holonomies,"
               " phase decomposition, and fractional-charge estimates"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress per-job output (errors still go to stderr)");

  CLI::App* list = app.add_subcommand("list-systems", "print registered systems and gauges");
  list->fallthrough();

  CLI::App* run = app.add_subcommand("run", "run every job in a config file");
  run->fallthrough();
  std::string config_path;
  run->add_option("config_file", config_path, "job config file")->required(false);
  std::string config_flag;
  run->add_option("--config", config_flag, "job config file (alternative to the positional)");
  std::string output_dir;
  run->add_option("--output", output_dir, "directory for report/CSV files");
  std::string format = "report";
  run->add_option("--format", format, "files to write: report, csv, or both")
      ->check(CLI::IsMember({"report", "csv", "both"}));
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override every job's sampling seed");
  std::size_t steps = 0;
  CLI::Option* steps_opt =
      run->add_option("--steps", steps, "override evolve steps and loop segment counts");

  CLI::App* verify =
      app.add_subcommand("verify", "run the built-in acceptance suite and print a table");
  verify->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (list->parsed()) {
      list_systems(std::cout);
      return 0;
    }
    if (run->parsed()) {
      if (config_path.empty()) config_path = config_flag;
      if (config_path.empty())
        throw InvalidInput("run needs a config file: run <config> or run --config <path>");
      return run_command(config_path, output_dir, format, quiet, seed_opt->count() > 0, seed,
                         steps_opt->count() > 0, steps);
    }
    if (verify->parsed()) return verify_command(quiet);
    throw InvalidInput("no subcommand given");
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace holonomy
