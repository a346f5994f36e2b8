// Turns validated JobConfigs into JobReports: dispatches to the numerical
// modules, times the work, and renders a deterministic structured-text
// result (byte-identical for identical config + seed, wall time excluded).
#pragma once

#include "holonomy/config.hpp"

namespace holonomy {

struct JobReport {
  std::string name;
  JobKind kind = JobKind::gates;
  std::vector<std::string> lines;  // "key: value" result and diagnostic lines
  // Named CSV tables (id, content); the CLI writes them as <job>.<id>.csv.
  std::vector<std::pair<std::string, std::string>> tables;
  double seconds = 0.0;
};

// Runs one job. Errors from the numerical modules are rethrown with the job
// name and kind prefixed, preserving the InvalidInput/NumericalError type the
// CLI maps to exit codes.
JobReport run_job(const JobConfig& config);

// Runs jobs concurrently (capped by worker_thread_count()); the returned
// reports are in config order and the first failure in config order wins.
std::vector<JobReport> run_jobs(const std::vector<JobConfig>& configs);

std::string render_report(const JobReport& report, bool include_timing);
std::string render_reports(const std::vector<JobReport>& reports, bool include_timing);

}  // namespace holonomy
