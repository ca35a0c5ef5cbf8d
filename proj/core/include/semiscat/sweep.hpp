#pragma once

// Parameter sweeps: evaluate a weighted resolvent norm over an (h, E, eps)
// grid, compare each value against the matching proved bound, and emit
// deterministic CSV/JSON reports suitable for CI gating.
//
// Weight kinds and the bound attributed to each row:
//   sinh          a = (w')^{1/2}, w the saturating envelope weight
//                    -> bound 8 E^{-1/2} / h
//   exterior      a = (w')^{1/2}, w the odd exterior polynomial weight
//                    -> bound 8 E^{-1/2} / h
//   exterior_pair a = (1+|x|)^{-(1+delta)/2} outside [-R, R]
//                    -> bound 2 / (h delta (1+R)^delta E^{1/2})
//                       (the companion constant with 8 in place of 2 is
//                        implied and also recorded)
//   envelope      a = m^{1/2} for an integrable envelope m >= |V|
//                    -> bound exp(2 E^{-1/2} int m / h)
//
// Rows run in a thread pool; results are ordered deterministically and the
// power-iteration start vectors are fixed, so identical specs produce
// byte-identical CSV output.

#include "semiscat/energy.hpp"
#include "semiscat/norm.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/weights.hpp"

#include <string>
#include <vector>

namespace semiscat {

inline constexpr const char* kToolName = "semiscat";
inline constexpr const char* kToolVersion = "1.0.0";

struct EnvelopeSpec {
  std::string kind = "abs";      // abs | indicator | power
  std::vector<double> params{};  // indicator: {A, R}; power: {A, delta}
};

struct SweepSpec {
  std::string potential = "square_barrier";
  std::vector<double> potential_params{};

  std::string weight = "sinh";   // sinh | exterior | exterior_pair | envelope
  double weight_R = 1.0;         // exterior kinds
  double weight_delta = 1.0;     // exterior kinds
  EnvelopeSpec envelope{};       // sinh / envelope kinds

  std::string backend = "kernel";  // kernel | matrix

  std::vector<double> h_grid{1.0};
  std::vector<double> E_grid{1.0};
  std::vector<double> eps_values{};  // absolute epsilons (0 allowed, kernel only)
  std::vector<double> eps_fracs{};   // relative: eps = r E, r <= 1/2

  double slack = 1.05;
  std::string out_dir{};  // empty: no report files
  int threads = 0;        // 0: hardware concurrency

  NormOptions norm{};
};

struct SweepRow {
  double h = 0, E = 0, eps = 0;
  double computed_norm = 0;
  double bound = 0;
  double ratio = 0;
  bool pass = false;
  bool converged = false;
  size_t n = 0;
  double window = 0;
  std::string message;
};

struct SweepSummary {
  double max_ratio = 0;
  int failures = 0;
  int nonconverged = 0;
  int total = 0;
  bool all_pass = false;
};

struct SweepReport {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  SweepSummary summary;
};

// Validates the spec (theorem regime E >= 2 eps > 0 or eps = 0 with the
// kernel backend; envelope domination; weight hypothesis) and evaluates every
// grid point.  Throws std::invalid_argument on validation failures; per-row
// numerical errors are recorded in the row instead of aborting the sweep.
SweepReport run_sweep(const SweepSpec& spec);

// 0 all rows pass, 1 bound violation on a converged row, 3 nonconvergence.
int sweep_exit_code(const SweepReport& report);

void write_report_csv(const SweepReport& report, const std::string& path);
void write_report_json(const SweepReport& report, const std::string& path);

// Re-evaluates the failing rows recorded in a report.json. Returns the fresh
// report restricted to those rows (empty rows vector: nothing to re-run).
SweepReport rerun_failures(const std::string& report_json_path);

// JSON <-> spec plumbing for the config file and the repro subcommand.
SweepSpec sweep_spec_from_json_file(const std::string& path);

// ----- batched energy audit (drives the audit subcommand) -----

struct AuditRow {
  std::string test_function;
  std::string weight_kind;
  double flux_rel = 0;
  double eps_rel = 0;
  double apriori_ratio = 0;
  double min_margin_rel = 0;
  bool pass = false;
};

struct AuditBatchReport {
  std::vector<AuditRow> rows;
  bool all_pass = false;
};

// Runs every stock test function against the saturating-envelope weight and
// the exterior weight for the given potential; optionally dumps trace CSVs
// (one per row) into out_dir.
AuditBatchReport run_audit_batch(const Potential& V, double h, double E,
                                 double eps, const std::string& out_dir = "",
                                 const EnergyAuditOptions& opts = {});

} // namespace semiscat
