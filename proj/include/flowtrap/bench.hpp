#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "flowtrap/families.hpp"
#include "flowtrap/oracle.hpp"

namespace flowtrap {

enum class SolverId { trap_unconstrained, trap_constrained, gradient_descent };

std::string solver_name(SolverId id);

struct SweepRow {
  double eps = 0.0;
  std::uint64_t value_queries = 0;
  std::uint64_t gradient_queries = 0;
  double grad_norm = 0.0;  // at the returned point, uncounted analytic call
  double wall_ms = 0.0;
};

struct SweepResult {
  std::string solver;
  std::string family;
  double slope = 0.0;     // d log(queries) / d log(1/eps)
  double slope_ci = 0.0;  // one standard error of the fit
  std::vector<SweepRow> rows;
};

// Least squares fit of y against x; returns slope and its standard error.
std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y);
// Convenience: fit log(queries) against log(1/eps) over rows.
std::pair<double, double> fit_loglog_slope(const std::vector<SweepRow>& rows);

struct SweepConfig {
  std::vector<double> eps_list;  // re-sorted descending
  unsigned threads = 0;
  std::uint64_t gd_max_iters = 2'000'000'000;
  // Fail fast when a run returns a point whose gradient norm exceeds eps.
  bool require_accuracy = true;
};

// Runs the solver across the eps grid on one family. Requires at least four
// eps values spanning at least two decades. Each run gets a fresh counter;
// each row's gradient norm comes from the family's own gradient, outside the
// counted oracle; a row that misses its accuracy target aborts the sweep
// naming the offending row.
SweepResult run_sweep(SolverId solver, const Family& family,
                      const SweepConfig& cfg);

void write_csv(const SweepResult& result, std::ostream& out);
void write_json(const SweepResult& result, std::ostream& out);

}  // namespace flowtrap
