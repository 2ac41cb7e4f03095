#include "flowtrap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "flowtrap/errors.hpp"
#include "flowtrap/trap_solver.hpp"

namespace flowtrap {

std::string solver_name(SolverId id) {
  switch (id) {
    case SolverId::trap_unconstrained:
      return "trap-unconstrained";
    case SolverId::trap_constrained:
      return "trap-constrained";
    case SolverId::gradient_descent:
      return "gradient-descent";
  }
  return "?";
}

std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3)
    throw contract_violation("slope fit needs at least three points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw contract_violation("slope fit needs spread in x");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  double se = n > 2 ? std::sqrt(ss / double(n - 2) / sxx) : 0.0;
  return {slope, se};
}

std::pair<double, double> fit_loglog_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> x, y;
  x.reserve(rows.size());
  y.reserve(rows.size());
  for (const auto& r : rows) {
    x.push_back(std::log(1.0 / r.eps));
    y.push_back(std::log(double(r.value_queries + r.gradient_queries)));
  }
  return fit_slope(x, y);
}

SweepResult run_sweep(SolverId solver, const Family& family,
                      const SweepConfig& cfg) {
  std::vector<double> eps = cfg.eps_list;
  if (eps.size() < 4)
    throw contract_violation("sweep needs at least four eps values");
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  for (double e : eps)
    if (!(e > 0.0)) throw contract_violation("eps values must be positive");
  if (eps.front() / eps.back() < 100.0 * (1.0 - 1e-9))
    throw contract_violation("eps grid must span at least two decades");

  SweepResult out;
  out.solver = solver_name(solver);
  out.family = family.name;
  for (double e : eps) {
    CountingOracle oracle(family.spec);
    SolverConfig scfg;
    scfg.eps = e;
    scfg.L = family.spec.L;
    scfg.threads = cfg.threads;
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    switch (solver) {
      case SolverId::trap_unconstrained:
        res = solve_unconstrained(oracle, family.x0, scfg);
        break;
      case SolverId::trap_constrained:
        res = solve_constrained(oracle, scfg);
        break;
      case SolverId::gradient_descent:
        res = gradient_descent_baseline(oracle, family.x0, e, family.spec.L,
                                        cfg.gd_max_iters);
        break;
    }
    auto t1 = std::chrono::steady_clock::now();

    SweepRow row;
    row.eps = e;
    row.value_queries = res.stats.value_queries;
    row.gradient_queries = res.stats.gradient_queries;
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    // Accuracy audit with the family's own gradient, off the counters.
    Point g = family.spec.gradient(res.point);
    if (solver == SolverId::trap_constrained)
      g = projected_gradient(g, res.point);
    row.grad_norm = l2_norm(g);
    if (cfg.require_accuracy) {
      if (res.budget_exhausted) {
        std::ostringstream os;
        os << "sweep row eps=" << e << " exhausted its iteration budget";
        throw invariant_violation(os.str());
      }
      if (row.grad_norm > e) {
        std::ostringstream os;
        os << "sweep row eps=" << e << " returned gradient norm "
           << row.grad_norm;
        throw invariant_violation(os.str());
      }
    }
    out.rows.push_back(row);
  }
  auto fit = fit_loglog_slope(out.rows);
  out.slope = fit.first;
  out.slope_ci = fit.second;
  return out;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << "eps,value_queries,gradient_queries,grad_norm,wall_ms\n";
  for (const auto& r : result.rows) {
    std::ostringstream line;
    line.precision(12);
    line << r.eps << "," << r.value_queries << "," << r.gradient_queries
         << "," << r.grad_norm << "," << r.wall_ms;
    out << line.str() << "\n";
  }
}

void write_json(const SweepResult& result, std::ostream& out) {
  nlohmann::json j;
  j["solver"] = result.solver;
  j["family"] = result.family;
  j["slope"] = result.slope;
  j["slope_ci"] = result.slope_ci;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows) {
    j["rows"].push_back({{"eps", r.eps},
                         {"value_queries", r.value_queries},
                         {"gradient_queries", r.gradient_queries},
                         {"grad_norm", r.grad_norm},
                         {"wall_ms", r.wall_ms}});
  }
  out << j.dump(2) << "\n";
}

}  // namespace flowtrap
