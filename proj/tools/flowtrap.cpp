// Command-line front end. Each subcommand binds one library operation:
// solve a single instance, sweep a query-count scaling, export or certify a
// terrain, run the neighborhood-search reduction, or race the path follower
// against the committing adversary. All numeric work lives in the library.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "flowtrap/bench.hpp"
#include "flowtrap/errors.hpp"
#include "flowtrap/families.hpp"
#include "flowtrap/hardfn.hpp"
#include "flowtrap/iter.hpp"
#include "flowtrap/localopt.hpp"
#include "flowtrap/trap_solver.hpp"

namespace {

using namespace flowtrap;

std::string join(const Point& p) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ",";
    os << p[i];
  }
  return os.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw contract_violation("cannot open output file " + path);
  return file;
}

// Family selection shared by solve, sweep, and reduce.
struct FamilyArgs {
  std::string family = "quadratic";
  std::string iter_path;
  std::size_t d = 2;
  double f0 = 1.0;
  std::vector<double> x0;
  bool raw_terrain = false;
};

void add_family_flags(CLI::App* cmd, FamilyArgs& args) {
  cmd->add_option("--family", args.family,
                  "quadratic | multiwell | box-quadratic | box-linear | "
                  "terrain (default quadratic)")
      ->check(CLI::IsMember({"quadratic", "multiwell", "box-quadratic",
                             "box-linear", "terrain"}));
  cmd->add_option("--iter", args.iter_path,
                  "successor instance file; implies --family terrain");
  cmd->add_option("--d", args.d, "dimension (quadratic/multiwell/box-linear)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--f0", args.f0, "start value of the quadratic family")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--x0", args.x0, "start point, comma-separated decimals")
      ->delimiter(',');
  cmd->add_flag("--raw-terrain", args.raw_terrain,
                "skip the 1/period normalization of terrain values");
}

struct BuiltFamily {
  Family family;
  std::shared_ptr<HardFunction> terrain;  // set for terrain families
};

Point default_multiwell_start(std::size_t d) {
  Point x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = i % 2 == 0 ? 1.7 : -0.6;
  return x;
}

BuiltFamily build_family(const FamilyArgs& args) {
  std::string family = args.iter_path.empty() ? args.family : "terrain";
  BuiltFamily out;
  if (family == "terrain") {
    if (args.iter_path.empty())
      throw CLI::ValidationError("--family terrain requires --iter");
    HardFamily hf =
        hard_family(load_iter(args.iter_path), !args.raw_terrain, args.x0);
    out.family = hf.family;
    out.terrain = hf.fn;
    return out;
  }
  if (family == "quadratic") {
    out.family = quadratic_family(args.d, args.f0);
  } else if (family == "multiwell") {
    Point x0 = args.x0.empty() ? default_multiwell_start(args.d) : args.x0;
    out.family = multiwell_family(args.d, x0);
  } else if (family == "box-quadratic") {
    out.family = box_quadratic_family();
  } else {
    out.family = box_linear_family(args.d);
  }
  if (!args.x0.empty()) {
    if (args.x0.size() != out.family.spec.d)
      throw CLI::ValidationError("--x0 has " + std::to_string(args.x0.size()) +
                                 " coordinates, family expects " +
                                 std::to_string(out.family.spec.d));
    out.family.x0 = args.x0;
  }
  return out;
}

struct SolveArgs {
  FamilyArgs fam;
  std::string mode = "unconstrained";
  double eps = 0.0;
  double L = 0.0;  // 0 keeps the family's constant
  unsigned threads = 0;
  bool instrument = false;
};

int run_solve(const SolveArgs& a) {
  BuiltFamily bf = build_family(a.fam);
  CountingOracle oracle(bf.family.spec);
  SolverConfig cfg;
  cfg.eps = a.eps;
  cfg.L = a.L > 0.0 ? a.L : bf.family.spec.L;
  cfg.threads = a.threads;
  cfg.check_invariants = a.instrument;
  SolveResult res = a.mode == "constrained"
                        ? solve_constrained(oracle, cfg)
                        : solve_unconstrained(oracle, bf.family.x0, cfg);

  std::cout.precision(12);
  std::cout << "point: " << join(res.point) << "\n";
  if (oracle.has_gradient()) {
    Point g = oracle.raw_gradient(res.point);
    if (a.mode == "constrained") g = projected_gradient(g, res.point);
    std::cout << "grad_norm: " << l2_norm(g) << "\n";
  }
  std::cout << "value_queries: " << res.stats.value_queries << "\n";
  std::cout << "gradient_queries: " << res.stats.gradient_queries << "\n";
  std::cout << "iterations: " << res.iterations << "\n";
  std::cout << "eps_final: " << res.eps_final << "\n";
  if (bf.terrain) {
    Decoded dec =
        decode_point(bf.terrain->params(), res.point[0], res.point[1]);
    if (dec.valid)
      std::cout << "decoded_solution: " << dec.solution << " (node " << dec.u
                << ")\n";
    else
      std::cout << "decoded_solution: none\n";
  }
  return 0;
}

struct SweepArgs {
  FamilyArgs fam;
  std::string solver = "trap-unconstrained";
  std::vector<double> eps;
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 0;
  std::uint64_t gd_max_iters = 2'000'000'000;
  bool no_audit = false;
  double slope_min = 0.0;
  double slope_max = 0.0;
  bool check_band = false;
};

int run_sweep_cmd(const SweepArgs& a) {
  BuiltFamily bf = build_family(a.fam);
  SolverId id = SolverId::trap_unconstrained;
  if (a.solver == "trap-constrained") id = SolverId::trap_constrained;
  if (a.solver == "gradient-descent") id = SolverId::gradient_descent;

  SweepConfig cfg;
  cfg.eps_list = a.eps;
  cfg.threads = a.threads;
  cfg.gd_max_iters = a.gd_max_iters;
  cfg.require_accuracy = !a.no_audit;
  SweepResult res = run_sweep(id, bf.family, cfg);

  if (a.out_path.empty()) {
    a.format == "json" ? write_json(res, std::cout)
                       : write_csv(res, std::cout);
  } else {
    std::ofstream file = open_out(a.out_path);
    a.format == "json" ? write_json(res, file) : write_csv(res, file);
    std::cout << "wrote " << a.out_path << ": " << res.rows.size()
              << " rows\n";
  }
  std::cerr << "slope " << res.slope << " (se " << res.slope_ci << ") on "
            << res.family << "\n";
  if (a.check_band && (res.slope < a.slope_min || res.slope > a.slope_max)) {
    std::cerr << "slope " << res.slope << " outside [" << a.slope_min << ", "
              << a.slope_max << "]\n";
    return 1;
  }
  return 0;
}

int run_hardgen(const std::string& iter_path, const std::string& out_path,
                double step, bool raw) {
  HardFunction fn(derive_params(load_iter(iter_path), !raw));
  std::ofstream file = open_out(out_path);
  export_landscape(fn, step, file);
  auto per_axis = std::uint64_t(std::floor(double(fn.M()) / step)) + 1;
  std::cout << "wrote " << out_path << ": " << per_axis * per_axis
            << " samples over one " << fn.M() << "-periodic tile\n";
  return 0;
}

int run_verify(const std::string& iter_path, double step, unsigned threads) {
  HardFunction fn(derive_params(load_iter(iter_path)));
  SpuriousReport report = verify_no_spurious(fn, step, threads);

  std::cout.precision(6);
  std::cout << "tile: " << fn.M() << " x " << fn.M() << ", grid step " << step
            << ", " << report.points_swept << " points swept\n";
  std::cout << "min gradient outside solution squares: "
            << report.min_grad_outside << "\n";
  for (const auto& p : report.probes) {
    std::cout << "node " << p.u << " "
              << (p.box == BoxSide::min_box ? "upper" : "lower") << " box: "
              << (p.expect_pit ? "pit expected" : "no pit expected") << ", "
              << (p.found_pit ? "pit found" : "none found") << " (grad "
              << p.min_grad << " at " << p.x << "," << p.y << ")\n";
  }
  if (report.offenders.empty()) {
    std::cout << "offenders: none\n";
  } else {
    for (const auto& o : report.offenders)
      std::cout << "offender: gradient " << o[2] << " at " << o[0] << ","
                << o[1] << "\n";
  }
  std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? 0 : 1;
}

struct ReduceArgs {
  FamilyArgs fam;
  double eps = 0.0;
  double B = 0.0;  // asserted value bound when the family leaves it unset
  std::uint64_t max_steps = 100'000'000;
};

int run_reduce(const ReduceArgs& a) {
  BuiltFamily bf = build_family(a.fam);
  if (bf.family.spec.domain != DomainKind::unconstrained)
    throw CLI::ValidationError("reduce runs on unconstrained families");
  if (a.B > 0.0) bf.family.spec.B = a.B;
  CountingOracle oracle(bf.family.spec);
  ReductionOutcome out = reduce_to_localopt(oracle, a.eps, a.max_steps);

  std::cout.precision(12);
  QueryCounts counts = oracle.counts();
  if (out.status == ReductionStatus::stationary) {
    std::cout << "status: stationary\n";
    std::cout << "point: " << join(out.point) << "\n";
    if (oracle.has_gradient())
      std::cout << "grad_norm: " << l2_norm(oracle.raw_gradient(out.point))
                << "\n";
    std::cout << "value_queries: " << counts.value_queries << "\n";
    return 0;
  }
  const Violation& v = *out.violation;
  std::cout << "status: contract-breach\n";
  std::cout << "kind: "
            << (v.kind == ViolationKind::unbounded ? "unbounded"
                                                   : "smoothness")
            << "\n";
  std::cout << "x: " << join(v.x) << "\n";
  if (!v.y.empty()) std::cout << "y: " << join(v.y) << "\n";
  std::cout << "measured: " << v.lhs << "\n";
  std::cout << "allowed: " << v.rhs << "\n";
  std::cout << "value_queries: " << counts.value_queries << "\n";
  return 1;
}

int run_adversary(unsigned n, const std::string& out_path) {
  AdversaryOracle oracle(n);
  auto [solution, queries] = follow_path(oracle);
  IterInstance inst = oracle.materialize();
  inst.validate();
  bool confirmed = inst.is_solution(solution);

  std::cout << "nodes: " << oracle.domain_size() << "\n";
  std::cout << "queries: " << queries << "\n";
  std::cout << "solution: " << solution << "\n";
  std::cout << "materialized instance "
            << (confirmed ? "confirms" : "rejects") << " the solution\n";
  if (!out_path.empty()) {
    std::ofstream file = open_out(out_path);
    write_iter(inst, file);
    std::cout << "wrote " << out_path << "\n";
  }
  return confirmed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Zero-order search for near-stationary points by trapping descents in "
      "a shrinking box, with terrain generation, certification, and "
      "query-complexity demos"};
  app.require_subcommand(1);
  app.footer(
      "FLOWTRAP_THREADS caps worker threads where --threads is 0 or absent.");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "run the shrinking-box solver on one target");
  solve->add_option("--mode", solve_args.mode, "unconstrained | constrained")
      ->check(CLI::IsMember({"unconstrained", "constrained"}));
  add_family_flags(solve, solve_args.fam);
  solve->add_option("--eps", solve_args.eps, "target gradient norm")
      ->required()
      ->check(CLI::PositiveNumber);
  solve->add_option("--L", solve_args.L,
                    "curvature bound override (default: family constant)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--threads", solve_args.threads, "worker threads, 0=auto");
  solve->add_flag("--instrument", solve_args.instrument,
                  "re-check internal step laws while solving");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "measure query counts across an eps grid and fit the slope");
  sweep
      ->add_option("--solver", sweep_args.solver,
                   "trap-unconstrained | trap-constrained | gradient-descent")
      ->check(CLI::IsMember(
          {"trap-unconstrained", "trap-constrained", "gradient-descent"}));
  add_family_flags(sweep, sweep_args.fam);
  sweep
      ->add_option("--eps", sweep_args.eps,
                   "comma-separated eps grid, at least four values spanning "
                   "two decades")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_args.out_path,
                    "output path (default: stdout)");
  sweep->add_option("--format", sweep_args.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--threads", sweep_args.threads, "worker threads, 0=auto");
  sweep->add_option("--gd-max-iters", sweep_args.gd_max_iters,
                    "iteration cap for the gradient-descent baseline");
  sweep->add_flag("--no-audit", sweep_args.no_audit,
                  "keep rows whose returned point misses its accuracy target");
  CLI::Option* smin = sweep->add_option(
      "--slope-min", sweep_args.slope_min, "fail when the fitted slope is "
                                           "below this");
  CLI::Option* smax = sweep->add_option(
      "--slope-max", sweep_args.slope_max, "fail when the fitted slope is "
                                           "above this");

  std::string hardgen_iter, hardgen_out;
  double hardgen_step = 0.25;
  bool hardgen_raw = false;
  CLI::App* hardgen = app.add_subcommand(
      "hardgen", "export one terrain tile as CSV samples");
  hardgen->add_option("--iter", hardgen_iter, "successor instance file")
      ->required();
  hardgen->add_option("--out", hardgen_out, "CSV output path")->required();
  hardgen->add_option("--step", hardgen_step, "sample spacing")
      ->check(CLI::PositiveNumber);
  hardgen->add_flag("--raw", hardgen_raw, "export unnormalized values");

  std::string verify_iter;
  double verify_step = 0.05;
  unsigned verify_threads = 0;
  CLI::App* verify = app.add_subcommand(
      "verify-hard",
      "certify a terrain: no near-stationary point outside its dead ends");
  verify->add_option("--iter", verify_iter, "successor instance file")
      ->required();
  verify->add_option("--step", verify_step, "sweep grid spacing")
      ->check(CLI::PositiveNumber);
  verify->add_option("--threads", verify_threads, "worker threads, 0=auto");

  ReduceArgs reduce_args;
  CLI::App* reduce = app.add_subcommand(
      "reduce",
      "find a near-stationary point through the grid neighborhood-search "
      "reduction, or report the oracle contract breach that prevents it");
  add_family_flags(reduce, reduce_args.fam);
  reduce->add_option("--eps", reduce_args.eps, "target gradient norm")
      ->required()
      ->check(CLI::PositiveNumber);
  reduce->add_option("--B", reduce_args.B,
                     "value bound to assert when the family leaves it unset")
      ->check(CLI::PositiveNumber);
  reduce->add_option("--max-steps", reduce_args.max_steps,
                     "descent step budget");

  unsigned adv_n = 8;
  std::string adv_out;
  CLI::App* adversary = app.add_subcommand(
      "adversary-demo",
      "race the path follower against the committing successor adversary");
  adversary->add_option("--n", adv_n, "domain size exponent (2^n nodes)")
      ->check(CLI::Range(1u, 24u));
  adversary->add_option("--out", adv_out,
                        "write the materialized instance here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return run_solve(solve_args);
    if (*sweep) {
      sweep_args.check_band = smin->count() > 0 || smax->count() > 0;
      if (smax->count() == 0) sweep_args.slope_max = 1e300;
      if (smin->count() == 0) sweep_args.slope_min = -1e300;
      return run_sweep_cmd(sweep_args);
    }
    if (*hardgen)
      return run_hardgen(hardgen_iter, hardgen_out, hardgen_step, hardgen_raw);
    if (*verify) return run_verify(verify_iter, verify_step, verify_threads);
    if (*reduce) return run_reduce(reduce_args);
    if (*adversary) return run_adversary(adv_n, adv_out);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const flowtrap::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
