#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "flowtrap/geometry.hpp"
#include "flowtrap/oracle.hpp"

namespace flowtrap {

struct SolverConfig {
  double eps = 0.0;
  double L = 0.0;
  unsigned threads = 0;  // 0 = auto
  // Re-derives the closed-form iteration laws and spot-checks the
  // no-descent-to-boundary property on every step. Test builds only; checks
  // use uncounted oracle access.
  bool check_invariants = false;
  std::uint64_t check_seed = 0x5eedf10d;
  bool collect_trace = false;
};

// Schedule constants, fixed functions of the dimension.
inline double c1(std::size_t d) { return 75.0 * std::sqrt(double(d)); }
inline double c2(std::size_t d) { return 16.0 * double(d); }
inline constexpr double kShrink = 0.75;  // descent-threshold decay per round

// One pivot-and-box state of the shrinking search.
struct TrapState {
  HyperRect rect;
  Point pivot;
  double pivot_value = 0.0;
  double eps_t = 0.0;
  std::uint64_t t = 0;
};

// Net spacing for the state's next step.
double net_spacing(const TrapState& s, double eps, double L);
// Loop continues while the widest side exceeds this.
double stop_width(double eps, double L, std::size_t d);

struct SolveResult {
  Point point;
  QueryCounts stats;
  std::uint64_t iterations = 0;
  double eps_final = 0.0;
  bool budget_exhausted = false;
  std::vector<TrapState> trace;  // filled when collect_trace
};

// Advances one step: slices the box across its widest axis at the one- and
// two-thirds planes, queries a net on each slice, re-pivots to the best
// sufficiently-descending net point (if any), and discards the third of the
// box the new pivot avoids. Returns queries spent this step.
std::uint64_t trap_step(TrapState& s, const CountingOracle& oracle,
                        const SolverConfig& cfg);

// Zero-order search for a point with gradient norm at most eps. Requires a
// nonnegative oracle (any negative value is a contract violation reported
// with the witness point) and gradient Lipschitz constant L.
SolveResult solve_unconstrained(const CountingOracle& oracle, const Point& x0,
                                const SolverConfig& cfg);

// Box-constrained variant on [0,1]^d: starts from the center, never leaves
// the cube, and returns a corner of the final box whose projected gradient
// norm is at most eps. The oracle may go negative here.
SolveResult solve_constrained(const CountingOracle& oracle,
                              const SolverConfig& cfg);

// Gradient with inactive descent directions zeroed: at x_i == 0 keeps only
// the negative part's complement (min{0, g_i} -> feasible ascent removed), at
// x_i == 1 the mirror, and the raw component in the interior. x must lie in
// [0,1]^d.
Point projected_gradient(const Point& grad, const Point& x);

// Analytic gradient when the oracle has one (a single gradient query);
// otherwise central differences with step eps/(8 L sqrt(d)), falling back to
// a one-sided difference of the same width against the faces of [0,1]^d when
// the domain is the unit cube. Worst-case error eps/16.
Point estimate_gradient(const CountingOracle& oracle, const Point& x,
                        double eps, double L);

// Classical descent baseline: x <- x - grad/L until the gradient norm
// reaches eps or the iteration budget runs out (flagged, not thrown).
SolveResult gradient_descent_baseline(const CountingOracle& oracle,
                                      const Point& x0, double eps, double L,
                                      std::uint64_t max_iters);

}  // namespace flowtrap
