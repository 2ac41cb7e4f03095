#include "flowtrap/trap_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "flowtrap/errors.hpp"
#include "flowtrap/parallel.hpp"

namespace flowtrap {

namespace {

std::string point_str(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ")";
  return os.str();
}

// Walks net indices [begin, end) with an incremental mixed-radix counter;
// coordinates match net_point exactly.
template <typename Fn>
void for_net_range(const NetSpec& net, std::uint64_t begin, std::uint64_t end,
                   Fn&& fn) {
  const std::size_t d = net.rect.dim();
  std::vector<std::uint64_t> digit(d, 0);
  Point p(d);
  std::uint64_t rem = begin;
  for (std::size_t ri = 0; ri < d; ++ri) {
    std::size_t i = d - 1 - ri;
    std::uint64_t base = net.steps[i] + 1;
    digit[i] = rem % base;
    rem /= base;
  }
  auto set_coord = [&](std::size_t i) {
    std::uint64_t n = net.steps[i];
    if (n == 0 || digit[i] == 0)
      p[i] = net.rect.lo[i];
    else if (digit[i] == n)
      p[i] = net.rect.hi[i];
    else
      p[i] = net.rect.lo[i] + net.rect.side(i) * (double(digit[i]) / double(n));
  };
  for (std::size_t i = 0; i < d; ++i) set_coord(i);
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    fn(p, idx);
    for (std::size_t ri = 0; ri < d; ++ri) {
      std::size_t i = d - 1 - ri;
      if (digit[i] < net.steps[i]) {
        ++digit[i];
        set_coord(i);
        break;
      }
      digit[i] = 0;
      set_coord(i);
    }
  }
}

struct NetBest {
  bool found = false;
  double value = 0.0;
  std::uint64_t index = 0;

  void offer(double v, std::uint64_t idx) {
    if (!found || v < value || (v == value && idx < index)) {
      found = true;
      value = v;
      index = idx;
    }
  }
  void merge(const NetBest& o) {
    if (o.found) offer(o.value, o.index);
  }
};

using ValueFn = std::function<double(const Point&)>;

// Best sufficiently-descending net point under the (value, index) order; that
// order is total, so the outcome is independent of thread count.
NetBest scan_net(const NetSpec& net, const ValueFn& eval, const Point& pivot,
                 double pivot_value, double eps_t, unsigned threads) {
  NetBest best;
  std::mutex merge_mutex;
  parallel_chunks(net.size(), threads, [&](std::size_t b, std::size_t e) {
    NetBest local;
    for_net_range(net, b, e, [&](const Point& p, std::uint64_t idx) {
      double v = eval(p);
      if (!is_unreachable(pivot_value, v, pivot, p, eps_t))
        local.offer(v, idx);
    });
    std::lock_guard<std::mutex> lock(merge_mutex);
    best.merge(local);
  });
  return best;
}

std::uint64_t step_with(TrapState& s, const ValueFn& eval,
                        const SolverConfig& cfg) {
  const std::size_t d = s.rect.dim();
  const std::size_t j = s.rect.widest_axis();
  const double r = s.rect.side(j);
  const double delta = net_spacing(s, cfg.eps, cfg.L);
  auto slices = rect_split_planes(s.rect, j);
  NetSpec n1 = nice_delta_net(slices.first, delta);
  NetSpec n2 = nice_delta_net(slices.second, delta);
  NetBest b1 = scan_net(n1, eval, s.pivot, s.pivot_value, s.eps_t, cfg.threads);
  NetBest b2 = scan_net(n2, eval, s.pivot, s.pivot_value, s.eps_t, cfg.threads);

  if (b1.found || b2.found) {
    bool take_first;
    if (b1.found != b2.found) {
      take_first = b1.found;
    } else if (b1.value != b2.value) {
      take_first = b1.value < b2.value;
    } else {
      Point p1, p2;
      net_point(n1, b1.index, p1);
      net_point(n2, b2.index, p2);
      take_first = lex_less(p1, p2);
    }
    const NetSpec& net = take_first ? n1 : n2;
    const NetBest& win = take_first ? b1 : b2;
    net_point(net, win.index, s.pivot);
    s.pivot_value = win.value;
  }

  // Drop the third of the box the new pivot is clear of.
  if (s.pivot[j] >= s.rect.lo[j] + r / 2.0)
    s.rect.lo[j] += r / 3.0;
  else
    s.rect.hi[j] -= r / 3.0;

  s.eps_t += cfg.eps * std::pow(kShrink, double(s.t / d)) / c2(d);
  ++s.t;
  return n1.size() + n2.size();
}

// Re-derives the closed-form step laws and samples the walls for reachable
// points. Only active in checked runs; wall probes use uncounted access.
class InvariantChecker {
 public:
  InvariantChecker(const SolverConfig& cfg, const CountingOracle& oracle,
                   double r0, bool constrained)
      : cfg_(cfg),
        oracle_(oracle),
        r0_(r0),
        d_(oracle.dim()),
        constrained_(constrained),
        rng_(cfg.check_seed) {}

  void check(const TrapState& s, double prev_eps_t) {
    const double eps = cfg_.eps;
    std::uint64_t round = s.t / d_;
    double r = s.rect.max_side();

    double r_expected = r0_ * std::pow(2.0 / 3.0, double(round));
    if (std::fabs(r - r_expected) > 1e-9 * r0_)
      fail(s, "box width drifted from its closed form: have " +
                  std::to_string(r) + ", expected " +
                  std::to_string(r_expected));

    double decay = std::pow(kShrink, double(round));
    double geo = (1.0 - decay) / (1.0 - kShrink);
    double expected_eps =
        eps / 4.0 +
        (eps / c2(d_)) * (double(d_) * geo + double(s.t % d_) * decay);
    if (std::fabs(s.eps_t - expected_eps) > 1e-12 * eps)
      fail(s, "descent threshold drifted from its schedule");
    if (s.t > 0 && !(s.eps_t > prev_eps_t))
      fail(s, "descent threshold failed to increase");
    if (!(s.eps_t <= eps / 2.0))
      fail(s, "descent threshold passed eps/2");

    double delta = net_spacing(s, eps, cfg_.L);
    if (r < 8.0 * std::sqrt(double(d_)) * delta * (1.0 - 1e-12))
      fail(s, "net spacing too coarse for the box width");

    if (!s.rect.contains(s.pivot)) fail(s, "pivot left the box");

    // Sampled walls: no boundary point may pass the descent test against the
    // pivot. Walls lying on the cube boundary are exempt in constrained runs.
    Point y(d_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 64; ++k) {
      std::size_t ax = std::size_t(rng_() % d_);
      bool high = (rng_() & 1ull) != 0;
      for (std::size_t i = 0; i < d_; ++i)
        y[i] = s.rect.lo[i] + unit(rng_) * s.rect.side(i);
      y[ax] = high ? s.rect.hi[ax] : s.rect.lo[ax];
      if (constrained_ && (y[ax] == 0.0 || y[ax] == 1.0)) continue;
      double fy = oracle_.raw_value(y);
      if (!is_unreachable(s.pivot_value, fy, s.pivot, y, s.eps_t))
        fail(s, "boundary point " + point_str(y) +
                    " is reachable by sufficient descent");
    }
  }

  void note_step(const TrapState& before, double eps, double L) {
    double r = before.rect.max_side();
    double delta = net_spacing(before, eps, L);
    double per_slice =
        std::pow(std::sqrt(double(d_)) * r / (2.0 * delta), double(d_) - 1.0);
    budget_bound_ += 2.0 * per_slice;
  }

  void check_budget(std::uint64_t net_queries, const TrapState& s) const {
    if (double(net_queries) > budget_bound_ * (1.0 + 1e-12))
      fail(s, "net queries " + std::to_string(net_queries) +
                  " exceeded the closed-form budget " +
                  std::to_string(budget_bound_));
  }

 private:
  [[noreturn]] void fail(const TrapState& s, const std::string& what) const {
    throw invariant_violation("step " + std::to_string(s.t) + ": " + what);
  }

  const SolverConfig& cfg_;
  const CountingOracle& oracle_;
  double r0_;
  std::size_t d_;
  bool constrained_;
  std::mt19937_64 rng_;
  double budget_bound_ = 0.0;
};

void validate_cfg(const SolverConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw contract_violation("eps must be positive");
  if (!(cfg.L > 0.0)) throw contract_violation("L must be positive");
}

// Shrinks until the box is narrow enough; fills iterations/trace and returns
// with `state` holding the final box and pivot.
void run_loop(TrapState& state, const ValueFn& eval,
              const CountingOracle& oracle, const SolverConfig& cfg,
              bool constrained, double r0, SolveResult& res) {
  const std::size_t d = oracle.dim();
  std::optional<InvariantChecker> checker;
  if (cfg.check_invariants) checker.emplace(cfg, oracle, r0, constrained);

  std::uint64_t net_queries = 0;
  double prev_eps_t = state.eps_t;
  const double stop = stop_width(cfg.eps, cfg.L, d);
  while (state.rect.max_side() > stop) {
    if (checker) {
      checker->check(state, prev_eps_t);
      checker->note_step(state, cfg.eps, cfg.L);
    }
    if (cfg.collect_trace) res.trace.push_back(state);
    prev_eps_t = state.eps_t;
    net_queries += step_with(state, eval, cfg);
    ++res.iterations;
  }
  if (checker) {
    checker->check(state, prev_eps_t);
    checker->check_budget(net_queries, state);
  }
  if (cfg.collect_trace) res.trace.push_back(state);
  res.point = state.pivot;
  res.eps_final = state.eps_t;
}

QueryCounts counts_since(const CountingOracle& oracle,
                         const QueryCounts& at_entry) {
  QueryCounts now = oracle.counts();
  QueryCounts out;
  out.value_queries = now.value_queries - at_entry.value_queries;
  out.gradient_queries = now.gradient_queries - at_entry.gradient_queries;
  return out;
}

}  // namespace

double net_spacing(const TrapState& s, double eps, double L) {
  const std::size_t d = s.rect.dim();
  double r = s.rect.max_side();
  return std::sqrt(eps / (c1(d) * c2(d) * L) * r *
                   std::pow(kShrink, double(s.t / d)));
}

double stop_width(double eps, double L, std::size_t d) {
  return eps / (2.0 * std::sqrt(double(d)) * L);
}

std::uint64_t trap_step(TrapState& s, const CountingOracle& oracle,
                        const SolverConfig& cfg) {
  ValueFn eval = [&oracle](const Point& p) { return oracle.value(p); };
  return step_with(s, eval, cfg);
}

SolveResult solve_unconstrained(const CountingOracle& oracle, const Point& x0,
                                const SolverConfig& cfg) {
  validate_cfg(cfg);
  const std::size_t d = oracle.dim();
  if (x0.size() != d)
    throw contract_violation("start point has dimension " +
                             std::to_string(x0.size()) + ", oracle wants " +
                             std::to_string(d));
  QueryCounts at_entry = oracle.counts();
  ValueFn eval = [&oracle](const Point& p) {
    double v = oracle.value(p);
    if (v < 0.0)
      throw contract_violation("oracle went negative at " + point_str(p) +
                               ": " + std::to_string(v));
    return v;
  };

  SolveResult res;
  double f0 = eval(x0);
  if (f0 == 0.0) {
    // Global minimum of a nonnegative function is already stationary.
    res.point = x0;
    res.eps_final = cfg.eps / 4.0;
    res.stats = counts_since(oracle, at_entry);
    return res;
  }

  double radius = 2.0 * f0 / (cfg.eps / 4.0);
  TrapState state;
  state.rect.lo.resize(d);
  state.rect.hi.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    state.rect.lo[i] = x0[i] - radius;
    state.rect.hi[i] = x0[i] + radius;
  }
  state.pivot = x0;
  state.pivot_value = f0;
  state.eps_t = cfg.eps / 4.0;
  state.t = 0;
  run_loop(state, eval, oracle, cfg, false, 2.0 * radius, res);
  res.stats = counts_since(oracle, at_entry);
  return res;
}

SolveResult solve_constrained(const CountingOracle& oracle,
                              const SolverConfig& cfg) {
  validate_cfg(cfg);
  const std::size_t d = oracle.dim();
  if (oracle.spec().domain != DomainKind::unit_cube)
    throw contract_violation("constrained solve wants a unit-cube oracle");
  if (d > 26) throw contract_violation("constrained solve supports d <= 26");
  QueryCounts at_entry = oracle.counts();
  ValueFn eval = [&oracle](const Point& p) { return oracle.value(p); };

  TrapState state;
  state.rect.lo.assign(d, 0.0);
  state.rect.hi.assign(d, 1.0);
  state.pivot = state.rect.center();
  state.pivot_value = eval(state.pivot);
  state.eps_t = cfg.eps / 4.0;
  state.t = 0;
  SolveResult res;
  run_loop(state, eval, oracle, cfg, true, 1.0, res);

  // One corner of the final box must carry a small projected gradient; take
  // the first in lexicographic order. Finding none means the oracle's
  // smoothness constants are wrong or the search logic is broken.
  Point corner(d);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    for (std::size_t i = 0; i < d; ++i) {
      bool high = (mask >> (d - 1 - i)) & 1ull;
      corner[i] = high ? state.rect.hi[i] : state.rect.lo[i];
    }
    Point g = estimate_gradient(oracle, corner, cfg.eps, cfg.L);
    Point pg = projected_gradient(g, corner);
    if (l2_norm(pg) <= cfg.eps) {
      res.point = corner;
      res.stats = counts_since(oracle, at_entry);
      return res;
    }
  }
  throw invariant_violation(
      "no corner of the final box is nearly stationary; final box lo " +
      point_str(state.rect.lo) + ", hi " + point_str(state.rect.hi) +
      ", pivot " + point_str(state.pivot));
}

Point projected_gradient(const Point& grad, const Point& x) {
  if (grad.size() != x.size())
    throw contract_violation("gradient and point dimensions differ");
  Point g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || x[i] > 1.0)
      throw contract_violation("point outside the unit cube at axis " +
                               std::to_string(i));
    if (x[i] == 0.0)
      g[i] = std::min(0.0, grad[i]);
    else if (x[i] == 1.0)
      g[i] = std::max(0.0, grad[i]);
    else
      g[i] = grad[i];
  }
  return g;
}

Point estimate_gradient(const CountingOracle& oracle, const Point& x,
                        double eps, double L) {
  if (oracle.has_gradient()) return oracle.gradient(x);
  const std::size_t d = oracle.dim();
  if (!(eps > 0.0) || !(L > 0.0))
    throw contract_violation("estimate_gradient needs positive eps and L");
  const double h = eps / (8.0 * L * std::sqrt(double(d)));
  const bool cube = oracle.spec().domain == DomainKind::unit_cube;

  Point g(d);
  Point xp = x;
  double fx = 0.0;
  bool have_fx = false;
  for (std::size_t i = 0; i < d; ++i) {
    bool room_up = !cube || x[i] + h <= 1.0;
    bool room_down = !cube || x[i] - h >= 0.0;
    if (room_up && room_down) {
      xp[i] = x[i] + h;
      double fp = oracle.value(xp);
      xp[i] = x[i] - h;
      double fm = oracle.value(xp);
      g[i] = (fp - fm) / (2.0 * h);
    } else if (room_up || room_down) {
      if (!have_fx) {
        xp[i] = x[i];
        fx = oracle.value(xp);
        have_fx = true;
      }
      xp[i] = room_up ? x[i] + h : x[i] - h;
      double fh = oracle.value(xp);
      g[i] = room_up ? (fh - fx) / h : (fx - fh) / h;
    } else {
      throw contract_violation(
          "differencing step does not fit inside the domain; eps/L mismatch");
    }
    xp[i] = x[i];
  }
  return g;
}

SolveResult gradient_descent_baseline(const CountingOracle& oracle,
                                      const Point& x0, double eps, double L,
                                      std::uint64_t max_iters) {
  if (!(eps > 0.0) || !(L > 0.0))
    throw contract_violation("baseline needs positive eps and L");
  if (!oracle.has_gradient())
    throw contract_violation("baseline needs a gradient oracle");
  QueryCounts at_entry = oracle.counts();
  SolveResult res;
  Point x = x0;
  for (;;) {
    Point g = oracle.gradient(x);
    if (l2_norm(g) <= eps) break;
    if (res.iterations >= max_iters) {
      res.budget_exhausted = true;
      break;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= g[i] / L;
    ++res.iterations;
  }
  res.point = std::move(x);
  res.eps_final = eps;
  res.stats = counts_since(oracle, at_entry);
  return res;
}

}  // namespace flowtrap
