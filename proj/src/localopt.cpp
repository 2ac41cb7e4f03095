#include "flowtrap/localopt.hpp"

#include <cmath>
#include <string>

#include "flowtrap/errors.hpp"

namespace flowtrap {

LocalOptInstance::LocalOptInstance(const CountingOracle& oracle, double eps)
    : oracle_(&oracle), eps_(eps) {
  const OracleSpec& spec = oracle.spec();
  if (!(eps > 0.0)) throw contract_violation("eps must be positive");
  if (!(spec.L > 0.0) || !(spec.B > 0.0))
    throw contract_violation("reduction needs positive L and B");
  const double d = double(spec.d);
  gamma_ = eps / (std::sqrt(d) * spec.L);
  double m_real = std::ceil(8.0 * std::sqrt(d) * spec.B / (eps_ * gamma_));
  if (!(m_real < 9.0e18))
    throw contract_violation("grid radius overflows; eps too small for B");
  m_ = std::uint64_t(m_real);
  Point origin(spec.d, 0.0);
  f0_ = f_checked(origin);
}

std::size_t LocalOptInstance::dim() const { return oracle_->dim(); }

Point LocalOptInstance::to_point(const GridIndex& v) const {
  Point p(v.a.size());
  for (std::size_t i = 0; i < v.a.size(); ++i) p[i] = gamma_ * double(v.a[i]);
  return p;
}

bool LocalOptInstance::in_grid(const GridIndex& v) const {
  if (v.a.size() != dim()) return false;
  for (std::int64_t ai : v.a)
    if (std::uint64_t(ai < 0 ? -ai : ai) > m_) return false;
  return true;
}

double LocalOptInstance::f_checked(const Point& p) const {
  double f = oracle_->value(p);
  const double B = oracle_->spec().B;
  if (std::fabs(f) > B && !violation_) {
    Violation v;
    v.kind = ViolationKind::unbounded;
    v.x = p;
    v.lhs = std::fabs(f);
    v.rhs = B;
    violation_ = v;
  }
  return f;
}

// Validity and potential in one oracle query. The origin is free; boundary
// vertices are invalid without a query: a valid one would drag the value
// below -3B, contradicting the advertised bound.
std::pair<bool, double> LocalOptInstance::eval(const GridIndex& v) const {
  if (!in_grid(v)) return {false, 0.0};
  bool origin = true;
  for (std::int64_t ai : v.a) origin = origin && ai == 0;
  if (origin) return {true, f0_};
  for (std::int64_t ai : v.a)
    if (std::uint64_t(ai < 0 ? -ai : ai) == m_) return {false, 0.0};
  Point p = to_point(v);
  double fp = f_checked(p);
  double dist = l2_norm(p);
  bool ok = fp <= f0_ - (eps_ / (2.0 * std::sqrt(double(dim())))) * dist;
  return {ok, fp};
}

bool LocalOptInstance::valid(const GridIndex& v) const {
  return eval(v).first;
}

double LocalOptInstance::potential(const GridIndex& v) const {
  auto [ok, fp] = eval(v);
  return ok ? fp : oracle_->spec().B + 1.0;
}

void LocalOptInstance::check_pair(const GridIndex& v,
                                  const GridIndex& u) const {
  if (violation_ || !oracle_->has_gradient()) return;
  Point x = to_point(v);
  Point y = to_point(u);
  double fx = oracle_->value(x);
  double fy = oracle_->value(y);
  Point g = oracle_->gradient(x);
  double lin = 0.0, dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lin += g[i] * (y[i] - x[i]);
    dist2 += (y[i] - x[i]) * (y[i] - x[i]);
  }
  const double L = oracle_->spec().L;
  double err = std::fabs(fy - fx - lin);
  double budget = 0.5 * L * dist2 * (1.0 + 1e-9) + 1e-12;
  if (err > budget) {
    Violation w;
    w.kind = ViolationKind::smoothness;
    w.x = x;
    w.y = y;
    w.lhs = err;
    w.rhs = 0.5 * L * dist2;
    violation_ = w;
  }
}

GridIndex LocalOptInstance::neighbor(const GridIndex& v) const {
  GridIndex home;
  home.a.assign(dim(), 0);
  auto [ok, pv] = eval(v);
  if (!ok) return home;
  GridIndex best = v;
  double best_p = pv;
  GridIndex probe = v;
  for (std::size_t i = 0; i < dim(); ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      probe.a[i] = v.a[i] + (dir == 0 ? 1 : -1);
      double p = potential(probe);
      if (p < best_p) {
        best_p = p;
        best = probe;
      }
      probe.a[i] = v.a[i];
    }
  }
  if (!(best == v)) check_pair(v, best);
  return best;
}

GridIndex solve_localopt(const LocalOptInstance& inst, const GridIndex& start,
                         std::uint64_t max_steps,
                         std::vector<DescentRecord>* trace) {
  GridIndex v = start;
  if (!inst.in_grid(v))
    throw contract_violation("descent start is outside the grid");
  if (trace) trace->push_back({v, inst.potential(v)});
  for (std::uint64_t step = 0;; ++step) {
    if (inst.violation()) return v;
    GridIndex u = inst.neighbor(v);
    if (inst.violation()) return v;
    if (u == v) return v;
    if (step >= max_steps)
      throw budget_error("descent exceeded " + std::to_string(max_steps) +
                         " steps");
    v = u;
    if (trace) trace->push_back({v, inst.potential(v)});
  }
}

ReductionOutcome reduce_to_localopt(const CountingOracle& oracle, double eps,
                                    std::uint64_t max_steps) {
  LocalOptInstance inst(oracle, eps);
  GridIndex origin;
  origin.a.assign(inst.dim(), 0);
  GridIndex end = solve_localopt(inst, origin, max_steps);
  ReductionOutcome out;
  if (inst.violation()) {
    out.status = ReductionStatus::contract_breach;
    out.violation = inst.violation();
    out.point = inst.violation()->x;
    return out;
  }
  out.status = ReductionStatus::stationary;
  out.point = inst.to_point(end);
  return out;
}

}  // namespace flowtrap
