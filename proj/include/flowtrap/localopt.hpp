#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "flowtrap/geometry.hpp"
#include "flowtrap/oracle.hpp"

namespace flowtrap {

// Vertex of the search grid; the real point is gamma * a.
struct GridIndex {
  std::vector<std::int64_t> a;

  bool operator==(const GridIndex& o) const { return a == o.a; }
};

enum class ViolationKind { none, unbounded, smoothness };

// Witness that the oracle broke its advertised contract: either |f| exceeded
// B, or a first-order Taylor estimate between two nearby points missed by
// more than the curvature bound allows.
struct Violation {
  ViolationKind kind = ViolationKind::none;
  Point x, y;        // y unused for the bound check
  double lhs = 0.0;  // measured quantity
  double rhs = 0.0;  // what the contract allows
};

// Neighborhood-search instance over the grid gamma * [-m, m]^d. A vertex is
// valid when stepping to it from the origin pays a proportional descent;
// invalid vertices cost B + 1 and point home. Everything is computed on
// demand straight from the oracle.
class LocalOptInstance {
 public:
  LocalOptInstance(const CountingOracle& oracle, double eps);

  double gamma() const { return gamma_; }
  std::uint64_t m() const { return m_; }
  double radius() const { return gamma_ * double(m_); }
  double eps() const { return eps_; }
  std::size_t dim() const;

  Point to_point(const GridIndex& v) const;
  bool in_grid(const GridIndex& v) const;

  bool valid(const GridIndex& v) const;
  double potential(const GridIndex& v) const;
  // Best axis neighbor by potential; ties favor the lower axis and the +
  // direction. Invalid vertices map to the origin.
  GridIndex neighbor(const GridIndex& v) const;

  const std::optional<Violation>& violation() const { return violation_; }

 private:
  double f_checked(const Point& p) const;
  std::pair<bool, double> eval(const GridIndex& v) const;
  void check_pair(const GridIndex& v, const GridIndex& u) const;

  const CountingOracle* oracle_;
  double eps_;
  double gamma_;
  std::uint64_t m_;
  double f0_;
  mutable std::optional<Violation> violation_;
};

struct DescentRecord {
  GridIndex v;
  double potential = 0.0;
};

// Potential descent from `start` until a vertex beats all its neighbors, a
// contract violation is recorded, or the step budget runs out (budget_error).
// When trace is non-null every visited vertex is appended.
GridIndex solve_localopt(const LocalOptInstance& inst, const GridIndex& start,
                         std::uint64_t max_steps,
                         std::vector<DescentRecord>* trace = nullptr);

enum class ReductionStatus { stationary, contract_breach };

struct ReductionOutcome {
  ReductionStatus status = ReductionStatus::stationary;
  Point point;  // eps-stationary point when status == stationary
  std::optional<Violation> violation;
};

// Full pipeline: build the grid instance from the oracle, descend from the
// origin, and map the end vertex back to a point or a contract breach.
ReductionOutcome reduce_to_localopt(const CountingOracle& oracle, double eps,
                                    std::uint64_t max_steps);

}  // namespace flowtrap
