#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>

#include "flowtrap/geometry.hpp"

namespace flowtrap {

enum class DomainKind { unconstrained, unit_cube };

// A first-order target: value is mandatory, gradient optional. L bounds the
// gradient's Lipschitz constant, B bounds |f| where finite bounds are known
// (0 means unspecified).
struct OracleSpec {
  std::size_t d = 0;
  double L = 0.0;
  double B = 0.0;
  DomainKind domain = DomainKind::unconstrained;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;  // may be empty
};

struct QueryCounts {
  std::uint64_t value_queries = 0;
  std::uint64_t gradient_queries = 0;

  std::uint64_t total() const { return value_queries + gradient_queries; }
};

// Thread-safe query-counting wrapper. Every value()/gradient() call counts;
// raw_value()/raw_gradient() bypass the counters and exist for
// instrumentation and reporting paths that must not distort measured costs.
class CountingOracle {
 public:
  explicit CountingOracle(OracleSpec spec);

  double value(const Point& p) const;
  Point gradient(const Point& p) const;
  bool has_gradient() const { return static_cast<bool>(spec_.gradient); }

  double raw_value(const Point& p) const { return spec_.value(p); }
  Point raw_gradient(const Point& p) const { return spec_.gradient(p); }

  QueryCounts counts() const;
  void reset_counts();

  const OracleSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.d; }

 private:
  OracleSpec spec_;
  mutable std::atomic<std::uint64_t> value_calls_{0};
  mutable std::atomic<std::uint64_t> gradient_calls_{0};
};

}  // namespace flowtrap
