#include "flowtrap/oracle.hpp"

#include <cmath>

#include "flowtrap/errors.hpp"

namespace flowtrap {

namespace {
std::string point_str(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}
}  // namespace

CountingOracle::CountingOracle(OracleSpec spec) : spec_(std::move(spec)) {
  if (!spec_.value) throw contract_violation("oracle has no value function");
  if (spec_.d == 0) throw contract_violation("oracle dimension is zero");
}

double CountingOracle::value(const Point& p) const {
  value_calls_.fetch_add(1, std::memory_order_relaxed);
  double v = spec_.value(p);
  if (!std::isfinite(v))
    throw contract_violation("oracle returned a non-finite value at " +
                             point_str(p));
  return v;
}

Point CountingOracle::gradient(const Point& p) const {
  if (!spec_.gradient)
    throw contract_violation("gradient query to a value-only oracle");
  gradient_calls_.fetch_add(1, std::memory_order_relaxed);
  Point g = spec_.gradient(p);
  for (double gi : g)
    if (!std::isfinite(gi))
      throw contract_violation("oracle returned a non-finite gradient at " +
                               point_str(p));
  return g;
}

QueryCounts CountingOracle::counts() const {
  QueryCounts c;
  c.value_queries = value_calls_.load(std::memory_order_relaxed);
  c.gradient_queries = gradient_calls_.load(std::memory_order_relaxed);
  return c;
}

void CountingOracle::reset_counts() {
  value_calls_.store(0, std::memory_order_relaxed);
  gradient_calls_.store(0, std::memory_order_relaxed);
}

}  // namespace flowtrap
