#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace flowtrap {

// A successor map C on {1, ..., 2^n} with C(1) > 1. A node v solves the
// instance when C(v) < v, or when C(v) > v and C(C(v)) = C(v). Totality of C
// guarantees at least one solution.
struct IterInstance {
  unsigned n = 0;
  std::vector<std::uint64_t> succ;  // succ[v-1] = C(v)

  std::uint64_t size() const { return std::uint64_t{1} << n; }
  std::uint64_t apply(std::uint64_t v) const { return succ[v - 1]; }

  // Throws contract_violation when the table is malformed.
  void validate() const;

  bool is_solution(std::uint64_t v) const;
  std::vector<std::uint64_t> solutions() const;  // ascending, brute force
};

// Text format: first line n, then 2^n lines "v succ(v)" with v ascending.
IterInstance parse_iter(std::istream& in);
IterInstance load_iter(const std::string& path);
void write_iter(const IterInstance& inst, std::ostream& out);

// Answers successor queries while committing to as little of the map as
// possible: it grows a single path from node 1, sends every on-path query to
// the smallest node never queried before (self-loop once none remain), and
// pins every off-path node to a self-loop. Any algorithm must uncover the
// whole path, so finding a solution costs one query per node.
class AdversaryOracle {
 public:
  explicit AdversaryOracle(unsigned n);

  std::uint64_t query(std::uint64_t v);
  std::uint64_t queries_made() const { return queries_; }
  std::uint64_t domain_size() const { return std::uint64_t{1} << n_; }
  bool was_queried(std::uint64_t v) const { return queried_[v - 1]; }

  // Freezes the current transcript into a concrete instance; nodes never
  // answered become self-loops (node 1, which may not self-loop, maps to 2).
  IterInstance materialize() const;

 private:
  unsigned n_;
  std::vector<std::uint64_t> answer_;  // 0 = not answered yet
  std::vector<bool> queried_;
  std::uint64_t path_head_ = 1;
  std::uint64_t scan_ = 1;  // lower bound on the smallest never-queried node
  std::uint64_t queries_ = 0;
};

// Walks C from node 1 until it certifies a solution. Returns the solution
// and the number of queries spent. Works against any successor oracle.
std::pair<std::uint64_t, std::uint64_t> follow_path(
    const std::function<std::uint64_t(std::uint64_t)>& query);
std::pair<std::uint64_t, std::uint64_t> follow_path(AdversaryOracle& oracle);

}  // namespace flowtrap
