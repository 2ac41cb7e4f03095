#include "flowtrap/iter.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flowtrap/errors.hpp"

namespace flowtrap {

void IterInstance::validate() const {
  if (n == 0 || n > 24)
    throw contract_violation("instance size must satisfy 1 <= n <= 24");
  const std::uint64_t count = size();
  if (succ.size() != count)
    throw contract_violation("successor table holds " +
                             std::to_string(succ.size()) + " entries, need " +
                             std::to_string(count));
  for (std::uint64_t v = 1; v <= count; ++v) {
    std::uint64_t c = succ[v - 1];
    if (c < 1 || c > count)
      throw contract_violation("successor of " + std::to_string(v) +
                               " is out of range: " + std::to_string(c));
  }
  if (succ[0] <= 1)
    throw contract_violation("node 1 must map strictly upward");
}

bool IterInstance::is_solution(std::uint64_t v) const {
  std::uint64_t c = apply(v);
  if (c < v) return true;
  return c > v && apply(c) == c;
}

std::vector<std::uint64_t> IterInstance::solutions() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 1; v <= size(); ++v)
    if (is_solution(v)) out.push_back(v);
  return out;
}

IterInstance parse_iter(std::istream& in) {
  IterInstance inst;
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty instance stream");
  {
    std::istringstream head(line);
    long n = -1;
    if (!(head >> n) || n < 1 || n > 24)
      throw parse_error("bad instance header: '" + line + "'");
    std::string rest;
    if (head >> rest) throw parse_error("trailing data after n: '" + line + "'");
    inst.n = unsigned(n);
  }
  const std::uint64_t count = inst.size();
  inst.succ.assign(count, 0);
  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint64_t v = 0, c = 0;
    if (!(row >> v >> c)) throw parse_error("bad instance row: '" + line + "'");
    std::string rest;
    if (row >> rest) throw parse_error("trailing data in row: '" + line + "'");
    if (v < 1 || v > count)
      throw parse_error("node out of range: " + std::to_string(v));
    if (++seen != v)
      throw parse_error("rows must list nodes 1.." + std::to_string(count) +
                        " in order; got node " + std::to_string(v) +
                        " at position " + std::to_string(seen));
    inst.succ[v - 1] = c;
  }
  if (seen != count)
    throw parse_error("instance lists " + std::to_string(seen) + " of " +
                      std::to_string(count) + " nodes");
  inst.validate();
  return inst;
}

IterInstance load_iter(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open instance file: " + path);
  return parse_iter(in);
}

void write_iter(const IterInstance& inst, std::ostream& out) {
  out << inst.n << "\n";
  for (std::uint64_t v = 1; v <= inst.size(); ++v)
    out << v << " " << inst.succ[v - 1] << "\n";
}

AdversaryOracle::AdversaryOracle(unsigned n) : n_(n) {
  if (n == 0 || n > 24)
    throw contract_violation("adversary size must satisfy 1 <= n <= 24");
  answer_.assign(domain_size(), 0);
  queried_.assign(domain_size(), false);
}

std::uint64_t AdversaryOracle::query(std::uint64_t v) {
  if (v < 1 || v > domain_size())
    throw contract_violation("query out of range: " + std::to_string(v));
  ++queries_;
  if (answer_[v - 1] != 0) return answer_[v - 1];
  queried_[v - 1] = true;
  std::uint64_t ans;
  if (v == path_head_) {
    while (scan_ <= domain_size() && queried_[scan_ - 1]) ++scan_;
    ans = scan_ <= domain_size() ? scan_ : v;  // nothing fresh: dead end
    path_head_ = ans;
  } else {
    ans = v;  // off the discovered path, commit to a self-loop
  }
  answer_[v - 1] = ans;
  return ans;
}

IterInstance AdversaryOracle::materialize() const {
  IterInstance inst;
  inst.n = n_;
  inst.succ.assign(domain_size(), 0);
  for (std::uint64_t v = 1; v <= domain_size(); ++v)
    inst.succ[v - 1] = answer_[v - 1] != 0 ? answer_[v - 1] : v;
  if (inst.succ[0] <= 1) inst.succ[0] = 2;  // node 1 may never self-loop
  inst.validate();
  return inst;
}

std::pair<std::uint64_t, std::uint64_t> follow_path(
    const std::function<std::uint64_t(std::uint64_t)>& query) {
  std::uint64_t v = 1;
  std::uint64_t prev = 0;
  std::uint64_t spent = 0;
  for (;;) {
    std::uint64_t w = query(v);
    ++spent;
    if (w < v) return {v, spent};
    if (w == v) {
      if (prev == 0)
        throw contract_violation("node 1 self-loops; instance is malformed");
      return {prev, spent};  // prev maps up to a fixed point
    }
    prev = v;
    v = w;
  }
}

std::pair<std::uint64_t, std::uint64_t> follow_path(AdversaryOracle& oracle) {
  return follow_path(
      [&oracle](std::uint64_t v) { return oracle.query(v); });
}

}  // namespace flowtrap
