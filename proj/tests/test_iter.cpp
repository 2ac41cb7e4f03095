// Successor-map instances: validation, text format, the committing
// adversary, and the path-following solver.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <vector>

#include "flowtrap/errors.hpp"
#include "flowtrap/iter.hpp"

using namespace flowtrap;

TEST_CASE("validation enforces the table shape and the first step") {
  CHECK_NOTHROW(IterInstance{2, {2, 3, 3, 4}}.validate());
  // Node 1 must move.
  CHECK_THROWS_AS((IterInstance{1, {1, 2}}.validate()), contract_violation);
  // Range and size errors.
  CHECK_THROWS_AS((IterInstance{1, {2, 3}}.validate()), contract_violation);
  CHECK_THROWS_AS((IterInstance{2, {2, 3, 3}}.validate()), contract_violation);
  CHECK_THROWS_AS((IterInstance{0, {}}.validate()), contract_violation);
}

TEST_CASE("solutions are decreasing steps or successors of fixpoints") {
  // 1 -> 2 -> 3 -> 3: node 2 points at the fixpoint 3.
  CHECK(IterInstance{2, {2, 3, 3, 4}}.solutions() ==
        std::vector<std::uint64_t>{2});
  // A decreasing step is a solution by itself.
  CHECK(IterInstance{1, {2, 1}}.solutions() == std::vector<std::uint64_t>{2});
  CHECK(IterInstance{1, {2, 2}}.solutions() == std::vector<std::uint64_t>{1});
  // Two disjoint trails can both dead-end.
  CHECK(IterInstance{2, {2, 4, 4, 4}}.solutions() ==
        std::vector<std::uint64_t>{2, 3});
}

TEST_CASE("exactly two single-bit instances exist") {
  int valid = 0;
  for (std::uint64_t a : {1, 2})
    for (std::uint64_t b : {1, 2}) {
      IterInstance inst{1, {a, b}};
      try {
        inst.validate();
        ++valid;
        CHECK(!inst.solutions().empty());
      } catch (const contract_violation&) {
      }
    }
  CHECK(valid == 2);
}

TEST_CASE("text round trip") {
  IterInstance inst{2, {2, 3, 3, 4}};
  std::ostringstream out;
  write_iter(inst, out);
  std::istringstream in(out.str());
  IterInstance back = parse_iter(in);
  CHECK(back.n == 2);
  CHECK(back.succ == inst.succ);
}

TEST_CASE("parser rejects malformed input") {
  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_iter(in), parse_error);
  };
  reject("");
  reject("0\n");
  reject("25\n");
  reject("1\n1 2\n");                  // table truncated
  reject("1\n2 1\n1 2\n");             // rows out of order
  reject("1\n1 2\n2 1 junk\n");        // trailing tokens on a row
  reject("2\n1 2\n2 3\n3 3\n");        // one row short
  reject("1\n1 2\n2 1\nextra\n");      // trailing data after the table

  // A well-formed table that is not a successor map fails validation, not
  // parsing.
  std::istringstream in("1\n1 1\n2 2\n");
  CHECK_THROWS_AS(parse_iter(in), contract_violation);
}

TEST_CASE("adversary answers follow the committing strategy") {
  AdversaryOracle adv(2);
  // Head queries extend the path to the smallest never-queried node.
  CHECK(adv.query(1) == 2);
  // Off-path nodes are pinned to self-loops.
  CHECK(adv.query(3) == 3);
  CHECK(adv.query(2) == 4);
  // The last reachable node closes into a fixpoint.
  CHECK(adv.query(4) == 4);
  CHECK(adv.queries_made() == 4);

  // Repeats stay consistent with the transcript.
  CHECK(adv.query(1) == 2);
  CHECK(adv.query(3) == 3);

  IterInstance inst = adv.materialize();
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.succ == std::vector<std::uint64_t>{2, 4, 3, 4});
}

TEST_CASE("early off-path probes only burn nodes") {
  AdversaryOracle adv(2);
  CHECK(adv.query(3) == 3);  // never on the path, immediately frozen
  CHECK(adv.query(1) == 2);  // smallest fresh node
  CHECK(adv.query(2) == 4);  // 3 is burnt, so the path skips to 4
  CHECK(adv.query(4) == 4);
}

TEST_CASE("materializing early freezes unanswered nodes as self loops") {
  AdversaryOracle adv(3);
  CHECK(adv.query(1) == 2);
  IterInstance inst = adv.materialize();
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.apply(1) == 2);
  for (std::uint64_t v = 2; v <= 8; ++v) CHECK(inst.apply(v) == v);

  // With no transcript at all, node 1 still has to move somewhere.
  AdversaryOracle blank(2);
  IterInstance none = blank.materialize();
  CHECK_NOTHROW(none.validate());
  CHECK(none.apply(1) == 2);
}

TEST_CASE("path following certifies solutions on concrete instances") {
  IterInstance chain{2, {2, 3, 3, 4}};
  auto [sol, queries] =
      follow_path([&](std::uint64_t v) { return chain.apply(v); });
  CHECK(sol == 2);
  CHECK(queries == 3);
  CHECK(chain.is_solution(sol));

  IterInstance drop{1, {2, 1}};
  auto [sol2, queries2] =
      follow_path([&](std::uint64_t v) { return drop.apply(v); });
  CHECK(sol2 == 2);
  CHECK(queries2 == 2);
}

TEST_CASE("path following against the adversary pays one query per node") {
  for (unsigned n : {1u, 3u, 6u}) {
    AdversaryOracle adv(n);
    auto [sol, queries] = follow_path(adv);
    CHECK(queries == (std::uint64_t{1} << n));
    CHECK(adv.queries_made() == queries);
    IterInstance inst = adv.materialize();
    CHECK_NOTHROW(inst.validate());
    CHECK(inst.is_solution(sol));
  }
}
