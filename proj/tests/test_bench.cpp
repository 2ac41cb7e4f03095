// Sweep driver: slope fits, precondition checks, accuracy audit, and the
// CSV / JSON export formats.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowtrap/bench.hpp"
#include "flowtrap/errors.hpp"
#include "flowtrap/families.hpp"

using namespace flowtrap;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// f is a bowl the solver can descend, but the advertised gradient is a lie:
// constant norm 1 everywhere, so every row fails the accuracy audit.
Family lying_gradient_family() {
  Family fam;
  fam.name = "lying-gradient";
  fam.spec.d = 2;
  fam.spec.L = 1.0;
  fam.spec.B = 1.0;
  fam.spec.value = [](const Point& x) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1]);
  };
  fam.spec.gradient = [](const Point&) { return Point{1.0, 0.0}; };
  fam.x0 = {1.0, 1.0};
  return fam;
}

}  // namespace

TEST_CASE("least squares slope on an exact line") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y{1.0, 3.5, 6.0, 8.5};
  auto [slope, se] = fit_slope(x, y);
  CHECK(slope == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(se == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("slope fit reports residual spread") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y{0.0, 1.2, 1.8, 3.1};
  auto [slope, se] = fit_slope(x, y);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(se > 0.0);
}

TEST_CASE("slope fit rejects degenerate inputs") {
  CHECK_THROWS_AS(fit_slope({1.0, 2.0}, {1.0, 2.0}), contract_violation);
  CHECK_THROWS_AS(fit_slope({1.0, 2.0, 3.0}, {1.0, 2.0}), contract_violation);
  CHECK_THROWS_AS(fit_slope({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}),
                  contract_violation);
}

TEST_CASE("log-log fit recovers the exponent of a power law") {
  // queries = 1000 / eps exactly -> slope 1.
  std::vector<SweepRow> rows;
  for (double e : {1e-1, 1e-2, 1e-3, 1e-4}) {
    SweepRow r;
    r.eps = e;
    r.value_queries = std::uint64_t(std::llround(1000.0 / e));
    rows.push_back(r);
  }
  auto [slope, se] = fit_loglog_slope(rows);
  CHECK(slope == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(se < 1e-4);
}

TEST_CASE("sweep rejects short or narrow eps grids") {
  Family fam = quadratic_family(2);
  SweepConfig cfg;
  cfg.eps_list = {1e-1, 1e-2, 1e-3};
  CHECK_THROWS_AS(run_sweep(SolverId::trap_unconstrained, fam, cfg),
                  contract_violation);
  cfg.eps_list = {1e-1, 5e-2, 2e-2, 2e-3};  // 50x span only
  CHECK_THROWS_AS(run_sweep(SolverId::trap_unconstrained, fam, cfg),
                  contract_violation);
  cfg.eps_list = {1e-1, 1e-2, 1e-3, 0.0};
  CHECK_THROWS_AS(run_sweep(SolverId::trap_unconstrained, fam, cfg),
                  contract_violation);
}

TEST_CASE("quadratic sweep: sorted rows, audited accuracy, unit slope") {
  Family fam = quadratic_family(2);
  SweepConfig cfg;
  cfg.eps_list = {1e-3, 1e-1, 1e-4, 1e-2};  // deliberately shuffled
  SweepResult res = run_sweep(SolverId::trap_unconstrained, fam, cfg);

  CHECK(res.solver == "trap-unconstrained");
  CHECK(res.family == "quadratic-d2");
  REQUIRE(res.rows.size() == 4);
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i)
    CHECK(res.rows[i].eps > res.rows[i + 1].eps);
  for (const auto& r : res.rows) {
    CHECK(r.grad_norm <= r.eps);
    CHECK(r.value_queries > 0);
    CHECK(r.gradient_queries == 0);  // the trap solver never asks for one
  }
  // Tighter eps must cost more queries, and the growth is ~linear in 1/eps.
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i)
    CHECK(res.rows[i].value_queries < res.rows[i + 1].value_queries);
  CHECK(res.slope > 0.85);
  CHECK(res.slope < 1.15);

  // Same configuration, fresh counters: counts must replay exactly.
  SweepResult again = run_sweep(SolverId::trap_unconstrained, fam, cfg);
  REQUIRE(again.rows.size() == res.rows.size());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    CHECK(again.rows[i].value_queries == res.rows[i].value_queries);
    CHECK(again.rows[i].gradient_queries == res.rows[i].gradient_queries);
  }
}

TEST_CASE("gradient descent sweep counts gradient queries") {
  Family fam = quadratic_family(2);
  SweepConfig cfg;
  cfg.eps_list = {1e-1, 1e-2, 1e-3, 1e-4};
  SweepResult res = run_sweep(SolverId::gradient_descent, fam, cfg);
  REQUIRE(res.rows.size() == 4);
  for (const auto& r : res.rows) {
    CHECK(r.gradient_queries > 0);
    CHECK(r.grad_norm <= r.eps);
  }
}

TEST_CASE("sweep aborts naming the row that exhausted its budget") {
  Family fam = quadratic_family(2);
  SweepConfig cfg;
  cfg.eps_list = {1e-1, 1e-2, 1e-3, 1e-4};
  cfg.gd_max_iters = 0;  // force an immediate budget stop
  try {
    run_sweep(SolverId::gradient_descent, fam, cfg);
    FAIL("sweep accepted a budget-exhausted row");
  } catch (const invariant_violation& e) {
    std::string msg = e.what();
    CHECK(msg.find("eps=0.1") != std::string::npos);
    CHECK(msg.find("budget") != std::string::npos);
  }

  // Without the audit the sweep completes and reports the miss honestly.
  cfg.require_accuracy = false;
  SweepResult res = run_sweep(SolverId::gradient_descent, fam, cfg);
  REQUIRE(res.rows.size() == 4);
  for (const auto& r : res.rows) CHECK(r.grad_norm > r.eps);
}

TEST_CASE("sweep aborts naming the row that missed its accuracy target") {
  Family fam = lying_gradient_family();
  SweepConfig cfg;
  cfg.eps_list = {1e-1, 1e-2, 1e-3, 1e-4};
  try {
    run_sweep(SolverId::trap_unconstrained, fam, cfg);
    FAIL("sweep accepted a row with gradient norm 1");
  } catch (const invariant_violation& e) {
    std::string msg = e.what();
    CHECK(msg.find("eps=0.1") != std::string::npos);
    CHECK(msg.find("gradient norm") != std::string::npos);
  }
}

TEST_CASE("CSV export: pinned header and one line per row") {
  SweepResult res;
  res.solver = "trap-unconstrained";
  res.family = "quadratic-d2";
  res.slope = 1.04;
  res.slope_ci = 0.02;
  SweepRow a;
  a.eps = 0.1;
  a.value_queries = 123;
  a.gradient_queries = 4;
  a.grad_norm = 0.05;
  a.wall_ms = 1.5;
  SweepRow b;
  b.eps = 0.01;
  b.value_queries = 4567;
  b.gradient_queries = 0;
  b.grad_norm = 0.0025;
  b.wall_ms = 12.25;
  res.rows = {a, b};

  std::ostringstream out;
  write_csv(res, out);
  auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "eps,value_queries,gradient_queries,grad_norm,wall_ms");
  CHECK(lines[1] == "0.1,123,4,0.05,1.5");
  CHECK(lines[2] == "0.01,4567,0,0.0025,12.25");
}

TEST_CASE("JSON export: round-trips all fields") {
  SweepResult res;
  res.solver = "gradient-descent";
  res.family = "terrain-n2";
  res.slope = 2.218;
  res.slope_ci = 0.11;
  SweepRow a;
  a.eps = 0.25;
  a.value_queries = 10;
  a.gradient_queries = 11;
  a.grad_norm = 0.125;
  a.wall_ms = 3.0;
  res.rows = {a};

  std::ostringstream out;
  write_json(res, out);
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["solver"] == "gradient-descent");
  CHECK(j["family"] == "terrain-n2");
  CHECK(j["slope"].get<double>() == doctest::Approx(2.218));
  CHECK(j["slope_ci"].get<double>() == doctest::Approx(0.11));
  REQUIRE(j["rows"].size() == 1);
  const auto& row = j["rows"][0];
  CHECK(row["eps"].get<double>() == doctest::Approx(0.25));
  CHECK(row["value_queries"].get<std::uint64_t>() == 10);
  CHECK(row["gradient_queries"].get<std::uint64_t>() == 11);
  CHECK(row["grad_norm"].get<double>() == doctest::Approx(0.125));
  CHECK(row["wall_ms"].get<double>() == doctest::Approx(3.0));
}
