// Net construction, box slicing, and the sufficient-descent comparison.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "flowtrap/geometry.hpp"

using namespace flowtrap;

namespace {

std::vector<Point> all_points(const NetSpec& net) {
  std::vector<Point> out(net.size());
  for (std::uint64_t i = 0; i < net.size(); ++i) net_point(net, i, out[i]);
  return out;
}

}  // namespace

TEST_CASE("norms and lexicographic order") {
  CHECK(l2_norm({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(l2_dist({1.0, 1.0}, {4.0, 5.0}) == doctest::Approx(5.0));
  CHECK(linf_dist({0.0, 2.0}, {1.5, 2.5}) == doctest::Approx(1.5));

  CHECK(lex_less({1.0, 9.0}, {2.0, 0.0}));
  CHECK(lex_less({1.0, 2.0}, {1.0, 3.0}));
  CHECK_FALSE(lex_less({1.0, 3.0}, {1.0, 3.0}));
  CHECK_FALSE(lex_less({2.0, 0.0}, {1.0, 9.0}));
}

TEST_CASE("hyperrect geometry") {
  HyperRect r{{0.0, 1.0, -2.0}, {4.0, 1.0, 2.0}};
  CHECK(r.dim() == 3);
  CHECK(r.side(1) == 0.0);
  CHECK(r.max_side() == 4.0);
  CHECK(r.rank() == 2);
  // Equal widest sides resolve to the lowest axis.
  CHECK(r.widest_axis() == 0);
  CHECK(r.contains({0.0, 1.0, 2.0}));
  CHECK_FALSE(r.contains({0.0, 1.0 + 1e-12, 0.0}));
  Point c = r.center();
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == 1.0);
  CHECK(c[2] == doctest::Approx(0.0));
}

TEST_CASE("net on a one dimensional slice") {
  // Segment {0.5} x [0,1] at delta 0.1: five intervals, six points.
  HyperRect slice{{0.5, 0.0}, {0.5, 1.0}};
  NetSpec net = nice_delta_net(slice, 0.1);
  REQUIRE(net.size() == 6);
  CHECK(net.steps[0] == 0);
  CHECK(net.steps[1] == 5);

  std::vector<Point> pts = all_points(net);
  for (std::uint64_t i = 0; i < 6; ++i) {
    CHECK(pts[i][0] == 0.5);
    CHECK(pts[i][1] == doctest::Approx(0.2 * double(i)));
  }
  // Face points are reproduced bit-exactly, not via lo + k*h rounding.
  CHECK(pts.front()[1] == 0.0);
  CHECK(pts.back()[1] == 1.0);
}

TEST_CASE("net on a full square") {
  // [0,1]^2 at delta 0.5: sqrt(2)/1 rounds up to two intervals per axis.
  HyperRect sq{{0.0, 0.0}, {1.0, 1.0}};
  NetSpec net = nice_delta_net(sq, 0.5);
  REQUIRE(net.size() == 9);
  std::vector<Point> pts = all_points(net);
  std::set<std::pair<double, double>> got;
  for (const Point& p : pts) got.insert({p[0], p[1]});
  CHECK(got.size() == 9);
  for (double a : {0.0, 0.5, 1.0})
    for (double b : {0.0, 0.5, 1.0}) CHECK(got.count({a, b}) == 1);
}

TEST_CASE("net spacing bound and enumeration order") {
  HyperRect r{{-1.3, 0.7, 2.0}, {2.1, 0.7, 2.9}};  // rank 2, axis 1 pinned
  double delta = 0.17;
  NetSpec net = nice_delta_net(r, delta);
  double cap = 2.0 * delta / std::sqrt(2.0);
  for (std::size_t i = 0; i < 3; ++i) {
    if (r.side(i) == 0.0) {
      CHECK(net.steps[i] == 0);
    } else {
      CHECK(r.side(i) / double(net.steps[i]) <= cap + 1e-15);
    }
  }

  std::vector<Point> pts = all_points(net);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(lex_less(pts[i - 1], pts[i]));  // axis 0 most significant
    CHECK(r.contains(pts[i]));
  }
  CHECK(pts.front() == Point{-1.3, 0.7, 2.0});
  CHECK(pts.back() == Point{2.1, 0.7, 2.9});
}

TEST_CASE("splitting a box into third planes") {
  HyperRect r{{0.0, -3.0}, {1.0, 3.0}};
  auto [a, b] = rect_split_planes(r, 1);
  CHECK(a.lo == Point{0.0, -1.0});
  CHECK(a.hi == Point{1.0, -1.0});
  CHECK(b.lo == Point{0.0, 1.0});
  CHECK(b.hi == Point{1.0, 1.0});
  // Untouched axis keeps its full extent on both planes.
  CHECK(a.side(0) == 1.0);
  CHECK(b.side(0) == 1.0);
}

TEST_CASE("sufficient descent comparison is exact") {
  Point x{0.0, 0.0}, y{0.3, 0.4};  // distance 0.5
  // Needs f(y) <= f(x) - eps * 0.5 = 0.95 to be reachable.
  CHECK_FALSE(is_unreachable(1.0, 0.90, x, y, 0.1));
  CHECK(is_unreachable(1.0, 0.96, x, y, 0.1));
  // Equality sits on the reachable side; no hidden tolerance.
  CHECK_FALSE(is_unreachable(1.0, 1.0 - 0.1 * l2_dist(x, y), x, y, 0.1));
  CHECK(is_unreachable(1.0, 1.0, x, x, 0.1) == false);  // same point
}
