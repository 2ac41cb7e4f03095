#pragma once

#include <cstddef>
#include <cstdint>

#include <utility>
#include <vector>

namespace flowtrap {

using Point = std::vector<double>;

double l2_norm(const Point& p);
double l2_dist(const Point& a, const Point& b);
double linf_dist(const Point& a, const Point& b);

// Strict coordinate-wise lexicographic order, axis 0 most significant.
bool lex_less(const Point& a, const Point& b);

// Axis-aligned box, possibly degenerate along some axes (lo[i] == hi[i]).
struct HyperRect {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.size(); }
  double side(std::size_t i) const { return hi[i] - lo[i]; }
  double max_side() const;
  // Lowest index attaining the maximum side length.
  std::size_t widest_axis() const;
  // Number of non-degenerate axes.
  std::size_t rank() const;
  bool contains(const Point& p) const;
  Point center() const;
};

// Uniform grid over a rect whose spacing along each non-degenerate axis is at
// most 2*delta/sqrt(rank). steps[i] is the interval count along axis i (0 on
// degenerate axes); the grid has prod(steps[i]+1) points and always includes
// every face of the rect.
struct NetSpec {
  HyperRect rect;
  double delta = 0.0;
  std::vector<std::uint64_t> steps;

  std::uint64_t size() const;
};

NetSpec nice_delta_net(const HyperRect& rect, double delta);

// Decodes the index'th net point, counting lexicographically with axis 0 most
// significant and coordinates ascending. First/last grid lines reproduce
// rect.lo / rect.hi exactly.
void net_point(const NetSpec& net, std::uint64_t index, Point& out);

// The two hyperplane slices of rect across `axis`, at one third and two
// thirds of the way up. Each is rect with that axis pinned.
std::pair<HyperRect, HyperRect> rect_split_planes(const HyperRect& rect,
                                                  std::size_t axis);

// True when candidate y fails the sufficient-descent test against pivot x,
// i.e. f(y) > f(x) - eps * |x - y|. Exact comparison, no tolerance.
bool is_unreachable(double fx, double fy, const Point& x, const Point& y,
                    double eps);

}  // namespace flowtrap
