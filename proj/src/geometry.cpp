#include "flowtrap/geometry.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "flowtrap/errors.hpp"
#include "flowtrap/parallel.hpp"

namespace flowtrap {

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  static const unsigned from_env = [] {
    if (const char* s = std::getenv("FLOWTRAP_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(s, &end, 10);
      if (end != s && *end == '\0' && v > 0) return unsigned(v);
    }
    return 0u;
  }();
  if (from_env > 0) return from_env;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = thread_count(threads);
  if (workers <= 1 || n < 4096) {
    fn(0, n);
    return;
  }
  if (std::size_t(workers) > n) workers = unsigned(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = n / workers;
  std::size_t extra = n % workers;
  std::size_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t end = begin + chunk + (w < extra ? 1 : 0);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    begin = end;
  }
  for (auto& th : pool) th.join();
}

double l2_norm(const Point& p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

double l2_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double linf_dist(const Point& a, const Point& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

bool lex_less(const Point& a, const Point& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

double HyperRect::max_side() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) m = std::max(m, side(i));
  return m;
}

std::size_t HyperRect::widest_axis() const {
  std::size_t best = 0;
  double m = side(0);
  for (std::size_t i = 1; i < dim(); ++i) {
    if (side(i) > m) {
      m = side(i);
      best = i;
    }
  }
  return best;
}

std::size_t HyperRect::rank() const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < dim(); ++i)
    if (lo[i] < hi[i]) ++k;
  return k;
}

bool HyperRect::contains(const Point& p) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

Point HyperRect::center() const {
  Point c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

std::uint64_t NetSpec::size() const {
  std::uint64_t n = 1;
  for (std::uint64_t s : steps) n *= s + 1;
  return n;
}

NetSpec nice_delta_net(const HyperRect& rect, double delta) {
  if (!(delta > 0.0))
    throw contract_violation("nice_delta_net: spacing must be positive");
  NetSpec net;
  net.rect = rect;
  net.delta = delta;
  net.steps.assign(rect.dim(), 0);
  double root_k = std::sqrt(double(rect.rank()));
  for (std::size_t i = 0; i < rect.dim(); ++i) {
    double w = rect.side(i);
    if (w > 0.0)
      net.steps[i] = std::uint64_t(std::ceil(root_k * w / (2.0 * delta)));
  }
  return net;
}

void net_point(const NetSpec& net, std::uint64_t index, Point& out) {
  const std::size_t d = net.rect.dim();
  out.resize(d);
  // Mixed-radix decode, last axis fastest, so ascending index is ascending
  // lexicographic order of the points.
  for (std::size_t ri = 0; ri < d; ++ri) {
    std::size_t i = d - 1 - ri;
    std::uint64_t n = net.steps[i];
    std::uint64_t digit = index % (n + 1);
    index /= n + 1;
    if (n == 0 || digit == 0)
      out[i] = net.rect.lo[i];
    else if (digit == n)
      out[i] = net.rect.hi[i];
    else
      out[i] = net.rect.lo[i] +
               net.rect.side(i) * (double(digit) / double(n));
  }
}

std::pair<HyperRect, HyperRect> rect_split_planes(const HyperRect& rect,
                                                  std::size_t axis) {
  double w = rect.side(axis);
  HyperRect first = rect;
  HyperRect second = rect;
  double at1 = rect.lo[axis] + w / 3.0;
  double at2 = rect.hi[axis] - w / 3.0;
  first.lo[axis] = first.hi[axis] = at1;
  second.lo[axis] = second.hi[axis] = at2;
  return {first, second};
}

bool is_unreachable(double fx, double fy, const Point& x, const Point& y,
                    double eps) {
  return fy > fx - eps * l2_dist(x, y);
}

}  // namespace flowtrap
