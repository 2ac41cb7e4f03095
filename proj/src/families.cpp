#include "flowtrap/families.hpp"

#include <cmath>

#include "flowtrap/errors.hpp"

namespace flowtrap {

Family quadratic_family(std::size_t d, double f0) {
  if (d == 0 || !(f0 >= 0.0))
    throw contract_violation("quadratic family needs d >= 1 and f0 >= 0");
  Family fam;
  fam.name = "quadratic-d" + std::to_string(d);
  fam.spec.d = d;
  fam.spec.L = 1.0;
  fam.spec.value = [](const Point& p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return 0.5 * s;
  };
  fam.spec.gradient = [](const Point& p) { return p; };
  fam.x0.assign(d, std::sqrt(2.0 * f0 / double(d)));
  return fam;
}

Family multiwell_family(std::size_t d, const Point& x0) {
  if (x0.size() != d)
    throw contract_violation("start point dimension mismatch");
  Family fam;
  fam.name = "multiwell-d" + std::to_string(d);
  fam.spec.d = d;
  const double pi = 3.14159265358979323846;
  fam.spec.L = 1.0 + 0.3 * pi * pi;
  fam.spec.value = [pi](const Point& p) {
    double s = 0.0;
    for (double v : p) s += 0.5 * v * v + 0.3 * (std::cos(pi * v) + 1.0);
    return s;
  };
  fam.spec.gradient = [pi](const Point& p) {
    Point g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      g[i] = p[i] - 0.3 * pi * std::sin(pi * p[i]);
    return g;
  };
  fam.x0 = x0;
  return fam;
}

Family box_quadratic_family() {
  Family fam;
  fam.name = "box-quadratic";
  fam.spec.d = 2;
  fam.spec.L = 1.0;
  fam.spec.domain = DomainKind::unit_cube;
  fam.spec.value = [](const Point& p) {
    double a = p[0] + 0.3, b = p[1] - 0.5;
    return 0.5 * (a * a + b * b);
  };
  fam.spec.gradient = [](const Point& p) {
    return Point{p[0] + 0.3, p[1] - 0.5};
  };
  fam.x0 = {0.5, 0.5};
  return fam;
}

Family box_linear_family(std::size_t d) {
  if (d == 0) throw contract_violation("dimension must be positive");
  Family fam;
  fam.name = "box-linear-d" + std::to_string(d);
  fam.spec.d = d;
  fam.spec.L = 1.0;  // any positive constant bounds a constant gradient
  fam.spec.domain = DomainKind::unit_cube;
  fam.spec.value = [](const Point& p) { return p[0]; };
  fam.spec.gradient = [d](const Point&) {
    Point g(d, 0.0);
    g[0] = 1.0;
    return g;
  };
  fam.x0.assign(d, 0.5);
  return fam;
}

HardFamily hard_family(const IterInstance& inst, bool normalize,
                       const Point& x0) {
  HardFamily out;
  out.fn = std::make_shared<HardFunction>(derive_params(inst, normalize));
  // Lift the range so the whole landscape clears zero; the ceiling on |f| is
  // safely below 9 once normalized.
  double bound = out.fn->value_bound();
  out.shift = normalize ? 9.0 : std::ceil(bound) + 1.0;
  OracleSpec spec = out.fn->oracle(out.shift);
  out.family.name = "terrain-n" + std::to_string(inst.n);
  out.family.spec = std::move(spec);
  if (!x0.empty()) {
    out.family.x0 = x0;
  } else {
    // A background point in the lower-left quadrant of the tile.
    double M = double(out.fn->M());
    out.family.x0 = {0.23 * M, 0.11 * M};
  }
  // Hold the function alive inside the closures handed out.
  auto keep = out.fn;
  auto value = out.family.spec.value;
  out.family.spec.value = [keep, value](const Point& p) { return value(p); };
  auto grad = out.family.spec.gradient;
  out.family.spec.gradient = [keep, grad](const Point& p) { return grad(p); };
  return out;
}

}  // namespace flowtrap
