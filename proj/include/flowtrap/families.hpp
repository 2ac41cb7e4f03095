#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flowtrap/hardfn.hpp"
#include "flowtrap/oracle.hpp"

namespace flowtrap {

// A named benchmark target: oracle plus a canonical start point.
struct Family {
  std::string name;
  OracleSpec spec;
  Point x0;
};

// f = |x|^2 / 2, L = 1; x0 scaled so f(x0) = f0.
Family quadratic_family(std::size_t d, double f0 = 1.0);

// Separable sum of x^2/2 + 0.3 (cos(pi x) + 1): nonnegative, many local
// minima along each axis, L = 1 + 0.3 pi^2.
Family multiwell_family(std::size_t d, const Point& x0);

// Quadratic bowl with minimum outside [0,1]^2 so the constrained solution
// sits on a face: f = ((x + 0.3)^2 + (y - 0.5)^2) / 2.
Family box_quadratic_family();

// f = x_0 on the cube; projected stationarity holds on the x_0 = 0 face.
Family box_linear_family(std::size_t d);

// Terrain instance with values shifted up to keep the oracle nonnegative.
// Keeps the HardFunction alive behind the oracle closures.
struct HardFamily {
  Family family;
  std::shared_ptr<HardFunction> fn;
  double shift = 0.0;
};

HardFamily hard_family(const IterInstance& inst, bool normalize = true,
                       const Point& x0 = {});

}  // namespace flowtrap
