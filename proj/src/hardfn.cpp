#include "flowtrap/hardfn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "flowtrap/errors.hpp"
#include "flowtrap/parallel.hpp"

namespace flowtrap {

namespace {

struct Site {
  Band band = Band::background;
  BoxSide box = BoxSide::none;
  LineKind kind = LineKind::none;
  double gx = 0.0;
  double gy = 0.0;
};

// Trail rectangles in the lower half, all on integer lattice coordinates.
// The center pair of descents, the half-height crossbars, and the ascents
// that feed the bottom of the sink box.
bool in_dark_basin(std::int64_t a, std::int64_t b, const HardParams& pr) {
  const std::int64_t Kl = std::int64_t(pr.Kl());
  const std::int64_t N = std::int64_t(pr.N);
  if ((a == Kl || a == Kl + 1) && b >= 0 && b <= Kl + 1) return true;
  if ((b == Kl || b == Kl + 1) && a >= Kl && a <= 2 * N + 3) return true;
  if ((a == 2 * N + 2 || a == 2 * N + 3) && b >= Kl && b <= 2 * N + 2)
    return true;
  return false;
}

bool in_dark_ridge(std::int64_t a, std::int64_t b, const HardParams& pr) {
  const std::int64_t Kl = std::int64_t(pr.Kl());
  const std::int64_t N = std::int64_t(pr.N);
  if ((a == Kl + 2 || a == Kl + 3) && b >= 0 && b <= Kl - 1) return true;
  if ((b == Kl - 2 || b == Kl - 1) && a >= Kl + 2 && a <= 2 * N + 5)
    return true;
  if ((a == 2 * N + 4 || a == 2 * N + 5) && b >= Kl - 2 && b <= 2 * N + 2)
    return true;
  return false;
}

// Arrow rules at trail lattice points. Junction rows/columns are ordered so
// flow turns the intended way where two trail rectangles meet.
void dark_basin_grad(std::int64_t a, std::int64_t b, const HardParams& pr,
                     double& gx, double& gy) {
  const std::int64_t Kl = std::int64_t(pr.Kl());
  const std::int64_t N = std::int64_t(pr.N);
  const double d = pr.arrow;
  gx = 0.0;
  gy = 0.0;
  if (a == 2 * N + 3 && b >= Kl + 1) {
    gy = -d;  // right ascent column turns the crossbar's flow upward
  } else if (a == 2 * N + 2 && b >= Kl + 2) {
    gx = -d;
  } else if (b == Kl + 1) {
    gx = -d;  // crossbar top row carries flow right
  } else if (a == Kl) {
    gx = -d;
  } else if (b == Kl) {
    gy = -d;  // crossbar bottom row feeds the top row
  } else {
    gy = -d;  // center descent right column climbs
  }
}

void dark_ridge_grad(std::int64_t a, std::int64_t b, const HardParams& pr,
                     double& gx, double& gy) {
  const std::int64_t Kl = std::int64_t(pr.Kl());
  const std::int64_t N = std::int64_t(pr.N);
  const double d = pr.arrow;
  gx = 0.0;
  gy = 0.0;
  if (a == 2 * N + 5 && b >= Kl - 1) {
    gx = -d;
  } else if (a == 2 * N + 4 && b >= Kl) {
    gy = -d;
  } else if (b == Kl - 1) {
    gy = -d;
  } else if (a == Kl + 2) {
    gy = -d;
  } else if (b == Kl - 2) {
    gx = -d;
  } else {
    gx = -d;
  }
}

// Local layout inside the sink box, lattice coordinates (p, q) in [0, N]^2.
// Precedence: entry columns, then node trails, then cross links, then the
// bottom feed line, then box background.
Site box_site(std::int64_t p, std::int64_t q, const HardParams& pr) {
  const IterInstance& inst = pr.inst;
  const std::int64_t N = std::int64_t(pr.N);
  const double d = pr.arrow;
  Site s;
  s.box = BoxSide::min_box;

  auto four_col = [&](std::int64_t off) {
    // Column pattern of every vertical trail: two low columns pushing
    // right/up, two high columns pushing up/right.
    s.band = off < 2 ? Band::basin : Band::ridge;
    s.kind = LineKind::stem;
    if (off == 0 || off == 3)
      s.gx = -d;
    else
      s.gy = -d;
  };

  // Entry columns continue the outside ascents through the box edge.
  if (p >= 0 && p <= 3 && q >= 0 && q <= 4) {
    four_col(p);
    return s;
  }

  if (p % 8 >= 2 && p % 8 <= 5) {
    std::uint64_t u = std::uint64_t(p / 8) + 1;
    if (u >= 2 && u <= inst.size() && inst.apply(u) > u && q >= 2 &&
        q <= std::int64_t(8 * (u - 1) + 4)) {
      four_col(p % 8 - 2);
      return s;
    }
  }

  if (q % 8 == 5 || q % 8 == 6) {
    std::uint64_t u = std::uint64_t(q / 8) + 1;
    if (u <= inst.size() && inst.apply(u) > u) {
      std::uint64_t v = inst.apply(u);
      if (inst.apply(v) > v && pr.omitted_links.count(u) == 0) {
        std::int64_t lo = u == 1 ? 0 : std::int64_t(8 * (u - 1) + 2);
        std::int64_t hi = std::int64_t(8 * (v - 1) + 1);
        if (p >= lo && p <= hi) {
          s.band = Band::basin;
          s.kind = LineKind::link;
          // The two slots over the trail's up columns turn flow onto the
          // link; the rest of it carries flow right toward the next trail.
          if (q % 8 == 5 && (p == lo + 1 || p == lo + 2))
            s.gy = -d;
          else
            s.gx = -d;
          return s;
        }
      }
    }
  }

  if (q <= 1 && p <= N - 1) {
    s.band = Band::ridge;
    s.kind = LineKind::run;
    bool drop = false;
    if (q == 1 && (p % 8 == 3 || p % 8 == 4)) {
      std::uint64_t u = std::uint64_t(p / 8) + 1;
      drop = u >= 2 && u <= inst.size() && inst.apply(u) > u;
    }
    if (drop)
      s.gy = -d;
    else
      s.gx = -d;
    return s;
  }

  s.band = Band::background;
  s.gx = -d;
  return s;
}

Band mirror_band(Band b) {
  switch (b) {
    case Band::basin:
      return Band::ridge_upper;
    case Band::ridge:
      return Band::basin_upper;
    default:
      return b;
  }
}

Site classify(std::int64_t a, std::int64_t b, const HardParams& pr) {
  const std::int64_t M = std::int64_t(pr.M);
  const std::int64_t N = std::int64_t(pr.N);
  const std::int64_t Kl = std::int64_t(pr.Kl());
  const double d = pr.arrow;
  if (a < 0 || a > M || b < 0 || b > M)
    throw contract_violation("lattice point outside [0, M]^2");

  // Seam rows: keep the center columns coherent across the wrap.
  if ((b == M - 1 || b == M) && a >= Kl && a <= Kl + 3) {
    Site s;
    if (a <= Kl + 1) {
      s.band = Band::seam_basin;
      if (a == Kl)
        s.gx = -d;
      else
        s.gy = -d;
    } else {
      s.band = Band::seam_ridge;
      if (a == Kl + 2)
        s.gy = -d;
      else
        s.gx = -d;
    }
    return s;
  }

  const std::int64_t alo = std::int64_t(pr.min_box_lo());
  if (a >= alo && a <= alo + N && b >= alo && b <= alo + N)
    return box_site(a - alo, b - alo, pr);

  const std::int64_t blo = std::int64_t(pr.max_box_lo());
  if (a >= blo && a <= blo + N && b >= blo && b <= blo + N) {
    // The source box is the point reflection of the sink box with the low
    // and high bands exchanged; arrows carry over unchanged.
    Site s = box_site((M - a) - alo, (M - b) - alo, pr);
    s.band = mirror_band(s.band);
    s.box = BoxSide::max_box;
    return s;
  }

  Site s;
  if (in_dark_basin(a, b, pr)) {
    s.band = Band::basin;
    dark_basin_grad(a, b, pr, s.gx, s.gy);
    return s;
  }
  if (in_dark_ridge(a, b, pr)) {
    s.band = Band::ridge;
    dark_ridge_grad(a, b, pr, s.gx, s.gy);
    return s;
  }
  if (in_dark_basin(M - a, M - b, pr)) {
    s.band = Band::ridge_upper;
    dark_basin_grad(M - a, M - b, pr, s.gx, s.gy);
    return s;
  }
  if (in_dark_ridge(M - a, M - b, pr)) {
    s.band = Band::basin_upper;
    dark_ridge_grad(M - a, M - b, pr, s.gx, s.gy);
    return s;
  }

  s.band = Band::background;
  s.gx = -d;
  return s;
}

double band_value(Band band, double x, double y, const HardParams& pr) {
  const double M = double(pr.M);
  switch (band) {
    case Band::background:
      return -x + (x >= pr.K() ? M : 0.0);
    case Band::basin:
      return -x - y - 6.0 * M;
    case Band::ridge:
      return -x - y + 3.0 * M;
    case Band::basin_upper:
      return -x - y - 3.0 * M;
    case Band::ridge_upper:
      return -x - y + 6.0 * M;
    case Band::seam_basin:
      return -x - (y - M - 1.0) - 6.0 * M;
    case Band::seam_ridge:
      return -x - (y - M - 1.0) + 3.0 * M;
  }
  throw invariant_violation("unreachable band");
}

}  // namespace

HardParams derive_params(IterInstance inst, bool normalize) {
  inst.validate();
  HardParams pr;
  pr.N = std::uint64_t{8} << inst.n;
  pr.M = 3 * pr.N + 5;  // 3N + 4 is even, so this is the first odd value
  pr.inst = std::move(inst);
  pr.normalize = normalize;
  return pr;
}

RegionLabel region_label(std::int64_t a, std::int64_t b,
                         const HardParams& params) {
  Site s = classify(a, b, params);
  RegionLabel lab;
  lab.band = s.band;
  lab.box = s.box;
  lab.kind = s.kind;
  return lab;
}

GridCorner corner_data(std::int64_t a, std::int64_t b,
                       const HardParams& params) {
  const std::int64_t M = std::int64_t(params.M);
  // Corners repeat with period M; index M reads index 0 so cells across the
  // wrap line close up exactly.
  a = ((a % M) + M) % M;
  b = ((b % M) + M) % M;
  Site s = classify(a, b, params);
  GridCorner c;
  c.value = band_value(s.band, double(a), double(b), params);
  c.gx = s.gx;
  c.gy = s.gy;
  return c;
}

CellCoeffs bicubic_coeffs(const GridCorner& c00, const GridCorner& c01,
                          const GridCorner& c10, const GridCorner& c11) {
  const double D[4][4] = {
      {c00.value, c01.value, c00.gy, c01.gy},
      {c10.value, c11.value, c10.gy, c11.gy},
      {c00.gx, c01.gx, 0.0, 0.0},
      {c10.gx, c11.gx, 0.0, 0.0},
  };
  static const double H[4][4] = {
      {1, 0, 0, 0},
      {0, 0, 1, 0},
      {-3, 3, -2, -1},
      {2, -2, 1, 1},
  };
  double T[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += H[i][k] * D[k][j];
      T[i][j] = s;
    }
  CellCoeffs out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += T[i][k] * H[j][k];
      out.a[i][j] = s;
    }
  return out;
}

double cell_value(const CellCoeffs& c, double s, double t) {
  double v = 0.0;
  for (int i = 3; i >= 0; --i) {
    double row = 0.0;
    for (int j = 3; j >= 0; --j) row = row * t + c.a[i][j];
    v = v * s + row;
  }
  return v;
}

void cell_value_grad(const CellCoeffs& c, double s, double t, double& v,
                     double& gx, double& gy) {
  double rows[4], drows[4];
  for (int i = 0; i < 4; ++i) {
    const auto& a = c.a[i];
    rows[i] = ((a[3] * t + a[2]) * t + a[1]) * t + a[0];
    drows[i] = (3.0 * a[3] * t + 2.0 * a[2]) * t + a[1];
  }
  v = ((rows[3] * s + rows[2]) * s + rows[1]) * s + rows[0];
  gx = (3.0 * rows[3] * s + 2.0 * rows[2]) * s + rows[1];
  gy = ((drows[3] * s + drows[2]) * s + drows[1]) * s + drows[0];
}

HardFunction::HardFunction(HardParams params) : params_(std::move(params)) {
  params_.inst.validate();
  if (params_.N != (std::uint64_t{8} << params_.inst.n) ||
      params_.M != 3 * params_.N + 5)
    throw contract_violation("params disagree with their instance");
  const std::uint64_t M = params_.M;
  scale_ = params_.normalize ? 1.0 / double(M) : 1.0;
  eager_ = M <= 1024;
  if (eager_) {
    cells_.resize(M * M);
    parallel_chunks(M, 0, [&](std::size_t jb, std::size_t je) {
      for (std::size_t j = jb; j < je; ++j)
        for (std::uint64_t i = 0; i < M; ++i)
          build_cell(i, j, cells_[j * M + i]);
    });
  }
}

void HardFunction::build_cell(std::uint64_t i, std::uint64_t j,
                              CellCoeffs& out) const {
  GridCorner c00 = corner_data(std::int64_t(i), std::int64_t(j), params_);
  GridCorner c01 = corner_data(std::int64_t(i), std::int64_t(j) + 1, params_);
  GridCorner c10 = corner_data(std::int64_t(i) + 1, std::int64_t(j), params_);
  GridCorner c11 =
      corner_data(std::int64_t(i) + 1, std::int64_t(j) + 1, params_);
  out = bicubic_coeffs(c00, c01, c10, c11);
}

const CellCoeffs& HardFunction::cell(std::uint64_t i, std::uint64_t j) const {
  const std::uint64_t M = params_.M;
  if (i >= M || j >= M) throw contract_violation("cell index out of range");
  if (eager_) return cells_[j * M + i];
  std::uint64_t key = j * M + i;
  std::lock_guard<std::mutex> lock(lazy_mutex_);
  auto it = lazy_cells_.find(key);
  if (it == lazy_cells_.end()) {
    CellCoeffs c;
    build_cell(i, j, c);
    it = lazy_cells_.emplace(key, c).first;
  }
  return it->second;
}

namespace {
// Reduce a coordinate to [0, M) and split off the containing unit cell.
inline void split_cell(double x, std::uint64_t M, std::uint64_t& i,
                       double& s) {
  double Md = double(M);
  double u = x - Md * std::floor(x / Md);
  if (u >= Md) u = 0.0;  // guards against rounding at the wrap line
  double fl = std::floor(u);
  i = std::uint64_t(fl);
  if (i >= M) i = M - 1;
  s = u - fl;
}
}  // namespace

double HardFunction::value(double x, double y) const {
  std::uint64_t i, j;
  double s, t;
  split_cell(x, params_.M, i, s);
  split_cell(y, params_.M, j, t);
  return scale_ * cell_value(cell(i, j), s, t);
}

void HardFunction::value_grad(double x, double y, double& v, double& gx,
                              double& gy) const {
  std::uint64_t i, j;
  double s, t;
  split_cell(x, params_.M, i, s);
  split_cell(y, params_.M, j, t);
  cell_value_grad(cell(i, j), s, t, v, gx, gy);
  v *= scale_;
  gx *= scale_;
  gy *= scale_;
}

Point HardFunction::gradient_at(const Point& p) const {
  double v, gx, gy;
  value_grad(p[0], p[1], v, gx, gy);
  return {gx, gy};
}

double HardFunction::coeff_bound() const {
  const std::uint64_t M = params_.M;
  double best = 0.0;
  for (std::uint64_t j = 0; j < M; ++j)
    for (std::uint64_t i = 0; i < M; ++i) {
      const CellCoeffs& c = cell(i, j);
      for (const auto& row : c.a)
        for (double a : row) best = std::max(best, std::fabs(a));
    }
  return best;
}

double HardFunction::curvature_bound() const {
  const std::uint64_t M = params_.M;
  double best = 0.0;
  for (std::uint64_t j = 0; j < M; ++j)
    for (std::uint64_t i = 0; i < M; ++i) {
      const CellCoeffs& c = cell(i, j);
      double bxx = 0.0, byy = 0.0, bxy = 0.0;
      for (int ii = 0; ii < 4; ++ii)
        for (int jj = 0; jj < 4; ++jj) {
          double a = std::fabs(c.a[ii][jj]);
          if (ii >= 2) bxx += double(ii * (ii - 1)) * a;
          if (jj >= 2) byy += double(jj * (jj - 1)) * a;
          if (ii >= 1 && jj >= 1) bxy += double(ii * jj) * a;
        }
      best = std::max(best,
                      std::sqrt(bxx * bxx + 2.0 * bxy * bxy + byy * byy));
    }
  return scale_ * best;
}

double HardFunction::value_bound() const {
  const std::uint64_t M = params_.M;
  double best = 0.0;
  for (std::uint64_t j = 0; j < M; ++j)
    for (std::uint64_t i = 0; i < M; ++i) {
      const CellCoeffs& c = cell(i, j);
      double sum = 0.0;
      for (const auto& row : c.a)
        for (double a : row) sum += std::fabs(a);
      best = std::max(best, sum);
    }
  return scale_ * best;
}

OracleSpec HardFunction::oracle(double shift) const {
  OracleSpec spec;
  spec.d = 2;
  spec.L = curvature_bound();
  spec.B = value_bound() + std::fabs(shift);
  spec.domain = DomainKind::unconstrained;
  spec.value = [this, shift](const Point& p) {
    return value(p[0], p[1]) + shift;
  };
  spec.gradient = [this](const Point& p) { return gradient_at(p); };
  return spec;
}

namespace {

bool dead_ends(const IterInstance& inst, std::uint64_t u) {
  std::uint64_t v = inst.apply(u);
  return v > u && inst.apply(v) <= v;
}

// Unnormalized gradient at a real point.
void raw_grad(const HardFunction& f, double x, double y, double& gx,
              double& gy) {
  double v;
  f.value_grad(x, y, v, gx, gy);
  if (f.params().normalize) {
    gx *= double(f.params().M);
    gy *= double(f.params().M);
  }
}

// Newton on the gradient of one cell patch from a lattice of seeds; returns
// true if a zero of the gradient lies inside the cell, with its location.
bool cell_gradient_root(const CellCoeffs& c, double& rs, double& rt) {
  for (int is = 0; is < 7; ++is)
    for (int it = 0; it < 7; ++it) {
      double s = (is + 0.5) / 7.0;
      double t = (it + 0.5) / 7.0;
      bool ok = false;
      for (int iter = 0; iter < 40; ++iter) {
        double v, gx, gy;
        cell_value_grad(c, s, t, v, gx, gy);
        // Hessian entries of the patch.
        double hxx = 0.0, hyy = 0.0, hxy = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            double a = c.a[i][j];
            if (a == 0.0) continue;
            if (i >= 2)
              hxx += a * double(i * (i - 1)) * std::pow(s, i - 2) *
                     std::pow(t, j);
            if (j >= 2)
              hyy += a * double(j * (j - 1)) * std::pow(s, i) *
                     std::pow(t, j - 2);
            if (i >= 1 && j >= 1)
              hxy += a * double(i * j) * std::pow(s, i - 1) *
                     std::pow(t, j - 1);
          }
        double det = hxx * hyy - hxy * hxy;
        if (std::fabs(det) < 1e-14) break;
        double ds = (-gx * hyy + gy * hxy) / det;
        double dt = (-gy * hxx + gx * hxy) / det;
        double cap = 0.5;  // keep Newton from bouncing across the cell
        ds = std::clamp(ds, -cap, cap);
        dt = std::clamp(dt, -cap, cap);
        s += ds;
        t += dt;
        if (s < -0.25 || s > 1.25 || t < -0.25 || t > 1.25) break;
        if (std::fabs(ds) < 1e-13 && std::fabs(dt) < 1e-13) {
          ok = true;
          break;
        }
      }
      if (!ok) continue;
      double v, gx, gy;
      cell_value_grad(c, s, t, v, gx, gy);
      if (s >= -1e-9 && s <= 1.0 + 1e-9 && t >= -1e-9 && t <= 1.0 + 1e-9 &&
          std::hypot(gx, gy) < 1e-7) {
        rs = std::clamp(s, 0.0, 1.0);
        rt = std::clamp(t, 0.0, 1.0);
        return true;
      }
    }
  return false;
}

}  // namespace

double check_box_group(const GridCorner& c00, const GridCorner& c01,
                       const GridCorner& c10, const GridCorner& c11) {
  CellCoeffs c = bicubic_coeffs(c00, c01, c10, c11);
  double best = std::numeric_limits<double>::infinity();
  for (int is = 0; is <= 48; ++is)
    for (int it = 0; it <= 48; ++it) {
      double v, gx, gy;
      cell_value_grad(c, is / 48.0, it / 48.0, v, gx, gy);
      best = std::min(best, std::hypot(gx, gy));
    }
  double rs, rt;
  if (cell_gradient_root(c, rs, rt)) best = 0.0;
  return best;
}

SpuriousReport verify_no_spurious(const HardFunction& f, double grid_step,
                                  unsigned threads) {
  if (!(grid_step > 0.0))
    throw contract_violation("grid step must be positive");
  const HardParams& pr = f.params();
  const std::uint64_t M = pr.M;
  const std::uint64_t count = pr.inst.size();
  SpuriousReport rep;

  // Real-coordinate squares a near-stationary point is allowed to inhabit.
  std::vector<std::array<double, 4>> allowed;  // x0, x1, y0, y1
  for (std::uint64_t u = 1; u <= count; ++u) {
    if (!dead_ends(pr.inst, u)) continue;
    double lo = double(pr.min_box_lo()) + 8.0 * double(u - 1);
    allowed.push_back({lo, lo + 8.0, lo, lo + 8.0});
    // Its reflection through the tile center, inside the source box.
    double mlo = double(M) - (lo + 8.0);
    allowed.push_back({mlo, mlo + 8.0, mlo, mlo + 8.0});
  }
  auto in_allowed = [&](double x, double y) {
    for (const auto& r : allowed)
      if (x >= r[0] && x <= r[1] && y >= r[2] && y <= r[3]) return true;
    return false;
  };

  const std::uint64_t steps = std::uint64_t(std::ceil(double(M) / grid_step));
  rep.min_grad_outside = std::numeric_limits<double>::infinity();
  std::mutex merge;
  parallel_chunks(steps, threads, [&](std::size_t jb, std::size_t je) {
    double local_min = std::numeric_limits<double>::infinity();
    std::vector<std::array<double, 3>> local_bad;
    std::uint64_t local_n = 0;
    for (std::size_t j = jb; j < je; ++j) {
      double y = double(j) * grid_step;
      for (std::uint64_t i = 0; i < steps; ++i) {
        double x = double(i) * grid_step;
        double gx, gy;
        raw_grad(f, x, y, gx, gy);
        double g = std::hypot(gx, gy);
        ++local_n;
        if (in_allowed(x, y)) continue;
        local_min = std::min(local_min, g);
        if (g < 0.01) local_bad.push_back({x, y, g});
      }
    }
    std::lock_guard<std::mutex> lock(merge);
    rep.min_grad_outside = std::min(rep.min_grad_outside, local_min);
    rep.points_swept += local_n;
    rep.offenders.insert(rep.offenders.end(), local_bad.begin(),
                         local_bad.end());
  });

  // Refined search inside every diagonal medium square of both boxes: trails
  // that dead-end must hold a stationary point, all others must not. This
  // catches pits far too narrow for the sweep grid.
  bool probes_ok = true;
  for (int side = 0; side < 2; ++side) {
    for (std::uint64_t u = 1; u <= count; ++u) {
      BoxProbe probe;
      probe.u = u;
      probe.box = side == 0 ? BoxSide::min_box : BoxSide::max_box;
      probe.expect_pit = dead_ends(pr.inst, u);
      double alo = double(pr.min_box_lo());
      double lo = alo + 8.0 * double(u - 1);
      double x0 = lo, y0 = lo;
      if (side == 1) {
        x0 = double(M) - (lo + 8.0);
        y0 = x0;
      }
      probe.min_grad = std::numeric_limits<double>::infinity();
      for (int cj = 0; cj < 8; ++cj)
        for (int ci = 0; ci < 8; ++ci) {
          double cx = x0 + ci, cy = y0 + cj;
          std::uint64_t ii, jj;
          double s0, t0;
          split_cell(cx + 0.5, M, ii, s0);
          split_cell(cy + 0.5, M, jj, t0);
          const CellCoeffs& c = f.cell(ii, jj);
          for (int is = 0; is <= 16; ++is)
            for (int it = 0; it <= 16; ++it) {
              double v, gx, gy;
              cell_value_grad(c, is / 16.0, it / 16.0, v, gx, gy);
              double g = std::hypot(gx, gy);
              if (g < probe.min_grad) {
                probe.min_grad = g;
                probe.x = cx + is / 16.0;
                probe.y = cy + it / 16.0;
              }
            }
          double rs, rt;
          if (cell_gradient_root(c, rs, rt)) {
            probe.min_grad = 0.0;
            probe.x = cx + rs;
            probe.y = cy + rt;
          }
        }
      probe.found_pit = probe.min_grad < 0.01;
      if (probe.found_pit != probe.expect_pit) {
        probes_ok = false;
        if (probe.found_pit)
          rep.offenders.push_back({probe.x, probe.y, probe.min_grad});
      }
      rep.probes.push_back(probe);
    }
  }

  rep.pass = probes_ok && rep.offenders.empty();
  return rep;
}

Decoded decode_point(const HardParams& params, double x, double y) {
  const double M = double(params.M);
  x -= M * std::floor(x / M);
  y -= M * std::floor(y / M);
  Decoded out;
  const double alo = double(params.min_box_lo());
  const double blo = double(params.max_box_lo());
  const double N = double(params.N);
  double p, q;
  if (x >= alo && x <= alo + N && y >= alo && y <= alo + N) {
    out.box = BoxSide::min_box;
    p = x - alo;
    q = y - alo;
  } else if (x >= blo && x <= blo + N && y >= blo && y <= blo + N) {
    out.box = BoxSide::max_box;
    p = (M - x) - alo;
    q = (M - y) - alo;
  } else {
    return out;
  }
  auto band_of = [&](double w) {
    auto idx = std::int64_t(std::floor(w / 8.0));
    idx = std::clamp<std::int64_t>(idx, 0, std::int64_t(params.inst.size()) - 1);
    return std::uint64_t(idx) + 1;
  };
  std::uint64_t i = band_of(p), j = band_of(q);
  if (i != j || !dead_ends(params.inst, i)) return out;
  out.u = i;
  std::uint64_t v = params.inst.apply(i);
  out.solution = params.inst.apply(v) == v ? i : v;
  out.valid = true;
  return out;
}

void export_landscape(const HardFunction& f, double step, std::ostream& out) {
  if (!(step > 0.0)) throw contract_violation("step must be positive");
  const double M = double(f.params().M);
  out << "x,y,value,gx,gy\n";
  out << std::setprecision(12);
  std::uint64_t nx = std::uint64_t(std::floor(M / step)) + 1;
  for (std::uint64_t iy = 0; iy < nx; ++iy) {
    double y = double(iy) * step;
    for (std::uint64_t ix = 0; ix < nx; ++ix) {
      double x = double(ix) * step;
      double v, gx, gy;
      f.value_grad(x, y, v, gx, gy);
      out << x << "," << y << "," << v << "," << gx << "," << gy << "\n";
    }
  }
}

}  // namespace flowtrap
