#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <set>
#include <unordered_map>
#include <vector>

#include "flowtrap/iter.hpp"
#include "flowtrap/oracle.hpp"

namespace flowtrap {

// Height bands of the terrain. Lines in the lower half of a tile use basin
// and ridge; their mirror images in the upper half use the _upper bands; the
// top two rows of the center columns carry the seam bands that make the tile
// wrap cleanly.
enum class Band {
  background,
  basin,
  ridge,
  basin_upper,
  ridge_upper,
  seam_basin,
  seam_ridge,
};

enum class BoxSide { none, min_box, max_box };
enum class LineKind { none, run, stem, link };

struct RegionLabel {
  Band band = Band::background;
  BoxSide box = BoxSide::none;
  LineKind kind = LineKind::none;
};

struct GridCorner {
  double value = 0.0;
  double gx = 0.0;
  double gy = 0.0;
};

// Terrain geometry derived from a successor instance. The tile is an M x M
// torus; each puzzle box is an (N+1)-point square lattice of 2^n x 2^n medium
// squares of 8 cells a side.
struct HardParams {
  IterInstance inst;
  std::uint64_t N = 0;   // 8 * 2^n
  std::uint64_t M = 0;   // smallest odd integer >= 3N + 4
  double arrow = 0.5;    // magnitude of prescribed corner slopes
  bool normalize = true; // divide values and gradients by M
  // Links to drop from the layout (keyed by source node); lets tests plant a
  // dead end that the certification sweep must flag.
  std::set<std::uint64_t> omitted_links;

  double K() const { return double(M) / 2.0; }
  std::uint64_t Kl() const { return (M - 3) / 2; }  // left center column
  std::uint64_t min_box_lo() const { return 2 * N + 2; }
  std::uint64_t max_box_lo() const { return 3; }
};

HardParams derive_params(IterInstance inst, bool normalize = true);

// Region and prescribed corner data at integer lattice points of [0, M]^2.
// Rows M-1 and M of the center columns belong to the seam bands; corner
// values at the top edge repeat row 0 so the tile is exactly periodic.
RegionLabel region_label(std::int64_t a, std::int64_t b,
                         const HardParams& params);
GridCorner corner_data(std::int64_t a, std::int64_t b,
                       const HardParams& params);

// Coefficients of a bicubic patch on a unit cell, a[i][j] scaling
// s^i * t^j in cell-local coordinates.
struct CellCoeffs {
  std::array<std::array<double, 4>, 4> a{};
};

// Hermite fit matching values and prescribed slopes at the four corners,
// with zero prescribed cross-derivatives. Corner order: c00 = (lo, lo),
// c01 = (lo, hi), c10 = (hi, lo), c11 = (hi, hi).
CellCoeffs bicubic_coeffs(const GridCorner& c00, const GridCorner& c01,
                          const GridCorner& c10, const GridCorner& c11);
double cell_value(const CellCoeffs& c, double s, double t);
void cell_value_grad(const CellCoeffs& c, double s, double t, double& v,
                     double& gx, double& gy);

// The full terrain: C^1, periodic with period M in both coordinates, built
// from one bicubic patch per lattice cell. Thread-safe to evaluate.
class HardFunction {
 public:
  explicit HardFunction(HardParams params);

  const HardParams& params() const { return params_; }
  std::uint64_t M() const { return params_.M; }

  double value(double x, double y) const;
  void value_grad(double x, double y, double& v, double& gx, double& gy) const;

  double value_at(const Point& p) const { return value(p[0], p[1]); }
  Point gradient_at(const Point& p) const;

  const CellCoeffs& cell(std::uint64_t i, std::uint64_t j) const;

  // Largest |a[i][j]| across all cells.
  double coeff_bound() const;
  // Upper bound on the spectral norm of the Hessian anywhere, from cell
  // coefficients; valid as a gradient Lipschitz constant.
  double curvature_bound() const;
  // Upper bound on |f| anywhere.
  double value_bound() const;

  // Value/gradient oracle with a constant added to the values (gradients
  // unchanged); shift the range above zero for solvers that require it.
  OracleSpec oracle(double shift = 0.0) const;

 private:
  void build_cell(std::uint64_t i, std::uint64_t j, CellCoeffs& out) const;

  HardParams params_;
  double scale_ = 1.0;  // 1/M when normalized
  // Cells are precomputed for tiles small enough to afford it; larger tiles
  // memoize on demand.
  bool eager_ = true;
  std::vector<CellCoeffs> cells_;
  mutable std::unordered_map<std::uint64_t, CellCoeffs> lazy_cells_;
  mutable std::mutex lazy_mutex_;
};

// One solution-box candidate: the diagonal medium square of node u in one of
// the two puzzle boxes.
struct BoxProbe {
  std::uint64_t u = 0;
  BoxSide box = BoxSide::none;
  bool expect_pit = false;   // successor data says a trail dead-ends here
  bool found_pit = false;    // refined search got the gradient under 0.01
  double min_grad = 0.0;
  double x = 0.0, y = 0.0;   // minimizer found by the refined search
};

struct SpuriousReport {
  bool pass = false;
  double min_grad_outside = 0.0;  // over swept points outside expected boxes
  // Swept points outside every expected solution box with gradient norm
  // below 0.01: (x, y, norm).
  std::vector<std::array<double, 3>> offenders;
  std::vector<BoxProbe> probes;
  std::uint64_t points_swept = 0;
};

// Certifies the landscape: sweeps an unnormalized-gradient grid over one
// tile and runs a refined minimization inside every diagonal medium square
// of both boxes. Passes when no near-stationary point shows up outside the
// dead-end squares and each dead-end square contains one.
SpuriousReport verify_no_spurious(const HardFunction& f, double grid_step,
                                  unsigned threads = 0);

// Smallest gradient norm a refined multilevel grid search can find on the
// cell [a, a+1] x [b, b+1] fitted to the given corners.
double check_box_group(const GridCorner& c00, const GridCorner& c01,
                       const GridCorner& c10, const GridCorner& c11);

// Maps a near-stationary point back to the successor instance. valid means
// the point sits in a diagonal medium square whose trail dead-ends;
// solution is then a certified solution of the instance.
struct Decoded {
  bool valid = false;
  BoxSide box = BoxSide::none;
  std::uint64_t u = 0;
  std::uint64_t solution = 0;
};

Decoded decode_point(const HardParams& params, double x, double y);

// CSV export "x,y,value,gx,gy" on a step grid over one tile.
void export_landscape(const HardFunction& f, double step, std::ostream& out);

}  // namespace flowtrap
