#pragma once

#include "circmax/common/random.h"
#include "circmax/geometry/phi_circle.h"
#include "circmax/maximal/grid_function.h"

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

namespace circmax::maximal {

using geometry::PhiCircle;
using geometry::PhiPtr;

/// Columns [begin, end) of one pixel row.
struct RowRun {
    int row = 0;
    int begin = 0;
    int end = 0;
};

/// Pixels of `grid` whose centers y satisfy |Phi(x0, y) - r0| < delta. For
/// Euclidean Phi, y - x0 is taken as (di hx + ex, dj hy + ey) where (ex, ey)
/// is the offset from x0 of the center of the pixel holding x0 and (di, dj)
/// the pixel offset, so translating x0 by whole pixels translates the set.
std::vector<RowRun> annulus_runs(const Grid& grid, const PhiCircle& g, double delta);

/// Pixel count of annulus_runs.
std::size_t run_cells(const std::vector<RowRun>& runs);

/// Indicator of the pixels of annulus_runs.
GridFunction annulus_indicator(const Grid& grid, const PhiCircle& g, double delta);

/// Throws ResolutionError when delta is under two pixels.
void check_resolution(const Grid& grid, double delta);

/// Mean of |f| over the pixels of the annulus inside the grid (0 when the
/// annulus misses the grid). Throws ResolutionError when delta < 2 pixels.
double annulus_average(const GridFunction& f, const PhiCircle& g, double delta);

struct MaximalOptions {
    /// Null means Euclidean.
    PhiPtr phi;
    /// Centers searched (U_1).
    Box2 centers = Box2::square(Vec2::Zero(), 0.1);
    /// Coarse center spacing; 0 means delta / 2.
    double spacing = 0.0;
    /// Also search the midpoints of the coarse lattice.
    bool refine = true;
    unsigned jobs = 1;
};

/// Centers searched for a given delta: the multiples of the largest power of
/// two not above the spacing that lie in the box, bisected when refining. Throws PreconditionError when the spacing exceeds delta / 2.
std::vector<Vec2> center_lattice(double delta, const MaximalOptions& options);

/// For each radius r, the largest annulus_average over the center lattice.
std::vector<double> maximal_transform(const GridFunction& f, double delta, const std::vector<double>& radii,
                                      const MaximalOptions& options = {});

/// Midpoints of `count` equal steps of [1/2, 1].
std::vector<double> radius_grid(int count = 64);

/// (sum |v|^p dr)^(1/p). Throws PreconditionError for p < 1.
double lp_norm(const std::vector<double>& values, double p, double dr);
/// Same with dr = 1 / (2 * values.size()), the step of radius_grid.
double lp_norm(const std::vector<double>& values, double p);

struct ScalingConfig {
    int radii = 64;
    MaximalOptions maximal{};
};

struct ScalingReport {
    std::vector<double> deltas;
    std::vector<double> ratios;
    /// Least-squares slope of log ratio against log(1 / delta).
    double slope = 0.0;
    double intercept = 0.0;
    /// Root mean square of the fit residuals.
    double residual = 0.0;
};

/// ||M^delta f||_3 / ||f||_3 for each delta. Throws PreconditionError unless
/// the deltas strictly decrease, ResolutionError for deltas under 2 pixels.
ScalingReport scaling_experiment(const GridFunction& f, const std::vector<double>& deltas,
                                 const ScalingConfig& config = {});
/// Same with a function built for each delta.
ScalingReport scaling_experiment(const std::function<GridFunction(double)>& make_f,
                                 const std::vector<double>& deltas, const ScalingConfig& config = {});

/// Least-squares line through (x, y); returns {slope, intercept, rms residual}.
std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// JSON text with deltas, ratios, slope, intercept and residual.
void write_report(std::ostream& os, const ScalingReport& report);

/// Indicator of the union of `count` Euclidean annuli of half-width `width`
/// through the common point `touch`, centered on the circle of radius
/// `spread` about the origin.
GridFunction annulus_bush(const Grid& grid, double width, int count = 32, const Vec2& touch = {0.7, 0.0},
                          double spread = 0.08);

/// Sum of `blobs` disks with radii log-uniform in [r_min, r_max] and heights
/// uniform in (0, 1], centered uniformly in the box shrunk by r_max.
GridFunction random_blobs(const Grid& grid, Rng& rng, int blobs, double r_min, double r_max);

/// ||M^delta f||_inf delta / ||f||_1, the constant in the trivial bound.
double trivial_ratio(const GridFunction& f, double delta, const std::vector<double>& radii,
                     const MaximalOptions& options = {});

}  // namespace circmax::maximal
