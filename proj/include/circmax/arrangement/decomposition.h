#pragma once

#include "circmax/arrangement/surface.h"
#include "circmax/common/random.h"

#include <iosfwd>
#include <vector>

namespace circmax::arrangement {

using geometry::ParameterDomain;

/// Sheet ids are SurfacePatch::id(); these sentinels stand for box faces
/// and for the special wall causes.
inline constexpr int kFloor = -1;
inline constexpr int kCeiling = -2;
inline constexpr int kBoxSide = -3;
/// The wall lies above the crossing of the cell's own floor and ceiling.
inline constexpr int kSheetCrossing = -4;

/// Returned by locate for points on a surface, a wall or the box boundary.
inline constexpr int kBoundary = -1;

/// Distance to a sheet below which a point counts as on the surface.
inline constexpr double kLocateTolerance = 1e-9;

/// Rows [row_lo, row_hi] of one pixel column.
struct Run {
    int column = 0;
    int row_lo = 0;
    int row_hi = 0;
};

/// {x in the pixels of `runs`, floor(x) < r < ceiling(x)}. Consecutive
/// columns carry one run each; the front (x2-low) and back (x2-high) walls
/// keep one cause along the whole cell.
struct Cell {
    int id = 0;
    int floor = kFloor;
    int ceiling = kCeiling;
    int front = kBoxSide;
    int back = kBoxSide;
    std::vector<Run> runs;
    /// Surface ids of floor, ceiling and the wall causes; at most 6.
    std::vector<int> defining_surfaces;
    Vec2 witness_x;
    double witness_r = 0.0;
    int precell = 0;

    int column_lo() const { return runs.front().column; }
    int column_hi() const { return runs.back().column; }
};

struct Wall {
    enum class Kind { plane, curve };
    Kind kind = Kind::plane;
    int cell = 0;
    /// x1 of a plane wall.
    double x1 = 0.0;
    /// Sheet id or sentinel causing a curve wall.
    int cause = kBoxSide;
};

/// Floor and ceiling sheets around (x, r) from exact sheet heights at x.
struct ExactLabel {
    int below = kFloor;
    int above = kCeiling;
    /// Within kLocateTolerance of a sheet or a box face.
    bool on_boundary = false;
};

struct DecompositionOptions {
    /// Pixels per side of the x-grid.
    int grid = 256;
    /// w redraws allowed when two sheets tie.
    int max_retries = 3;
    /// Height difference treated as a tie.
    double tie_tolerance = 1e-12;
};

class Decomposition {
public:
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Wall>& walls() const { return walls_; }
    const std::vector<TangencySurface>& surfaces() const { return surfaces_; }
    const ParameterDomain& box() const { return box_; }
    int grid() const { return grid_; }
    int precell_count() const { return precells_; }
    /// Redraw rounds used to clear ties.
    int retries() const { return retries_; }
    /// Number of (pixel, interval) pieces.
    std::size_t piece_count() const { return interval_cell_.size(); }

    /// Heights inside the open radius range, as (height, sheet id), sorted.
    std::vector<std::pair<double, int>> exact_stack(const Vec2& x) const;
    ExactLabel exact_label(const Vec2& x, double r) const;

    /// Cell id, or kBoundary on a surface, a wall or the box boundary.
    /// Throws PreconditionError outside the box.
    int locate(const Vec2& x, double r) const;
    /// A cell whose closure holds the point; ties go to the cell below at
    /// pixel resolution.
    int locate_closure(const Vec2& x, double r) const;
    /// Predicate form used for exhaustive scans.
    bool cell_contains(const Cell& c, const Vec2& x, const ExactLabel& label) const;

    int pixel_of(const Vec2& x) const;
    Vec2 pixel_center(int pixel) const;
    double pixel_size() const { return box_.centers.width() / grid_; }
    /// Cell of the pixel-center interval holding r, kBoundary within tol of a sheet.
    int cell_at_pixel(int pixel, double r, double tol = kLocateTolerance) const;

private:
    friend Decomposition vertical_decomposition(std::vector<TangencySurface>, const ParameterDomain&,
                                                const DecompositionOptions&, Rng*);

    std::vector<TangencySurface> surfaces_;
    ParameterDomain box_;
    int grid_ = 0;
    int precells_ = 0;
    int retries_ = 0;
    std::vector<Cell> cells_;
    std::vector<Wall> walls_;
    /// Stack entries of pixel p are [stack_offset_[p], stack_offset_[p + 1]).
    std::vector<std::size_t> stack_offset_;
    std::vector<double> heights_;
    std::vector<int> sheets_;
    /// Interval k of pixel p is entry stack_offset_[p] + p + k.
    std::vector<int> interval_cell_;
};

/// Vertical decomposition of the box minus the surfaces at pixel resolution.
/// Pre-cells are connected pieces with one floor and ceiling; each is cut
/// into cells wherever its column runs split, merge or change wall cause.
/// Ties between sheets trigger a w redraw of the surfaces involved (needs
/// `rng`); DegeneracyError after max_retries. PreconditionError for two
/// surfaces with the same apex.
Decomposition vertical_decomposition(std::vector<TangencySurface> surfaces, const ParameterDomain& box = {},
                                     const DecompositionOptions& options = {}, Rng* rng = nullptr);

/// True when a sample of S lies strictly inside the cell: pixel centers in
/// the cell's interior and a refined sub-grid on its boundary pixels.
bool crosses(const Decomposition& D, const Cell& c, const TangencySurface& S, int refine = 5);

/// Cells met by S at pixel centers, sorted and unique.
std::vector<int> crossed_cells(const Decomposition& D, const TangencySurface& S);

/// C * max(N, 1)^3 * log(N + 2).
double cell_count_bound(int N, double C);

/// Text manifest: surfaces, cell count, per-cell defining surfaces and witnesses.
void write_manifest(std::ostream& os, const Decomposition& D);
/// CSV with header id,floor,ceiling,front,back,column_lo,column_hi,witness_x1,witness_x2,witness_r,defining.
void write_cells_csv(std::ostream& os, const Decomposition& D);

}  // namespace circmax::arrangement
