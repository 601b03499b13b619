#pragma once

#include "circmax/common/types.h"

#include <iosfwd>
#include <vector>

namespace circmax::maximal {

/// Default pixels per side.
inline constexpr int kDefaultResolution = 1024;

/// The square [-1, 1]^2; at 1024 pixels a cell is 2^-9 wide.
inline Box2 default_domain() { return Box2::square(Vec2::Zero(), 1.0); }

/// A pixel lattice over an axis-aligned box; pixel (i, j) is column i, row j.
struct Grid {
    int nx = 0;
    int ny = 0;
    Box2 box;

    double hx() const { return box.width() / nx; }
    double hy() const { return box.height() / ny; }
    double cell_area() const { return hx() * hy(); }
    double cell_x(int i) const { return box.lo.x() + (i + 0.5) * hx(); }
    double cell_y(int j) const { return box.lo.y() + (j + 0.5) * hy(); }
    Vec2 cell_center(int i, int j) const { return {cell_x(i), cell_y(j)}; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    bool operator==(const Grid& o) const { return nx == o.nx && ny == o.ny && box.lo == o.box.lo && box.hi == o.box.hi; }
};

/// Non-negative values on a Grid, row-major.
class GridFunction {
public:
    GridFunction() = default;
    /// Throws PreconditionError for a non-positive resolution or an empty box.
    GridFunction(Grid grid, double fill = 0.0);
    GridFunction(int resolution, const Box2& box, double fill = 0.0)
        : GridFunction(Grid{resolution, resolution, box}, fill) {}

    const Grid& grid() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& at(int i, int j) { return values_[index(i, j)]; }
    double at(int i, int j) const { return values_[index(i, j)]; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.nx) + static_cast<std::size_t>(i);
    }

    /// Cell sum times cell area.
    double integral() const;
    /// (sum |f|^p * cell area)^(1/p); the max for infinite p.
    double lp_norm(double p) const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator*=(double c);

private:
    Grid grid_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction f);

/// Throws PreconditionError on grid mismatch or DomainError on a negative or
/// non-finite value.
void check_admissible(const GridFunction& f);

/// CSV: a `# grid nx ny lo_x lo_y hi_x hi_y` line, then one row of values per
/// pixel row, lowest row first.
void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is);

/// Binary: magic "CMGF", int32 nx and ny, four doubles of box, then values.
void write_binary(std::ostream& os, const GridFunction& f);
GridFunction read_binary(std::istream& is);

}  // namespace circmax::maximal
