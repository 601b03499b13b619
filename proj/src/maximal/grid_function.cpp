#include "circmax/maximal/grid_function.h"

#include "circmax/common/error.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace circmax::maximal {

GridFunction::GridFunction(Grid grid, double fill) : grid_(grid) {
    if (grid_.nx <= 0 || grid_.ny <= 0) throw PreconditionError("grid resolution must be positive");
    if (grid_.box.empty()) throw PreconditionError("grid box is empty");
    values_.assign(grid_.size(), fill);
}

double GridFunction::integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_area();
}

double GridFunction::lp_norm(double p) const {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw PreconditionError("lp_norm needs p >= 1");
    double s = 0.0;
    for (double v : values_) s += std::pow(std::abs(v), p);
    return std::pow(s * grid_.cell_area(), 1.0 / p);
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    if (!(grid_ == o.grid_)) throw PreconditionError("grid functions live on different grids");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator*(double c, GridFunction f) { return f *= c; }

void check_admissible(const GridFunction& f) {
    if (f.values().size() != f.grid().size()) throw PreconditionError("value count does not match the grid");
    for (double v : f.values())
        if (!std::isfinite(v) || v < 0.0) throw DomainError("grid function values must be finite and non-negative");
}

void write_csv(std::ostream& os, const GridFunction& f) {
    const Grid& g = f.grid();
    char buf[64];
    os << "# grid " << g.nx << ' ' << g.ny;
    for (double c : {g.box.lo.x(), g.box.lo.y(), g.box.hi.x(), g.box.hi.y()}) {
        std::snprintf(buf, sizeof buf, " %.17g", c);
        os << buf;
    }
    os << '\n';
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", f.at(i, j));
            os << buf;
        }
        os << '\n';
    }
}

GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty grid file");
    std::istringstream head(line);
    std::string hash, tag;
    Grid g;
    double lx, ly, hx, hy;
    if (!(head >> hash >> tag >> g.nx >> g.ny >> lx >> ly >> hx >> hy) || hash != "#" || tag != "grid")
        throw IoError("bad grid header: " + line);
    g.box = {{lx, ly}, {hx, hy}};
    GridFunction f(g);
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(is, line)) throw IoError("grid file ends early");
        std::istringstream row(line);
        std::string cell;
        for (int i = 0; i < g.nx; ++i) {
            if (!std::getline(row, cell, ',')) throw IoError("short grid row " + std::to_string(j));
            try {
                f.at(i, j) = std::stod(cell);
            } catch (const std::exception&) {
                throw IoError("bad grid value '" + cell + "'");
            }
        }
    }
    return f;
}

void write_binary(std::ostream& os, const GridFunction& f) {
    const Grid& g = f.grid();
    os.write("CMGF", 4);
    const std::int32_t n[2] = {g.nx, g.ny};
    os.write(reinterpret_cast<const char*>(n), sizeof n);
    const double b[4] = {g.box.lo.x(), g.box.lo.y(), g.box.hi.x(), g.box.hi.y()};
    os.write(reinterpret_cast<const char*>(b), sizeof b);
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(double)));
}

GridFunction read_binary(std::istream& is) {
    char magic[4];
    std::int32_t n[2];
    double b[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "CMGF") throw IoError("not a grid function file");
    if (!is.read(reinterpret_cast<char*>(n), sizeof n) || !is.read(reinterpret_cast<char*>(b), sizeof b))
        throw IoError("truncated grid header");
    GridFunction f(Grid{n[0], n[1], {{b[0], b[1]}, {b[2], b[3]}}});
    if (!is.read(reinterpret_cast<char*>(f.values().data()),
                 static_cast<std::streamsize>(f.values().size() * sizeof(double))))
        throw IoError("truncated grid values");
    return f;
}

}  // namespace circmax::maximal
