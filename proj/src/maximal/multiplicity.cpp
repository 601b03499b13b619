#include "circmax/maximal/multiplicity.h"

#include "circmax/common/error.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace circmax::maximal {

std::size_t MultiplicityReport::flagged_count() const {
    return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
}

double MultiplicityReport::flagged_fraction() const {
    return flagged.empty() ? 0.0 : static_cast<double>(flagged_count()) / static_cast<double>(flagged.size());
}

namespace {

/// Lattice of pixel size h aligned to the origin and covering `box`.
Grid aligned_grid(const Box2& box, double h) {
    const double x0 = std::floor(box.lo.x() / h) * h, y0 = std::floor(box.lo.y() / h) * h;
    const int nx = std::max(1, static_cast<int>(std::ceil((box.hi.x() - x0) / h)));
    const int ny = std::max(1, static_cast<int>(std::ceil((box.hi.y() - y0) / h)));
    return {nx, ny, {{x0, y0}, {x0 + nx * h, y0 + ny * h}}};
}

Box2 annulus_box(const PhiCircle& g, double delta) {
    const double R = PhiCircle(g.phi_ptr(), g.center(), g.radius() + delta).rho_max() + delta;
    return Box2::square(g.center(), R);
}

}  // namespace

MultiplicityReport multiplicity_check(const std::vector<PhiCircle>& A, double delta, double eta, double lambda,
                                      const Window& X, const MultiplicityOptions& options) {
    if (!(delta > 0.0 && delta < lambda && lambda < 1.0)) throw PreconditionError("need delta < lambda < 1");
    if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
    if (options.cells_per_delta < 2) throw PreconditionError("need at least two counting pixels per delta");
    std::vector<double> radii;
    for (const auto& g : A) {
        if (!(g.radius() > 1.0 - options.tau && g.radius() < 1.0))
            throw PreconditionError("radius outside (1 - tau, 1)");
        radii.push_back(g.radius());
    }
    std::sort(radii.begin(), radii.end());
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (radii[k] - radii[k - 1] < delta) throw SeparationError("radii are not delta-separated");

    MultiplicityReport rep;
    rep.threshold = std::pow(delta, -eta) / (lambda * lambda);
    if (A.empty()) return rep;
    const double h = delta / options.cells_per_delta;

    Box2 cover = annulus_box(A.front(), delta);
    for (const auto& g : A) {
        const Box2 b = annulus_box(g, delta);
        cover = {cover.lo.cwiseMin(b.lo), cover.hi.cwiseMax(b.hi)};
    }
    const Box2 region = X.is_full_plane() ? cover : X.bounding_box(cover);
    const Grid G = aligned_grid(region.empty() ? Box2::square(X.center(), h) : region, h);

    std::vector<std::vector<RowRun>> runs;
    runs.reserve(A.size());
    std::vector<int> count(G.size(), 0);
    for (const auto& g : A) {
        runs.push_back(annulus_runs(G, g, delta));
        for (const auto& r : runs.back())
            for (int i = r.begin; i < r.end; ++i) ++count[static_cast<std::size_t>(r.row) * G.nx + i];
    }

    std::vector<char> in_x(G.size(), 0);
    for (int j = 0; j < G.ny; ++j)
        for (int i = 0; i < G.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * G.nx + i;
            in_x[k] = X.contains(G.cell_center(i, j));
            if (in_x[k]) rep.max_count = std::max(rep.max_count, count[k]);
        }

    const double area = G.cell_area();
    for (std::size_t a = 0; a < A.size(); ++a) {
        std::size_t heavy = 0;
        for (const auto& r : runs[a])
            for (int i = r.begin; i < r.end; ++i) {
                const std::size_t k = static_cast<std::size_t>(r.row) * G.nx + i;
                if (in_x[k] && count[k] > rep.threshold) ++heavy;
            }
        const Grid full = aligned_grid(annulus_box(A[a], delta), h);
        const double annulus = static_cast<double>(run_cells(annulus_runs(full, A[a], delta))) * area;
        rep.heavy_area.push_back(static_cast<double>(heavy) * area);
        rep.annulus_area.push_back(annulus);
        rep.flagged.push_back(rep.heavy_area.back() > lambda * annulus ? 1 : 0);
    }
    return rep;
}

std::vector<PhiCircle> separated_circles(Rng& rng, int count, double spacing, double tau, const PhiPtr& phi) {
    const int slots = static_cast<int>(std::ceil(tau / spacing)) - 1;
    if (count > slots) throw SeparationError("not enough separated radii in (1 - tau, 1)");
    std::vector<int> k(slots);
    std::iota(k.begin(), k.end(), 1);
    std::shuffle(k.begin(), k.end(), rng);
    std::vector<PhiCircle> out;
    const geometry::ParameterDomain U;
    for (int a = 0; a < count; ++a) {
        const Vec2 x(uniform(rng, U.centers.lo.x(), U.centers.hi.x()), uniform(rng, U.centers.lo.y(), U.centers.hi.y()));
        out.emplace_back(phi, x, 1.0 - k[a] * spacing);
    }
    return out;
}

}  // namespace circmax::maximal
