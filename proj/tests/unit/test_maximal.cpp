#include <doctest.h>

#include "circmax/common/error.h"
#include "circmax/maximal/multiplicity.h"

#include <sstream>

using namespace circmax;
using namespace circmax::maximal;
using geometry::make_euclidean;

namespace {

geometry::PhiPtr small_perturbation() {
    const auto mons = geometry::grlex_monomials(3);
    std::vector<double> c(mons.size(), 0.0);
    Rng rng(11);
    for (std::size_t k = 0; k < mons.size(); ++k) {
        const int deg = mons[k][0] + mons[k][1] + mons[k][2] + mons[k][3];
        c[k] = (deg == 0 ? 0.0 : deg < 3 ? 0.01 : 2e-4) * uniform(rng, -1.0, 1.0);
    }
    return std::make_shared<const geometry::DefiningFunction>(geometry::DefiningFunction::perturbed(3, c));
}

Grid small_grid(int n = 256) { return {n, n, default_domain()}; }

/// Pixels whose centers lie in the annulus, by testing every pixel.
std::vector<char> brute_membership(const Grid& G, const PhiCircle& g, double delta) {
    std::vector<char> in(G.size(), 0);
    for (int j = 0; j < G.ny; ++j)
        for (int i = 0; i < G.nx; ++i) {
            const Vec2 y = G.cell_center(i, j);
            bool inside;
            if (g.phi().is_euclidean()) {
                // Offsets measured from the center of the pixel holding x0.
                const int ci = static_cast<int>(std::floor((g.center().x() - G.box.lo.x()) / G.hx()));
                const int cj = static_cast<int>(std::floor((g.center().y() - G.box.lo.y()) / G.hy()));
                const double ex = G.cell_x(ci) - g.center().x(), ey = G.cell_y(cj) - g.center().y();
                const double dx = (i - ci) * G.hx() + ex, dy = (j - cj) * G.hy() + ey;
                const double d2 = dx * dx + dy * dy, R = g.radius() + delta, q = g.radius() - delta;
                inside = d2 < R * R && (q <= 0.0 || d2 > q * q);
            } else {
                inside = std::abs(g.level(y)) < delta;
            }
            in[static_cast<std::size_t>(j) * G.nx + i] = inside;
        }
    return in;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

GridFunction random_function(Rng& rng, const Grid& G) {
    GridFunction f = random_blobs(G, rng, 40, 0.02, 0.3);
    for (double& v : f.values()) v += 0.1 * uniform(rng, 0.0, 1.0);
    return f;
}

}  // namespace

TEST_CASE("annulus runs match a full pixel scan") {
    Rng rng(3);
    const Grid G = small_grid(200);
    const auto perturbed = small_perturbation();
    for (int trial = 0; trial < 30; ++trial) {
        const bool euclid = trial % 3 != 0;
        const PhiCircle g(euclid ? make_euclidean() : perturbed, Vec2(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)),
                          uniform(rng, 0.1, 1.2));
        const double delta = uniform(rng, 0.02, 0.1);
        const auto expect = brute_membership(G, g, delta);
        std::vector<char> got(G.size(), 0);
        for (const auto& r : annulus_runs(G, g, delta))
            for (int i = r.begin; i < r.end; ++i) {
                auto& c = got[static_cast<std::size_t>(r.row) * G.nx + i];
                CHECK(c == 0);
                c = 1;
            }
        CHECK(got == expect);
    }
}

TEST_CASE("annulus average examples") {
    const Grid G = small_grid();
    const GridFunction one(G, 1.0);
    Rng rng(5);
    const auto perturbed = small_perturbation();
    for (int trial = 0; trial < 20; ++trial) {
        const PhiCircle g(trial % 2 ? make_euclidean() : perturbed, Vec2(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1)),
                          uniform(rng, 0.5, 1.0));
        const double delta = uniform(rng, 0.016, 0.06);
        CHECK(annulus_average(one, g, delta) == 1.0);
        CHECK(annulus_average(annulus_indicator(G, g, delta), g, delta) == 1.0);
    }

    const PhiCircle g(make_euclidean(), Vec2(0.03, -0.02), 0.7);
    GridFunction half(G);
    for (int j = 0; j < G.ny; ++j)
        for (int i = 0; i < G.nx; ++i) half.at(i, j) = G.cell_x(i) > 0.03 ? 1.0 : 0.0;
    CHECK(near(annulus_average(half, g, 1.0 / 32), 0.5, 0.01));

    CHECK_THROWS_AS(annulus_average(one, g, 1.0 / 256), ResolutionError);
    CHECK_NOTHROW(annulus_average(one, g, 2.0 / 128));
}

TEST_CASE("maximal transform examples") {
    const Grid G = small_grid();
    const double delta = 1.0 / 32;
    const auto radii = radius_grid(16);
    for (double v : maximal_transform(GridFunction(G, 1.0), delta, radii)) CHECK(v == 1.0);

    const auto centers = center_lattice(delta, {});
    const Vec2 x = centers[centers.size() / 3];
    const PhiCircle g(make_euclidean(), x, radii[5]);
    const auto m = maximal_transform(annulus_indicator(G, g, delta), delta, radii);
    CHECK(m[5] == 1.0);
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(m[k] <= 1.0);

    MaximalOptions coarse;
    coarse.spacing = 0.75 * delta;
    CHECK_THROWS_AS(maximal_transform(GridFunction(G, 1.0), delta, radii, coarse), PreconditionError);
}

TEST_CASE("center lattice refinement") {
    MaximalOptions o;
    o.refine = false;
    const auto coarse = center_lattice(0.04, o);
    o.refine = true;
    const auto fine = center_lattice(0.04, o);
    CHECK(coarse.size() == 13 * 13);
    CHECK(fine.size() == 25 * 25);
    for (const Vec2& c : coarse)
        CHECK(std::any_of(fine.begin(), fine.end(), [&](const Vec2& f) { return (f - c).norm() < 1e-12; }));
}

TEST_CASE("coarse and refined center grids agree within 5 percent") {
    const Grid G = small_grid();
    Rng rng(8);
    const double delta = 1.0 / 32;
    const auto radii = radius_grid(16);
    std::vector<GridFunction> corpus{annulus_bush(G, delta), random_blobs(G, rng, 30, 0.05, 0.3),
                                     random_function(rng, G)};
    MaximalOptions coarse;
    coarse.refine = false;
    for (const auto& f : corpus) {
        const auto a = maximal_transform(f, delta, radii, coarse);
        const auto b = maximal_transform(f, delta, radii);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            INFO(static_cast<int>(&f - corpus.data()), " ", k);
            CHECK(a[k] <= b[k]);
            CHECK(a[k] >= 0.95 * b[k]);
        }
    }
}

TEST_CASE("maximal transform is sublinear, homogeneous and monotone") {
    const Grid G = small_grid(128);
    const double delta = 1.0 / 16;
    const auto radii = radius_grid(16);
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const GridFunction f = random_function(rng, G), g = random_function(rng, G);
        const auto mf = maximal_transform(f, delta, radii), mg = maximal_transform(g, delta, radii);
        const auto msum = maximal_transform(f + g, delta, radii);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            CHECK(msum[k] <= (mf[k] + mg[k]) * (1.0 + 1e-12));
            CHECK(msum[k] >= mf[k] * (1.0 - 1e-12));
        }
        for (double c : {0.5, 2.0, 8.0}) {
            const auto mc = maximal_transform(c * f, delta, radii);
            for (std::size_t k = 0; k < radii.size(); ++k) CHECK(mc[k] == c * mf[k]);
        }
    }
}

TEST_CASE("lp norm closed forms") {
    const std::vector<double> one(64, 1.0);
    CHECK(near(lp_norm(one, 3.0), std::cbrt(0.5), 1e-12));
    CHECK(near(lp_norm(one, 3.0), 0.79370, 1e-5));
    std::vector<double> single(64, 0.0);
    single[17] = 3.0;
    CHECK(near(lp_norm(single, 3.0), 3.0 * std::cbrt(1.0 / 128), 1e-12));
    std::vector<double> steps(64);
    for (int k = 0; k < 64; ++k) steps[k] = k < 32 ? 1.0 : 2.0;
    CHECK(near(lp_norm(steps, 3.0), std::cbrt(0.25 * 1 + 0.25 * 8), 1e-12));
    std::vector<double> twice(steps);
    for (double& v : twice) v *= 2.0;
    CHECK(near(lp_norm(twice, 1.0), 2.0 * lp_norm(steps, 1.0), 1e-12));
    CHECK_THROWS_AS(lp_norm(one, 0.5), PreconditionError);
    const auto r = radius_grid(64);
    CHECK(near(r.front(), 0.5 + 1.0 / 256, 1e-15));
    CHECK(near(r.back(), 1.0 - 1.0 / 256, 1e-15));
}

TEST_CASE("scaling experiment") {
    const Grid G = small_grid(128);
    ScalingConfig cfg;
    cfg.radii = 16;
    const auto rep = scaling_experiment(GridFunction(G, 1.0), {1.0 / 8, 1.0 / 16, 1.0 / 32}, cfg);
    const double expect = std::cbrt(0.5) / std::cbrt(4.0);
    for (double r : rep.ratios) CHECK(near(r, expect, 1e-12));
    CHECK(near(rep.slope, 0.0, 1e-12));
    CHECK(near(rep.residual, 0.0, 1e-12));
    CHECK_THROWS_AS(scaling_experiment(GridFunction(G, 1.0), {1.0 / 16, 1.0 / 8}, cfg), PreconditionError);
    CHECK_THROWS_AS(scaling_experiment(GridFunction(G, 1.0), {1.0 / 128}, cfg), ResolutionError);

    std::ostringstream os;
    write_report(os, rep);
    CHECK(os.str().find("\"slope\"") != std::string::npos);
    CHECK(os.str().find("\"ratios\": [") != std::string::npos);

    const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(near(fit[0], 2.0, 1e-12));
    CHECK(near(fit[1], 1.0, 1e-12));
}

TEST_CASE("annulus bush meets at the common point") {
    const Grid G = small_grid(256);
    const auto f = annulus_bush(G, 1.0 / 64);
    const int i = static_cast<int>((0.7 + 1.0) / G.hx()), j = static_cast<int>(1.0 / G.hy());
    CHECK(f.at(i, j) == 1.0);
    CHECK(f.at(G.nx / 2, G.ny / 2) == 0.0);
}

TEST_CASE("trivial bound ratio stays below the annulus-area bound") {
    const Grid G = small_grid(128);
    Rng rng(4);
    const auto radii = radius_grid(16);
    for (int trial = 0; trial < 5; ++trial) {
        const auto f = random_blobs(G, rng, 3, 0.02, 0.05);
        const double ratio = trivial_ratio(f, 1.0 / 16, radii);
        CHECK(ratio > 0.0);
        // Every annulus keeps at least half its area, 2 pi r (2 delta) / 2, on the grid.
        CHECK(ratio <= 1.0 / kPi * 1.05);
    }
}

TEST_CASE("grid function io round trips") {
    Rng rng(2);
    const Grid G{7, 5, {{-1.0, -0.5}, {1.0, 0.75}}};
    GridFunction f(G);
    for (double& v : f.values()) v = uniform(rng, 0.0, 3.0);
    std::stringstream csv;
    write_csv(csv, f);
    const auto g = read_csv(csv);
    CHECK(g.grid() == G);
    CHECK(g.values() == f.values());
    std::stringstream bin;
    write_binary(bin, f);
    const auto h = read_binary(bin);
    CHECK(h.grid() == G);
    CHECK(h.values() == f.values());
    std::stringstream bad("grid 3 3 0 0 1 1\n");
    CHECK_THROWS_AS(read_csv(bad), IoError);
    CHECK(near(GridFunction(G, 2.0).integral(), 2.0 * 2.0 * 1.25, 1e-12));
}

TEST_CASE("multiplicity examples") {
    const auto phi = make_euclidean();
    const Window X = geometry::default_window();
    const auto one = multiplicity_check({PhiCircle(phi, Vec2(0.02, 0.01), 0.95)}, 1e-3, 0.1, 0.1, X);
    CHECK(one.flagged_fraction() == 0.0);
    CHECK(one.max_count == 1);
    INFO(one.annulus_area[0]);
    CHECK(near(one.annulus_area[0], 4 * kPi * 0.95 * 1e-3, 2e-3 * one.annulus_area[0]));

    std::vector<PhiCircle> rings;
    for (int k = 0; k < 100; ++k) rings.emplace_back(phi, Vec2::Zero(), 0.9995 - 1e-3 * k);
    const auto sep = multiplicity_check(rings, 1e-3 * 0.98, 0.1, 0.1, X);
    CHECK(sep.flagged_fraction() == 0.0);

    std::vector<PhiCircle> bad{PhiCircle(phi, Vec2::Zero(), 0.95), PhiCircle(phi, Vec2(0.01, 0), 0.9505)};
    CHECK_THROWS_AS(multiplicity_check(bad, 1e-3, 0.1, 0.1, X), SeparationError);
    CHECK_THROWS_AS(multiplicity_check(rings, 1e-3, 0.1, 1e-4, X), PreconditionError);
    CHECK_THROWS_AS(multiplicity_check({PhiCircle(phi, Vec2::Zero(), 0.5)}, 1e-3, 0.1, 0.1, X), PreconditionError);
}

TEST_CASE("multiplicity flags overlapping concentric annuli") {
    // Spacing delta: each point of an inner annulus lies in two annuli, so
    // with threshold below 2 every circle but the outermost two is flagged.
    const auto phi = make_euclidean();
    const double delta = 0.0099;
    std::vector<PhiCircle> rings;
    for (int k = 1; k <= 8; ++k) rings.emplace_back(phi, Vec2::Zero(), 0.995 - 0.01 * k);
    MultiplicityOptions opt;
    opt.cells_per_delta = 8;
    const auto rep = multiplicity_check(rings, delta, 0.01, 0.8, Window::full_plane(), opt);
    CHECK(rep.threshold < 2.0);
    CHECK(rep.max_count == 2);
    CHECK(rep.flagged_count() == 6);
    CHECK(!rep.flagged.front());
    CHECK(!rep.flagged.back());
}

TEST_CASE("separated circles") {
    Rng rng(9);
    const auto A = separated_circles(rng, 200, 1.001e-3, 0.25, make_euclidean());
    std::vector<double> r;
    for (const auto& g : A) r.push_back(g.radius());
    std::sort(r.begin(), r.end());
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k] - r[k - 1] >= 1e-3);
    CHECK(r.front() > 0.75);
    CHECK_THROWS_AS(separated_circles(rng, 200, 1.001e-3, 0.1, make_euclidean()), SeparationError);
}
