#include <doctest.h>

#include "circmax/arrangement/curves.h"
#include "circmax/arrangement/cutting.h"
#include "circmax/common/error.h"
#include "circmax/geometry/delta.h"
#include "circmax/harness/families.h"

#include <map>
#include <queue>
#include <set>
#include <sstream>

using namespace circmax;
using namespace circmax::arrangement;
using geometry::make_euclidean;

namespace {

const Window kPlane = Window::full_plane();

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

std::vector<TangencySurface> random_surfaces(Rng& rng, int N, double delta = 1e-3) {
    std::vector<TangencySurface> out;
    for (const auto& g : harness::random_circles(rng, N, make_euclidean()))
        out.push_back(tangency_surface(g, geometry::default_window(), delta, rng));
    return out;
}

/// Pieces of the voxel grid (pixel centers x r-levels) joined when adjacent
/// voxels have the same floor and ceiling, computed from raw sheet heights.
int voxel_components(const std::vector<TangencySurface>& surfaces, int G, int levels) {
    const double h = 0.2 / G;
    std::vector<std::pair<int, int>> label(static_cast<std::size_t>(G) * G * levels);
    for (int j = 0; j < G; ++j)
        for (int i = 0; i < G; ++i) {
            const Vec2 x(-0.1 + (i + 0.5) * h, -0.1 + (j + 0.5) * h);
            std::vector<std::pair<double, int>> st;
            for (std::size_t s = 0; s < surfaces.size(); ++s)
                for (Sheet sh : {Sheet::lower, Sheet::upper}) {
                    const double r = surfaces[s].height(sh, x);
                    if (r > 0.9 && r < 1.0) st.emplace_back(r, static_cast<int>(2 * s) + static_cast<int>(sh));
                }
            for (int k = 0; k < levels; ++k) {
                const double r = 0.9 + 0.1 * (k + 0.5) / levels;
                int below = kFloor, above = kCeiling;
                double bh = -1.0, ah = 2.0;
                for (const auto& [hh, s] : st) {
                    if (hh < r && hh > bh) bh = hh, below = s;
                    if (hh > r && hh < ah) ah = hh, above = s;
                }
                label[(static_cast<std::size_t>(k) * G + j) * G + i] = {below, above};
            }
        }
    std::vector<char> seen(label.size(), 0);
    int comps = 0;
    for (std::size_t v0 = 0; v0 < label.size(); ++v0) {
        if (seen[v0]) continue;
        ++comps;
        std::queue<std::size_t> q;
        q.push(v0);
        seen[v0] = 1;
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            const int i = static_cast<int>(v % G), j = static_cast<int>((v / G) % G), k = static_cast<int>(v / (G * G));
            const int di[6] = {1, -1, 0, 0, 0, 0}, dj[6] = {0, 0, 1, -1, 0, 0}, dk[6] = {0, 0, 0, 0, 1, -1};
            for (int d = 0; d < 6; ++d) {
                const int a = i + di[d], b = j + dj[d], c = k + dk[d];
                if (a < 0 || b < 0 || c < 0 || a >= G || b >= G || c >= levels) continue;
                const std::size_t w = (static_cast<std::size_t>(c) * G + b) * G + a;
                if (!seen[w] && label[w] == label[v]) {
                    seen[w] = 1;
                    q.push(w);
                }
            }
        }
    }
    return comps;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = std::log(x[k]), b = std::log(y[k]);
        sx += a, sy += b, sxx += a * a, sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("Euclidean cone examples") {
    const PhiCircle g(make_euclidean(), Vec2(0, 0), 0.9);
    const auto S = exact_cone(g, kPlane, 1e-3);
    CHECK(S.height(Sheet::upper, Vec2(0.05, 0)) == doctest::Approx(0.95).epsilon(1e-14));
    CHECK(S.height(Sheet::lower, Vec2(0.05, 0)) == doctest::Approx(0.85).epsilon(1e-14));
    Rng rng(1);
    for (int k = 0; k < 500; ++k) {
        const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        for (Sheet s : {Sheet::lower, Sheet::upper}) {
            const auto p = S.evaluate(s, x);
            if (!p) continue;
            CHECK(std::abs(x.norm() - std::abs(p->r - 0.9)) <= 1e-12);
            CHECK(std::abs(p->y.norm() - 0.9) <= 1e-12);
        }
    }
    // Apex clip at 4 delta.
    CHECK(std::isnan(S.height(Sheet::upper, Vec2(0.0039, 0))));
    CHECK_FALSE(std::isnan(S.height(Sheet::upper, Vec2(0.0041, 0))));
    // Window restriction: the lower sheet touches at x0 + r0 u.
    const auto W = exact_cone(g, geometry::default_window(), 1e-3);
    CHECK_FALSE(std::isnan(W.height(Sheet::lower, Vec2(0.05, 0))));
    CHECK(std::isnan(W.height(Sheet::lower, Vec2(-0.05, 0))));
    CHECK(std::isnan(W.height(Sheet::upper, Vec2(0.05, 0))));
    CHECK_FALSE(std::isnan(W.height(Sheet::upper, Vec2(-0.05, 0))));
}

TEST_CASE("offset surfaces solve the perturbed tangency system") {
    Rng rng(2);
    for (const auto& phi : {make_euclidean(), small_perturbation()}) {
        const PhiCircle g(phi, Vec2(0.01, -0.02), 0.94);
        const double delta = 1e-3;
        const auto S = tangency_surface(g, geometry::default_window(), delta, rng);
        for (double w : S.w()) {
            CHECK(w >= 0.0);
            CHECK(w < delta / kOffsetDivisor);
        }
        CHECK(S.regularity_margin(rng, Box2::square(Vec2::Zero(), 0.1)) >= kRegularityFloor);
        int checked = 0;
        for (int k = 0; k < 400; ++k) {
            const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
            for (Sheet s : {Sheet::lower, Sheet::upper}) {
                const auto p = S.evaluate(s, x);
                if (!p) continue;
                ++checked;
                CHECK(near(phi->eval(g.center(), p->y) - g.radius(), S.w()[0], 1e-9));
                CHECK(near(phi->eval(x, p->y) - p->r, S.w()[1], 1e-9));
                CHECK(near(wedge(phi->grad_y(g.center(), p->y), phi->grad_y(x, p->y)), S.w()[2], 1e-9));
                CHECK(geometry::default_window().contains(p->y));
            }
        }
        CHECK(checked > 20);
    }
    CHECK_THROWS_AS(tangency_surface(PhiCircle(make_euclidean(), Vec2(0, 0), 0.95), kPlane, 0.0, rng),
                    PreconditionError);
}

TEST_CASE("offset surface lies within delta / C of the exact cone") {
    Rng rng(3);
    const double delta = 1e-3;
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = harness::random_circles(rng, 1, make_euclidean())[0];
        const auto Sw = tangency_surface(g, kPlane, delta, rng);
        const auto S0 = exact_cone(g, kPlane, delta);
        double worst = 0.0;
        for (int k = 0; k < 60; ++k) {
            const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
            if ((x - g.center()).norm() < 10 * delta) continue;
            for (Sheet s : {Sheet::lower, Sheet::upper}) {
                const double rw = Sw.height(s, x), r0 = S0.height(s, x);
                if (!std::isnan(rw)) worst = std::max(worst, surface_distance(S0, x, rw));
                if (!std::isnan(r0)) worst = std::max(worst, surface_distance(Sw, x, r0));
            }
        }
        CHECK(worst <= delta / kOffsetDivisor);
    }
}

TEST_CASE("surface_distance examples") {
    const auto phi = make_euclidean();
    const PhiCircle g(phi, Vec2(0, 0), 0.93);
    const auto S = exact_cone(g, kPlane, 1e-4);
    // A circle on the cone.
    CHECK(surface_distance(S, PhiCircle(phi, Vec2(0.03, 0.04), 0.98)) <= 1e-9);
    // Concentric offsets: slope-one cone, distance s / sqrt(2).
    for (double s : {0.004, 0.01, 0.03}) {
        CHECK(surface_distance(S, PhiCircle(phi, Vec2(0, 0), 0.93 + s)) ==
              doctest::Approx(s / std::sqrt(2.0)).epsilon(1e-6));
        CHECK(surface_distance(S, PhiCircle(phi, Vec2(0, 0), 0.93 - s)) ==
              doctest::Approx(s / std::sqrt(2.0)).epsilon(1e-6));
    }
    // Point-to-cone distance off the axis: | |x| - |r - r0| | / sqrt(2).
    Rng rng(4);
    for (int k = 0; k < 40; ++k) {
        const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        const double r = uniform(rng, 0.9, 1.0);
        const double expect = std::abs(x.norm() - std::abs(r - 0.93)) / std::sqrt(2.0);
        if (expect < 1e-3) continue;
        CHECK(surface_distance(S, x, r) == doctest::Approx(expect).epsilon(1e-6));
        CHECK(surface_distance_lower_bound(S, x, r) <= surface_distance(S, x, r) + 1e-12);
    }
}

TEST_CASE("surface_distance is comparable to Delta") {
    Rng rng(5);
    const auto X = geometry::default_window();
    double lo = kInf, hi = 0.0;
    for (int k = 0; k < 60; ++k) {
        const auto f = harness::random_circles(rng, 2, make_euclidean());
        const auto S = tangency_surface(f[0], X, 1e-4, rng);
        const double sd = surface_distance(S, f[1]);
        const double dl = geometry::delta_fast(f[0], f[1], X);
        if (!std::isfinite(sd) || !std::isfinite(dl) || dl < 1e-3) continue;
        lo = std::min(lo, sd / dl);
        hi = std::max(hi, sd / dl);
    }
    MESSAGE("surface_distance / Delta in [" << lo << ", " << hi << "]");
    CHECK(lo > 0.2);
    CHECK(hi < 5.0);
}

TEST_CASE("vertical_sheet_span examples") {
    const auto phi = make_euclidean();
    const PhiCircle g(phi, Vec2(-0.05, 0), 0.92);
    const auto S = exact_cone(g, kPlane, 1e-4);
    Rng rng(6);
    for (int k = 0; k < 20; ++k) {
        const Vec2 x(uniform(rng, 0.0, 0.1), uniform(rng, -0.1, 0.1));
        const double d = (x - g.center()).norm();
        const double t = d / (2.0 * kSpanRatio);
        const double r = S.height(Sheet::lower, x);
        CHECK(vertical_sheet_span(S, x, r, t, 2.0));
        CHECK_FALSE(vertical_sheet_span(S, x, r, t, 0.1));
    }
    CHECK_THROWS_AS(vertical_sheet_span(S, Vec2(0, 0), 0.87, 0.05, 2.0), PreconditionError);

    const auto phip = small_perturbation();
    const auto Sp = tangency_surface(PhiCircle(phip, Vec2(-0.05, 0), 0.92), kPlane, 1e-4, rng);
    for (int k = 0; k < 10; ++k) {
        const Vec2 x(uniform(rng, 0.0, 0.1), uniform(rng, -0.1, 0.1));
        const double r = Sp.height(Sheet::lower, x);
        REQUIRE_FALSE(std::isnan(r));
        CHECK(vertical_sheet_span(Sp, x, r, (x - Vec2(-0.05, 0)).norm() / 10.0, 2.0));
    }
}

TEST_CASE("intersection curves of Euclidean cones are conics") {
    const auto phi = make_euclidean();
    const Vec2 x0(-0.02, 0.0), x1(0.02, 0.01);
    const double delta = 1e-4;
    SUBCASE("same sheets give a hyperbola branch") {
        const auto S1 = exact_cone(PhiCircle(phi, x0, 0.93), kPlane, delta);
        const auto S2 = exact_cone(PhiCircle(phi, x1, 0.94), kPlane, delta);
        const auto curves = intersection_curve(S1, S2);
        int upper = 0;
        for (const auto& tc : curves) {
            if (tc.first != Sheet::upper || tc.second != Sheet::upper) continue;
            ++upper;
            for (std::size_t i = 0; i < tc.curve.pieces.size(); ++i)
                for (std::size_t k = 0; k < tc.curve.pieces[i].points.size(); ++k) {
                    const Vec2& p = tc.curve.pieces[i].points[k];
                    // |x - x0| - |x - x1| = r1 - r0 < |x0 - x1|.
                    CHECK(near((p - x0).norm() - (p - x1).norm(), 0.01, 1e-5));
                    CHECK(tc.r[i][k] == doctest::Approx(0.93 + (p - x0).norm()).epsilon(1e-12));
                }
        }
        CHECK(upper == 1);
        CHECK(0.01 < (x0 - x1).norm());
    }
    SUBCASE("opposite sheets give an ellipse") {
        const auto S1 = exact_cone(PhiCircle(phi, x0, 0.91), kPlane, delta);
        const auto S2 = exact_cone(PhiCircle(phi, x1, 0.99), kPlane, delta);
        bool found = false;
        for (const auto& tc : intersection_curve(S1, S2)) {
            if (tc.first != Sheet::upper || tc.second != Sheet::lower) continue;
            found = true;
            REQUIRE(tc.curve.pieces.size() == 1);
            CHECK(tc.curve.pieces[0].closed);
            for (const auto& p : tc.curve.pieces[0].points)
                CHECK(near((p - x0).norm() + (p - x1).norm(), 0.08, 1e-5));
            const auto ext = extremal_points(tc.curve);
            CHECK(ext.points.size() == 2);
            // Parametric oracle: x1-extremes of the ellipse with foci x0, x1 and major axis 0.08.
            const Vec2 c = 0.5 * (x0 + x1);
            const double a = 0.04, f = 0.5 * (x1 - x0).norm(), b = std::sqrt(a * a - f * f);
            const double ang = std::atan2(x1.y() - x0.y(), x1.x() - x0.x());
            const double half = std::sqrt(a * a * std::cos(ang) * std::cos(ang) + b * b * std::sin(ang) * std::sin(ang));
            std::vector<double> xs;
            for (const auto& p : ext.points) xs.push_back(p.x());
            std::sort(xs.begin(), xs.end());
            CHECK(near(xs[0], c.x() - half, 2e-4));
            CHECK(near(xs[1], c.x() + half, 2e-4));
        }
        CHECK(found);
    }
    SUBCASE("coincident apexes and disjoint surfaces") {
        const auto S1 = exact_cone(PhiCircle(phi, x0, 0.93), kPlane, delta);
        CHECK_THROWS_AS(intersection_curve(S1, exact_cone(PhiCircle(phi, x0, 0.93), kPlane, 2 * delta)),
                        PreconditionError);
        // Nested apexes: in the full plane only an ellipse across the apex
        // line remains, and the window removes it.
        const auto X = geometry::default_window();
        const auto W1 = exact_cone(PhiCircle(phi, x0, 0.93), X, delta);
        const auto W2 = exact_cone(PhiCircle(phi, Vec2(-0.0205, 0), 0.96), X, delta);
        CHECK(intersection_curve(W1, W2).empty());
    }
}

TEST_CASE("extremal_points examples") {
    geometry::CurveSample circle;
    circle.step = 1e-3;
    geometry::Polyline ring;
    ring.closed = true;
    for (int k = 0; k < 200; ++k) ring.points.push_back(Vec2(0.01, 0.02) + 0.05 * unit_vector(2 * kPi * k / 200 + 0.1));
    circle.pieces.push_back(ring);
    const auto e = extremal_points(circle);
    REQUIRE(e.points.size() == 2);
    std::vector<double> xs{e.points[0].x(), e.points[1].x()};
    std::sort(xs.begin(), xs.end());
    CHECK(near(xs[0], -0.04, 1e-3));
    CHECK(near(xs[1], 0.06, 1e-3));
    CHECK_FALSE(e.vertical_segment);

    geometry::CurveSample seg;
    seg.step = 1e-3;
    seg.pieces.push_back({{Vec2(0.02, -0.05), Vec2(0.02, 0.0), Vec2(0.02, 0.05)}, false});
    const auto v = extremal_points(seg);
    CHECK(v.points.empty());
    CHECK(v.vertical_segment);

    CHECK_THROWS_AS(extremal_points(geometry::CurveSample{}), PreconditionError);
}

TEST_CASE("decomposition of the empty family is the box") {
    const auto D = vertical_decomposition({}, {}, {64, 3, 1e-12});
    REQUIRE(D.cells().size() == 1);
    CHECK(D.cells()[0].defining_surfaces.empty());
    CHECK(D.locate(Vec2(0.03, -0.07), 0.95) == 0);
    CHECK(D.locate(Vec2(0.03, -0.07), 0.9) == kBoundary);
    CHECK_THROWS_AS(D.locate(Vec2(0.3, 0), 0.95), PreconditionError);
}

TEST_CASE("single cone: pre-cells match a voxel flood fill and cells are connected") {
    Rng rng(8);
    for (int trial = 0; trial < 3; ++trial) {
        const auto S = random_surfaces(rng, 1);
        const auto D = vertical_decomposition(S, {}, {64, 3, 1e-12}, &rng);
        CHECK(D.precell_count() == voxel_components(D.surfaces(), 64, 400));
        std::set<int> precells;
        for (const auto& c : D.cells()) {
            precells.insert(c.precell);
            for (std::size_t k = 1; k < c.runs.size(); ++k) {
                CHECK(c.runs[k].column == c.runs[k - 1].column + 1);
                CHECK(c.runs[k].row_lo <= c.runs[k - 1].row_hi);
                CHECK(c.runs[k - 1].row_lo <= c.runs[k].row_hi);
            }
        }
        CHECK(static_cast<int>(precells.size()) == D.precell_count());
    }
}

TEST_CASE("random families: witnesses, locate oracle, defining surfaces") {
    Rng rng(9);
    const auto S = random_surfaces(rng, 8);
    const auto D = vertical_decomposition(S, {}, {}, &rng);
    for (const auto& c : D.cells()) {
        CHECK(D.locate(c.witness_x, c.witness_r) == c.id);
        CHECK(c.defining_surfaces.size() <= 6);
    }
    // Points on an input surface are boundary points.
    int on = 0;
    for (int k = 0; k < 2000 && on < 200; ++k) {
        const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        const auto& s = D.surfaces()[k % D.surfaces().size()];
        for (Sheet sh : {Sheet::lower, Sheet::upper}) {
            const double r = s.height(sh, x);
            if (r > 0.9 && r < 1.0) {
                ++on;
                CHECK(D.locate(x, r) == kBoundary);
            }
        }
    }
    CHECK(on > 20);
    // Exhaustive per-cell predicate scan.
    int boundary = 0;
    for (int k = 0; k < 100000; ++k) {
        const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        const double r = uniform(rng, 0.9, 1.0);
        const auto label = D.exact_label(x, r);
        int found = -1, count = 0;
        for (const auto& c : D.cells())
            if (D.cell_contains(c, x, label)) found = c.id, ++count;
        const int got = D.locate(x, r);
        CHECK(count <= 1);
        if (got == kBoundary) {
            ++boundary;
            CHECK(count == 0);
        } else {
            CHECK(got == found);
        }
    }
    MESSAGE("boundary fraction " << boundary / 1e5);
    CHECK(boundary < 5000);
}

TEST_CASE("source surfaces cross no cell; a surface through a witness crosses it") {
    Rng rng(10);
    const auto S = random_surfaces(rng, 5);
    const auto D = vertical_decomposition(S, {}, {48, 3, 1e-12}, &rng);
    for (const auto& c : D.cells())
        for (const auto& s : D.surfaces()) CHECK_FALSE(crosses(D, c, s));
    for (const auto& s : D.surfaces()) CHECK(crossed_cells(D, s).empty());
    const auto phi = make_euclidean();
    for (const auto& c : D.cells()) {
        // Lower sheet through the witness: r = r0 - |x - x0| with x0 = witness - (0.02, 0).
        const PhiCircle g(phi, c.witness_x - Vec2(0.02, 0), c.witness_r + 0.02);
        CHECK(crosses(D, c, exact_cone(g, kPlane, 1e-4)));
    }
}

TEST_CASE("crosses agrees with a fine-grid oracle") {
    Rng rng(12);
    const auto D = vertical_decomposition(random_surfaces(rng, 6), {}, {48, 3, 1e-12}, &rng);
    const double h = D.pixel_size();
    int agree = 0, positive = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& c = D.cells()[std::uniform_int_distribution<int>(0, static_cast<int>(D.cells().size()) - 1)(rng)];
        const auto s = random_surfaces(rng, 1)[0];
        bool oracle = false;
        for (const auto& run : c.runs)
            for (int j = run.row_lo; j <= run.row_hi && !oracle; ++j)
                for (int a = 0; a < 12 && !oracle; ++a)
                    for (int b = 0; b < 12 && !oracle; ++b) {
                        const Vec2 x = D.pixel_center(j * D.grid() + run.column) +
                                       h * Vec2((a + 0.5) / 12 - 0.5, (b + 0.5) / 12 - 0.5);
                        for (Sheet sh : {Sheet::lower, Sheet::upper}) {
                            const double r = s.height(sh, x);
                            if (r > 0.9 && r < 1.0 && D.locate(x, r) == c.id) oracle = true;
                        }
                    }
        const bool got = crosses(D, c, s);
        agree += got == oracle;
        positive += oracle;
    }
    MESSAGE("agreement " << agree << "/100, positives " << positive);
    CHECK(agree >= 97);
    CHECK(positive > 5);
}

TEST_CASE("locality: defining surfaces alone reproduce the cell at its witness") {
    Rng rng(13);
    const auto D = vertical_decomposition(random_surfaces(rng, 10), {}, {128, 3, 1e-12}, &rng);
    int tested = 0;
    for (std::size_t k = 0; k < D.cells().size(); k += std::max<std::size_t>(1, D.cells().size() / 25)) {
        const auto& c = D.cells()[k];
        std::vector<TangencySurface> subset;
        std::map<int, int> to_old;
        for (int s : c.defining_surfaces) {
            to_old[static_cast<int>(subset.size())] = s;
            subset.push_back(D.surfaces()[s]);
        }
        const auto E = vertical_decomposition(subset, {}, {128, 3, 1e-12});
        const int id = E.locate(c.witness_x, c.witness_r);
        REQUIRE(id >= 0);
        const auto& e = E.cells()[id];
        auto remap = [&](int sheet) { return sheet < 0 ? sheet : 2 * to_old.at(sheet / 2) + sheet % 2; };
        CHECK(remap(e.floor) == c.floor);
        CHECK(remap(e.ceiling) == c.ceiling);
        ++tested;
    }
    CHECK(tested >= 10);
}

TEST_CASE("cell counts grow below the cubic bound") {
    std::vector<double> Ns, counts;
    for (int N : {2, 4, 8, 16, 24}) {
        Rng rng(100 + N);
        const auto D = vertical_decomposition(random_surfaces(rng, N), {}, {128, 3, 1e-12}, &rng);
        Ns.push_back(N);
        counts.push_back(static_cast<double>(D.cells().size()));
        CHECK(static_cast<double>(D.cells().size()) <= cell_count_bound(N, 10.0));
        for (const auto& c : D.cells()) CHECK(c.defining_surfaces.size() <= 6);
    }
    const double slope = loglog_slope(Ns, counts);
    MESSAGE("cell-count exponent " << slope);
    CHECK(slope <= 3.2);
}

TEST_CASE("coincident sheets are redrawn, then rejected") {
    const auto phi = make_euclidean();
    const int G = 50;
    const double c = -0.1 + 0.5 * 0.2 / G;
    // Lower sheets of these two cones coincide on the ray x1 < -0.05 of x2 = c.
    const std::vector<TangencySurface> S{exact_cone(PhiCircle(phi, Vec2(-0.05, c), 0.92), kPlane, 1e-3),
                                         exact_cone(PhiCircle(phi, Vec2(0.0, c), 0.97), kPlane, 1e-3)};
    CHECK_THROWS_AS(vertical_decomposition(S, {}, {G, 3, 1e-12}), DegeneracyError);
    Rng rng(14);
    const auto D = vertical_decomposition(S, {}, {G, 3, 1e-12}, &rng);
    CHECK(D.retries() >= 1);
    CHECK_THROWS_AS(vertical_decomposition({S[0], S[0]}, {}, {G, 3, 1e-12}, &rng), PreconditionError);
}

TEST_CASE("export formats") {
    Rng rng(15);
    const auto D = vertical_decomposition(random_surfaces(rng, 3), {}, {32, 3, 1e-12}, &rng);
    std::ostringstream m, csv;
    write_manifest(m, D);
    write_cells_csv(csv, D);
    CHECK(m.str().find("cells = " + std::to_string(D.cells().size())) != std::string::npos);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "id,floor,ceiling,front,back,column_lo,column_hi,witness_x1,witness_x2,witness_r,defining");
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == D.cells().size());
}

TEST_CASE("cutting with every surface dividing leaves empty crossing lists") {
    Rng rng(16);
    const auto family = harness::random_circles(rng, 12, make_euclidean());
    CuttingOptions opt;
    opt.relax_precondition = true;
    opt.decomposition.grid = 64;
    const auto cut = cutting(family, 12, 1e-3, geometry::default_window(), rng, opt);
    CHECK(cut.max_crossing() == 0);
    CHECK_THROWS_AS(cutting(family, 2, 1e-3, geometry::default_window(), rng), PreconditionError);
    const std::vector<PhiCircle> copies(30, family[0]);
    CHECK_THROWS_AS(cutting(copies, 2, 1e-3, geometry::default_window(), rng), SamplingError);
}

TEST_CASE("cutting crossing lists match a direct recount") {
    Rng rng(17);
    const auto family = harness::random_circles(rng, 120, make_euclidean());
    CuttingOptions opt;
    opt.decomposition.grid = 64;
    const auto cut = cutting(family, 10, 1e-3, geometry::default_window(), rng, opt);
    std::set<int> sample(cut.sample.begin(), cut.sample.end());
    CHECK(sample.size() == 10);
    std::vector<std::size_t> recount(cut.crossing_lists.size(), 0);
    for (std::size_t idx = 0; idx < family.size(); ++idx) {
        std::set<int> cells;
        for (int p = 0; p < 64 * 64; ++p)
            for (Sheet sh : {Sheet::lower, Sheet::upper}) {
                const Vec2 x = cut.decomposition.pixel_center(p);
                const double r = cut.family_surfaces[idx].height(sh, x);
                if (r > 0.9 && r < 1.0) {
                    const int c = cut.decomposition.locate(x, r);
                    if (c >= 0) cells.insert(c);
                }
            }
        if (sample.count(static_cast<int>(idx))) {
            CHECK(cells.empty());
            continue;
        }
        for (int c : cells) ++recount[c];
    }
    for (std::size_t c = 0; c < recount.size(); ++c) CHECK(recount[c] == cut.crossing_lists[c].size());
    MESSAGE("max crossing " << cut.max_crossing() << ", mean " << cut.mean_crossing());
}

TEST_CASE("binomial quantile and tail test") {
    // Direct sums for Bin(10, 0.3): P(<= 5) = 0.9527, P(<= 6) = 0.9894, P(<= 7) = 0.9984.
    CHECK(binomial_upper_quantile(10, 0.3, 0.95) == 5);
    CHECK(binomial_upper_quantile(10, 0.3, 0.99) == 7);
    CHECK(binomial_upper_quantile(10, 0.0, 0.99) == 0);
    std::vector<TailObservation> obs;
    for (int k = 0; k < 100; ++k) obs.push_back({k % 2 ? 50 : 5, k % 10 == 0});
    const auto st = tail_test(obs, 20.0, 500, 50);
    CHECK(st.trials == 50);
    CHECK(st.avoided == 0);
    CHECK(st.bound == doctest::Approx(std::pow(0.96, 50)));
    CHECK(st.pass);
    std::vector<TailObservation> bad(100, {50, true});
    CHECK_FALSE(tail_test(bad, 20.0, 500, 50).pass);
}

TEST_CASE("partition_white examples") {
    const auto phi = make_euclidean();
    Rng rng(18);
    PartitionOptions opt;
    opt.cutting.relax_precondition = true;
    opt.cutting.decomposition.grid = 64;
    const auto X = geometry::default_window();
    SUBCASE("no tangencies and separated whites") {
        tangency::BipartitePair P;
        P.t = 0.03;
        P.delta = 1e-4;
        for (int k = 0; k < 5; ++k) P.white.emplace_back(phi, Vec2(-0.015 + 1e-5 * k, 0), 0.95 + 1e-3 * k);
        P.black.emplace_back(phi, Vec2(0.02, 0), 0.93);
        tangency::validate(P);
        const auto part = partition_white(P, 2, P.delta, X, rng, opt);
        CHECK(part.w_star.empty());
        CHECK(is_exact_partition(part, 5));
        for (const auto& g : part.groups) CHECK(g.blacks.empty());
    }
    SUBCASE("whites on a common pencil land in W*") {
        tangency::BipartitePair P;
        P.t = 0.03;
        P.delta = 1e-4;
        for (int k = 0; k < 6; ++k) P.white.emplace_back(phi, Vec2(-0.01 + 1e-3 * k, 0), 0.95 - 1e-3 * k);
        P.black.emplace_back(phi, Vec2(0.03, 0), 0.935);
        tangency::validate(P);
        const auto part = partition_white(P, 2, P.delta, X, rng, opt);
        CHECK(part.w_star.size() == 6);
        CHECK(part.groups.empty());
    }
}

TEST_CASE("partition_white on a random 200 x 200 pair is exact") {
    Rng rng(19);
    const double t = 0.03, delta = 1e-5;
    const auto P = harness::random_bipartite(rng, 200, 200, t, delta, make_euclidean());
    PartitionOptions opt;
    opt.cutting.decomposition.grid = 128;
    const auto X = geometry::default_window();
    const auto part = partition_white(P, 19, delta, X, rng, opt);
    CHECK(is_exact_partition(part, 200));
    for (const auto& g : part.groups)
        for (int b : g.blacks) {
            bool partner = false;
            for (int w : g.whites)
                if (geometry::delta_fast(P.white[w], P.black[b], X) < opt.C_tangent * delta) partner = true;
            CHECK(partner);
        }
    const double bound = 200.0 * std::log(200.0) / 19.0;
    MESSAGE("W* " << part.w_star.size() << ", groups " << part.groups.size() << ", max B_i "
                  << part.max_black_group() << ", n log n / N " << bound);
    CHECK(part.max_black_group() <= 4.0 * bound);
}
