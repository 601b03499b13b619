#include <doctest.h>

#include "circmax/common/error.h"
#include "circmax/common/random.h"
#include "circmax/geometry/conic.h"
#include "circmax/geometry/delta.h"
#include "circmax/geometry/overlap.h"
#include "oracles.h"

#include <sstream>

using namespace circmax;
using namespace circmax::geometry;

namespace {

PhiPtr small_perturbation(double scale = 1.0) {
    // Mixed linear, quadratic and cubic terms in x and y.
    const auto mons = grlex_monomials(3);
    std::vector<double> c(mons.size(), 0.0);
    Rng rng(7);
    for (std::size_t k = 0; k < mons.size(); ++k) {
        const int deg = mons[k][0] + mons[k][1] + mons[k][2] + mons[k][3];
        const double amp = deg == 0 ? 0.0 : deg == 1 ? 0.01 : deg == 2 ? 0.01 : 2e-4;
        c[k] = scale * amp * uniform(rng, -1.0, 1.0);
    }
    return std::make_shared<const DefiningFunction>(DefiningFunction::perturbed(3, c));
}

PhiCircle random_circle(const PhiPtr& phi, Rng& rng) {
    return PhiCircle(phi, Vec2(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1)), uniform(rng, 0.9, 1.0));
}

}  // namespace

TEST_CASE("eval_phi examples") {
    const auto e = DefiningFunction::euclidean();
    CHECK(e(Vec2(0, 0), Vec2(1, 0)) == 1.0);
    CHECK(e(Vec2(0.3, 0.3), Vec2(0.3, 0.3)) == 0.0);
    const auto mons = grlex_monomials(1);
    REQUIRE(mons.size() == 5);
    CHECK(mons[3] == Exponents{0, 0, 1, 0});
    const auto p = DefiningFunction::perturbed(1, {0, 0, 0, 0.01, 0});
    CHECK(p(Vec2(0, 0), Vec2(1, 0)) == doctest::Approx(1.01).epsilon(1e-15));
    CHECK_THROWS_AS(e(Vec2(0, 0), Vec2(5, 0)), DomainError);
}

TEST_CASE("grlex order is degree then descending lexicographic") {
    const auto m = grlex_monomials(2);
    REQUIRE(m.size() == 15);
    CHECK(m[0] == Exponents{0, 0, 0, 0});
    CHECK(m[1] == Exponents{1, 0, 0, 0});
    CHECK(m[4] == Exponents{0, 0, 0, 1});
    CHECK(m[5] == Exponents{2, 0, 0, 0});
    CHECK(m[6] == Exponents{1, 1, 0, 0});
    CHECK(m[14] == Exponents{0, 0, 0, 2});
}

TEST_CASE("perturbation smallness is enforced") {
    const auto mons = grlex_monomials(3);
    std::vector<double> c(mons.size(), 0.0);
    c.back() = 1.0;  // y2^3 has third derivative 6
    CHECK_THROWS_AS(DefiningFunction::perturbed(3, c), DomainError);
    c.back() = 1e-3;
    const auto p = DefiningFunction::perturbed(3, c);
    CHECK(p.c3_bound() == doctest::Approx(6e-3));
    c[2] = std::nan("");
    CHECK_THROWS_AS(DefiningFunction::perturbed(3, c), DomainError);
}

TEST_CASE("grad_y examples and singularity") {
    const auto e = DefiningFunction::euclidean();
    CHECK((e.grad_y(Vec2(0, 0), Vec2(1, 0)) - Vec2(1, 0)).norm() < 1e-15);
    CHECK((e.grad_y(Vec2(0, 0), Vec2(0, 2)) - Vec2(0, 1)).norm() < 1e-15);
    CHECK_THROWS_AS(e.grad_y(Vec2(0.2, 0.2), Vec2(0.2, 0.2)), SingularityError);
}

TEST_CASE("perturbed gradient and Hessian agree with central differences") {
    const auto phi = small_perturbation();
    Rng rng(11);
    const double h = 1e-5;
    double worst_grad = 0.0, worst_hess = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Vec2 x(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        const Vec2 y = x + uniform(rng, 0.5, 1.2) * unit_vector(uniform(rng, -kPi, kPi));
        const Vec2 g = phi->grad_y(x, y);
        Vec2 fd;
        Mat2 fh;
        for (int i = 0; i < 2; ++i) {
            Vec2 s = Vec2::Zero();
            s[i] = h;
            fd[i] = (phi->eval(x, y + s) - phi->eval(x, y - s)) / (2 * h);
            fh.col(i) = (phi->grad_y(x, y + s) - phi->grad_y(x, y - s)) / (2 * h);
        }
        worst_grad = std::max(worst_grad, (g - fd).norm() / g.norm());
        worst_hess = std::max(worst_hess, (phi->hess_y(x, y) - fh).norm() / phi->hess_y(x, y).norm());
    }
    CHECK(worst_grad <= 1e-6);
    CHECK(worst_hess <= 1e-5);
}

TEST_CASE("defining function record round trip") {
    const auto phi = small_perturbation();
    const std::string text = serialize(*phi);
    const auto back = parse_defining_function(text);
    CHECK(serialize(back) == text);
    CHECK(back.eval(Vec2(0.01, 0.02), Vec2(0.7, 0.4)) == phi->eval(Vec2(0.01, 0.02), Vec2(0.7, 0.4)));
    CHECK(parse_defining_function("kind = euclidean\n").is_euclidean());
    CHECK_THROWS_AS(parse_defining_function("kind = spline\n"), DomainError);
}

TEST_CASE("cinematic determinant") {
    const auto e = DefiningFunction::euclidean();
    CHECK(cinematic_check(e, Vec2(0, 0), Vec2(1, 0)).determinant == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cinematic_check(e, Vec2(0, 0), Vec2(0, 1)).determinant == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cinematic_check(e, Vec2(0, 0), Vec2(1, 0)).gradient_norm == doctest::Approx(1.0));
    // Rotation invariance: the determinant depends only on |a - b| (it is |a - b|^-3).
    CHECK(cinematic_check(e, Vec2(0.05, -0.02), Vec2(0.05, -0.02) + 0.9 * unit_vector(1.0)).determinant ==
          doctest::Approx(1.0 / (0.9 * 0.9 * 0.9)).epsilon(1e-6));

    const auto phi = small_perturbation(0.5);
    REQUIRE(phi->c3_bound() <= 0.01);
    double lo = kInf, hi = -kInf;
    for (double a1 : {-0.1, 0.0, 0.1})
        for (double a2 : {-0.1, 0.0, 0.1})
            for (double r : {0.92, 0.96, 0.99})
                for (double th : {-0.25, 0.0, 0.25}) {
                    const Vec2 a(a1, a2);
                    const double det = cinematic_check(*phi, a, a + r * unit_vector(th)).determinant;
                    lo = std::min(lo, det);
                    hi = std::max(hi, det);
                }
    CHECK(lo >= 0.5);
    CHECK(hi <= 1.5);
}

TEST_CASE("metric_d examples and axioms") {
    const auto e = make_euclidean();
    const PhiCircle a(e, Vec2(0, 0), 0.90), b(e, Vec2(0.05, 0), 0.95);
    CHECK(metric_d(a, b) == doctest::Approx(0.10));
    CHECK(metric_d(a, a) == 0.0);
    CHECK(metric_d(PhiCircle(e, Vec2(0.1, 0.2), 0.85), PhiCircle(e, Vec2(0.1, 0.2), 0.95)) ==
          doctest::Approx(0.10));
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const auto g = random_circle(e, rng), h = random_circle(e, rng), q = random_circle(e, rng);
        CHECK(metric_d(g, q) <= metric_d(g, h) + metric_d(h, q) + 1e-15);
        CHECK(metric_d(g, h) == metric_d(h, g));
    }
}

TEST_CASE("domain checks") {
    const auto e = make_euclidean();
    const ParameterDomain dom;
    CHECK_NOTHROW(check_domain(PhiCircle(e, Vec2(0.05, 0), 0.95), dom));
    CHECK_THROWS_AS(check_domain(PhiCircle(e, Vec2(0.2, 0), 0.95), dom), DomainError);
    CHECK_THROWS_AS(check_domain(PhiCircle(e, Vec2(0, 0), 0.9), dom), DomainError);
    CHECK_THROWS_AS(Window(Vec2(0, 0), -1.0), DomainError);
    CHECK_THROWS_AS(Window(Vec2(0, 0), 1.0, 1.5), DomainError);
    const Window w = default_window();
    CHECK(w.shrunk().radius() == doctest::Approx(0.125));
    CHECK(w.shrunk(2).radius() < w.shrunk(1).radius());
}

TEST_CASE("curve samples lie on the curve") {
    for (const auto& phi : {make_euclidean(), small_perturbation()}) {
        const PhiCircle g(phi, Vec2(0.03, -0.02), 0.93);
        const double step = 1e-3;
        const auto c = sample_curve(g, default_window(), step);
        REQUIRE(!c.empty());
        REQUIRE(c.pieces.size() == 1);
        const auto& pts = c.pieces[0].points;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            CHECK(std::abs(g.level(pts[k])) <= step);
            CHECK(default_window().contains(pts[k]));
            if (k > 0) CHECK((pts[k] - pts[k - 1]).norm() <= 2 * step);
        }
        std::ostringstream os;
        write_csv(os, c);
        CHECK(os.str().rfind("y1,y2\n", 0) == 0);
    }
    const auto full = sample_curve(PhiCircle(make_euclidean(), Vec2(0, 0), 0.9), Window::full_plane(), 1e-2);
    CHECK(full.pieces[0].closed);
    const auto miss = sample_curve(PhiCircle(make_euclidean(), Vec2(0, 0), 0.5), default_window(), 1e-2);
    CHECK(miss.empty());
}

TEST_CASE("window arcs of perturbed and Euclidean circles agree at zero perturbation") {
    const auto mons = grlex_monomials(1);
    const auto zero = std::make_shared<const DefiningFunction>(
        DefiningFunction::perturbed(1, std::vector<double>(mons.size(), 0.0)));
    const PhiCircle a(make_euclidean(), Vec2(0.02, 0.01), 0.94), b(zero, Vec2(0.02, 0.01), 0.94);
    const auto wa = window_arcs(a, default_window()), wb = window_arcs(b, default_window());
    REQUIRE(wa.size() == 1);
    REQUIRE(wb.size() == 1);
    CHECK(wrap_angle(wa[0].lo - wb[0].lo) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(wrap_angle(wa[0].hi - wb[0].hi) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("delta examples") {
    const auto e = make_euclidean();
    const Window full = Window::full_plane();
    CHECK(delta(PhiCircle(e, Vec2(0, 0), 0.90), PhiCircle(e, Vec2(0.05, 0), 0.95), full) <
          1e-7);
    CHECK(delta(PhiCircle(e, Vec2(0, 0), 0.85), PhiCircle(e, Vec2(0, 0), 0.95), full) ==
          doctest::Approx(0.10).epsilon(1e-6));
    // A curve that misses the window yields the infinite sentinel.
    CHECK(std::isinf(delta(PhiCircle(e, Vec2(0, 0), 0.5), PhiCircle(e, Vec2(0, 0), 0.95), default_window())));
}

TEST_CASE("delta matches the Euclidean closed form on random pairs") {
    const auto e = make_euclidean();
    Rng rng(2024);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const auto g = random_circle(e, rng), h = random_circle(e, rng);
        worst = std::max(worst, std::abs(delta(g, h, Window(Vec2(0, 0), 3.0)) - delta_closed_form(g, h)));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("delta symmetry, window monotonicity and fast path") {
    const auto e = make_euclidean();
    const auto p = small_perturbation();
    Rng rng(99);
    const Window X = default_window();
    for (int k = 0; k < 60; ++k) {
        const auto& phi = k % 2 ? e : p;
        const auto g = random_circle(phi, rng), h = random_circle(phi, rng);
        const double ab = delta(g, h, X), ba = delta(h, g, X);
        CHECK(ab == ba);
        const double inner = delta(g, h, X.shrunk());
        CHECK(inner + 1e-9 >= ab);
        if (phi == e) CHECK(std::abs(delta_fast(g, h, X) - ab) <= 1e-4);
    }
}

TEST_CASE("parallel normal point") {
    const auto e = make_euclidean();
    const PhiCircle g(e, Vec2(0, 0), 0.9);
    const Window right(Vec2(0.9, 0), 0.25);
    const Vec2 xi = parallel_normal_point(g, PhiCircle(e, Vec2(0.1, 0), 0.8), right);
    CHECK((xi - Vec2(0.9, 0)).norm() < 1e-9);
    // Colinearity oracle for random admissible pairs.
    Rng rng(5);
    int checked = 0;
    for (int k = 0; k < 200 && checked < 40; ++k) {
        const Vec2 xt(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        const Vec2 dir = xt.normalized();
        const double r_t = 0.9 - xt.norm() + uniform(rng, -1e-3, 1e-3);
        const Window X(0.9 * dir, 0.2);
        try {
            const Vec2 p = parallel_normal_point(g, PhiCircle(e, xt, r_t), X);
            CHECK((p - 0.9 * dir).norm() < 1e-9);
            ++checked;
        } catch (const HypothesisError&) {
        }
    }
    CHECK(checked >= 20);
    // Reflection symmetry: x~0 on the y-axis puts xi on the y-axis.
    const Vec2 up = parallel_normal_point(g, PhiCircle(e, Vec2(0, 0.08), 0.82), Window(Vec2(0, 0.9), 0.25));
    CHECK(std::abs(up.x()) < 1e-9);
    CHECK(up.y() > 0);
    CHECK_THROWS_AS(parallel_normal_point(g, PhiCircle(e, Vec2(0, 0), 0.95), right), HypothesisError);
    // Full plane contains both antipodal solutions.
    CHECK_THROWS_AS(parallel_normal_point(g, PhiCircle(e, Vec2(0.1, 0), 0.8), Window(Vec2(0, 0), 2.0)),
                    NonUniqueError);
}

TEST_CASE("annulus overlap area") {
    const auto e = make_euclidean();
    Rng rng(17);
    const double d = 1e-3;
    const PhiCircle g(e, Vec2(0, 0), 0.9);
    const auto same = annulus_overlap_area(g, g, d, Window::full_plane(), 200000, rng);
    CHECK(std::abs(same.estimate - 4 * kPi * 0.9 * d) <= 3 * same.std_error + 1e-12);
    // Transversal pair against the exact inclusion-exclusion area.
    const PhiCircle h(e, Vec2(0.1, 0), 0.9);
    const auto tr = annulus_overlap_area(g, h, d, Window::full_plane(), 400000, rng);
    const double exact = oracle::annulus_intersection_area(g.center(), 0.9, h.center(), 0.9, d);
    CHECK(std::abs(tr.estimate - exact) <= 3 * tr.std_error);
    // Random transversal pairs inside the window are estimated without bias.
    int outliers = 0;
    for (int k = 0; k < 20; ++k) {
        const auto a = random_circle(e, rng), b = random_circle(e, rng);
        const auto est = annulus_overlap_area(a, b, 5e-3, Window::full_plane(), 50000, rng);
        const double ex = oracle::annulus_intersection_area(a.center(), a.radius(), b.center(), b.radius(), 5e-3);
        outliers += std::abs(est.estimate - ex) > 4 * est.std_error + 1e-12;
    }
    CHECK(outliers <= 1);
    CHECK(enclosing_ring(g, d, default_window()).area() < 0.1 * enclosing_ring(g, d, Window::full_plane()).area());
}

TEST_CASE("overlap diameter") {
    const auto e = make_euclidean();
    const PhiCircle g(e, Vec2(0, 0), 0.9);
    const double d = 1e-3;
    CHECK(overlap_diameter(g, g, d, Window::full_plane()) == doctest::Approx(2 * (0.9 + d)).epsilon(d));
    CHECK(overlap_diameter(g, PhiCircle(e, Vec2(0, 0), 0.95), d, Window::full_plane()) == 0.0);
    // Brute-force grid oracle: all positive points, all pairs.
    Rng rng(8);
    for (int k = 0; k < 5; ++k) {
        const auto a = random_circle(e, rng);
        const auto b = PhiCircle(e, a.center() + Vec2(0.02, 0.01), a.radius() + uniform(rng, 0.0, 0.03));
        const Window X(a.center() + a.radius() * unit_vector(uniform(rng, -1, 1)), 0.08);
        const double step = 0.5 * 2e-3;
        const auto ext = overlap_row_extremes(a, b, 2e-3, X, step);
        std::vector<Vec2> all;
        const Box2 box = Box2::square(X.center(), X.radius());
        for (double y = box.lo.y(); y <= box.hi.y(); y += step)
            for (double x = box.lo.x(); x <= box.hi.x(); x += step) {
                const Vec2 p(x, y);
                if (X.contains(p) && a.in_neighborhood(p, 2e-3) && b.in_neighborhood(p, 2e-3)) all.push_back(p);
            }
        double brute = 0.0;
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j) brute = std::max(brute, (all[i] - all[j]).norm());
        CHECK(std::abs(overlap_diameter(a, b, 2e-3, X) - brute) <= 2 * step);
        CHECK(!ext.empty() == !all.empty());
    }
}

TEST_CASE("phi conic classification") {
    const auto e = DefiningFunction::euclidean();
    const Vec2 x(-0.3, 0.0), xt(0.3, 0.1);
    const double f = (x - xt).norm();
    const auto ellipse = phi_conic(e, x, xt, +1, f + 0.5, Window::full_plane(), 4e-3);
    REQUIRE(ellipse.pieces.size() == 1);
    CHECK(ellipse.pieces[0].closed);
    for (const auto& p : ellipse.pieces[0].points)
        CHECK(std::abs((p - x).norm() + (p - xt).norm() - (f + 0.5)) < 1e-4);
    const auto hyper = phi_conic(e, x, xt, -1, 0.5 * f, Window::full_plane(), 4e-3);
    REQUIRE(hyper.pieces.size() == 1);
    CHECK(!hyper.pieces[0].closed);
    for (const auto& p : hyper.pieces[0].points) CHECK(std::abs((p - x).norm() - (p - xt).norm() - 0.5 * f) < 1e-4);
    const auto seg = phi_conic(e, x, xt, +1, f, Window::full_plane(), 4e-3);
    CHECK(seg.degenerate);
    REQUIRE(seg.pieces.size() == 1);
    CHECK((seg.pieces[0].points.front() - x).norm() < 1e-12);
    CHECK((seg.pieces[0].points.back() - xt).norm() < 1e-12);
    CHECK(phi_conic(e, x, xt, +1, 0.5 * f, Window::full_plane()).empty());
    CHECK(phi_conic(e, x, xt, +1, f + 0.1, Window(Vec2(1.8, 1.8), 0.1)).empty());
}

TEST_CASE("conic intersection counts") {
    const auto e = DefiningFunction::euclidean();
    const Window full = Window::full_plane();
    const auto c1 = phi_conic(e, Vec2(-0.4, 0), Vec2(0.4, 0), +1, 1.2, full, 4e-3);
    const auto c2 = phi_conic(e, Vec2(0, -0.4), Vec2(0, 0.4), +1, 1.2, full, 4e-3);
    const auto r = conic_intersection_count(c1, c2, 1e-2);
    CHECK(r.count == 4);
    CHECK(!r.non_transversal);
    CHECK(conic_intersection_count(c1, c1, 1e-2).non_transversal);

    // Random pairs against the resultant oracle.
    Rng rng(41);
    int compared = 0;
    for (int k = 0; k < 500; ++k) {
        const Vec2 a1(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
        const Vec2 b1(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
        const Vec2 a2(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
        const Vec2 b2(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
        const int w1 = rng() % 2 ? 1 : -1, w2 = rng() % 2 ? 1 : -1;
        auto radius = [&](const Vec2& a, const Vec2& b, int w) {
            const double f = (a - b).norm();
            return w > 0 ? f + uniform(rng, 0.1, 1.0) : f * uniform(rng, 0.05, 0.95);
        };
        const double r1 = radius(a1, b1, w1), r2 = radius(a2, b2, w2);
        const auto g1 = phi_conic(e, a1, b1, w1, r1, full, 1e-2);
        const auto g2 = phi_conic(e, a2, b2, w2, r2, full, 1e-2);
        if (g1.empty() || g2.empty()) continue;
        const auto got = conic_intersection_count(g1, g2, 2e-2);
        CHECK(got.count <= 4);
        const auto exact = oracle::conic_intersections(oracle::SquaredConic(a1, b1, w1, r1),
                                                       oracle::SquaredConic(a2, b2, w2, r2));
        // Compare only well-conditioned configurations: transversal, separated, away from the box edge.
        bool clean = exact.size() <= 4;
        for (std::size_t i = 0; i < exact.size() && clean; ++i) {
            const Vec2& y = exact[i];
            const Vec2 n1 = (y - a1).normalized() + w1 * (y - b1).normalized();
            const Vec2 n2 = (y - a2).normalized() + w2 * (y - b2).normalized();
            clean &= std::abs(wedge(n1.normalized(), n2.normalized())) > 0.2;
            clean &= y.cwiseAbs().maxCoeff() < 1.9;
            for (std::size_t j = 0; j < i; ++j) clean &= (exact[j] - y).norm() > 0.1;
        }
        if (!clean) continue;
        ++compared;
        CHECK(got.count == static_cast<int>(exact.size()));
    }
    CHECK(compared >= 200);
}
