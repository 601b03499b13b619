#include "circmax/harness/families.h"

#include "circmax/common/error.h"

#include <algorithm>
#include <numeric>

namespace circmax::harness {

std::vector<PhiCircle> random_circles(Rng& rng, int N, const PhiPtr& phi, const geometry::ParameterDomain& domain) {
    std::vector<PhiCircle> out;
    out.reserve(N);
    const Box2& b = domain.centers;
    for (int k = 0; k < N; ++k) {
        const Vec2 x(uniform(rng, b.lo.x(), b.hi.x()), uniform(rng, b.lo.y(), b.hi.y()));
        out.emplace_back(phi, x, uniform(rng, 1.0 - domain.tau, 1.0));
    }
    return out;
}

std::vector<PhiCircle> pencil_family(int N, const Vec2& touch) {
    const auto phi = geometry::make_euclidean();
    const Vec2 u = touch.normalized();
    std::vector<PhiCircle> out;
    for (int k = 0; k < N; ++k) {
        const double r = 0.905 + 0.09 * (k + 0.5) / N;
        out.emplace_back(phi, touch - r * u, r);
    }
    return out;
}

std::vector<PhiCircle> concentric_shift_family(int N, int shift) {
    const auto phi = geometry::make_euclidean();
    const int half = std::max(1, N / 2);
    const double h = 0.09 / (half + shift + 1);
    std::vector<PhiCircle> out;
    for (int k = 0; k < N; ++k) {
        const int i = k % half;
        const bool second = k >= half;
        const Vec2 x = second ? Vec2(-shift * h, 0.0) : Vec2(0.0, 0.0);
        out.emplace_back(phi, x, 0.905 + (i + (second ? shift : 0)) * h);
    }
    return out;
}

std::pair<PhiCircle, PhiCircle> tangent_pair(Rng& rng, double t, const geometry::Window& X) {
    const auto phi = geometry::make_euclidean();
    const geometry::ParameterDomain domain;
    const geometry::Window B0 = X.shrunk(2);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const Vec2 xw(uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05));
        const double rw = uniform(rng, 0.93, 0.97);
        const double angle = std::atan2(B0.center().y() - xw.y(), B0.center().x() - xw.x()) + uniform(rng, -0.03, 0.03);
        const Vec2 u = unit_vector(angle);
        if (!B0.contains(xw + rw * u)) continue;
        const double s = uniform(rng, 0.6, 0.9) * t;
        const bool inside = uniform(rng, 0.0, 1.0) < 0.5;
        const Vec2 xb = inside ? Vec2(xw + s * u) : Vec2(xw - s * u);
        const double rb = inside ? rw - s : rw + s;
        if (!domain.contains(xb, rb)) continue;
        return {PhiCircle(phi, xw, rw), PhiCircle(phi, xb, rb)};
    }
    throw SamplingError("could not place a tangent pair");
}

tangency::BipartitePair random_bipartite(Rng& rng, int m, int n, double t, double delta, const PhiPtr& phi) {
    const double s = 0.75 * t;
    const Vec2 xw0(-0.5 * s, 0.0), xb0(0.5 * s, 0.0);
    const double rw0 = 0.94 + 0.5 * s, rb0 = rw0 - s;
    const double spacing = 1.01 * delta;
    const int slots_half = static_cast<int>(std::floor(0.15 * t / spacing));
    if (2 * slots_half + 1 < std::max(m, n))
        throw PreconditionError("delta too large for a delta-separated radius lattice of this size");

    auto side = [&](int count, const Vec2& x0, double r0) {
        std::vector<int> slots(2 * slots_half + 1);
        std::iota(slots.begin(), slots.end(), -slots_half);
        std::shuffle(slots.begin(), slots.end(), rng);
        std::vector<PhiCircle> out;
        for (int k = 0; k < count; ++k) {
            // Center offset below 0.09 t keeps |dx| + |dr| under t / 4.
            const double rad = 0.09 * t * std::sqrt(uniform(rng, 0.0, 1.0));
            const Vec2 x = x0 + rad * unit_vector(uniform(rng, -kPi, kPi));
            out.emplace_back(phi, x, r0 + slots[k] * spacing);
        }
        return out;
    };
    tangency::BipartitePair P;
    P.t = t;
    P.delta = delta;
    P.white = side(m, xw0, rw0);
    P.black = side(n, xb0, rb0);
    return P;
}

AdmissibleTriple admissible_triple(Rng& rng, double t, const geometry::Window& X) {
    const auto phi = geometry::make_euclidean();
    const geometry::ParameterDomain domain;
    const geometry::Window B0 = X.shrunk(2);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double rs = uniform(rng, 0.945, 0.955);
        const double phase = uniform(rng, -0.03, 0.03);
        const Vec2 xs = B0.center() - (rs + uniform(rng, -0.1, 0.1) * B0.radius()) * unit_vector(phase);
        if (!domain.contains(xs, rs)) continue;
        const double spread = 0.7 * B0.radius() / rs;
        // Two circles on the inside at very different offsets, one outside.
        double offsets[3] = {0.6 * t, 1.4 * t, uniform(rng, 0.6, 1.4) * t};
        bool inside[3] = {true, true, false};
        std::array<int, 3> order{0, 1, 2};
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<PhiCircle> circles;
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
            const Vec2 u = unit_vector(phase + (k - 1) * spread);
            const int j = order[k];
            const double s = offsets[j];
            const Vec2 x = inside[j] ? Vec2(xs + s * u) : Vec2(xs - s * u);
            const double r = inside[j] ? rs - s : rs + s;
            if (!domain.contains(x, r)) ok = false;
            else circles.emplace_back(phi, x, r);
        }
        if (!ok) continue;
        for (int i = 0; i < 3 && ok; ++i)
            for (int j = i + 1; j < 3 && ok; ++j) ok = geometry::metric_d(circles[i], circles[j]) >= t;
        if (!ok) continue;
        return {{circles[0], circles[1], circles[2]}, PhiCircle(phi, xs, rs)};
    }
    throw SamplingError("could not place an admissible triple");
}

}  // namespace circmax::harness
