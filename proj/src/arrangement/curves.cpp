#include "circmax/arrangement/curves.h"

#include "circmax/common/error.h"
#include "circmax/geometry/conic.h"

#include <cmath>

namespace circmax::arrangement {

std::vector<TaggedCurve> intersection_curve(const TangencySurface& S1, const TangencySurface& S2,
                                            const Box2& region, int n) {
    if ((S1.base().center() - S2.base().center()).norm() == 0.0 && S1.base().radius() == S2.base().radius())
        throw PreconditionError("intersection curve needs distinct apexes");
    const double hx = region.width() / n, hy = region.height() / n;
    std::vector<TaggedCurve> out;
    for (Sheet a : {Sheet::lower, Sheet::upper})
        for (Sheet b : {Sheet::lower, Sheet::upper}) {
            std::vector<double> values((n + 1) * (n + 1));
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i) {
                    const Vec2 x(region.lo.x() + i * hx, region.lo.y() + j * hy);
                    values[j * (n + 1) + i] = S1.height(a, x) - S2.height(b, x);
                }
            TaggedCurve tc{a, b, geometry::marching_squares(values, region, n, n), {}};
            if (tc.curve.empty()) continue;
            for (const auto& piece : tc.curve.pieces) {
                auto& tags = tc.r.emplace_back();
                for (const auto& p : piece.points) tags.push_back(S1.height(a, p));
            }
            out.push_back(std::move(tc));
        }
    return out;
}

ExtremalPoints extremal_points(const geometry::CurveSample& curve, double merge_radius) {
    if (curve.empty()) throw PreconditionError("extremal points need a nonempty curve");
    if (!(merge_radius > 0.0)) merge_radius = curve.step > 0.0 ? 4.0 * curve.step : 1e-9;
    ExtremalPoints out;
    std::vector<Vec2> raw;
    for (const auto& piece : curve.pieces) {
        const auto& p = piece.points;
        const std::size_t n = p.size();
        if (n < 2) continue;
        const std::size_t segs = piece.closed ? n : n - 1;
        double scale = 0.0;
        for (const auto& q : p) scale = std::max(scale, q.cwiseAbs().maxCoeff());
        const double eps = 1e-12 * std::max(1.0, scale);
        // Segments with a nonzero first component, in order.
        std::vector<std::size_t> moving;
        for (std::size_t k = 0; k < segs; ++k)
            if (std::abs(p[(k + 1) % n].x() - p[k].x()) > eps) moving.push_back(k);
        if (moving.empty()) {
            if (!piece.closed) out.vertical_segment = true;
            continue;
        }
        auto sign = [&](std::size_t k) { return p[(k + 1) % n].x() > p[k].x() ? 1 : -1; };
        const std::size_t m = moving.size();
        const std::size_t pairs = piece.closed ? m : m - 1;
        for (std::size_t q = 0; q < pairs; ++q) {
            const std::size_t a = moving[q], b = moving[(q + 1) % m];
            if (sign(a) == sign(b)) continue;
            // Middle vertex of the (possibly vertical) stretch from a's end to b's start.
            const std::size_t first = a + 1;
            const std::size_t last = b >= first ? b : b + n;
            raw.push_back(p[((first + last) / 2) % n]);
        }
    }
    for (const auto& q : raw) {
        bool dup = false;
        for (const auto& e : out.points)
            if ((e - q).norm() <= merge_radius) dup = true;
        if (!dup) out.points.push_back(q);
    }
    return out;
}

}  // namespace circmax::arrangement
