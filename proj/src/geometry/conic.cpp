#include "circmax/geometry/conic.h"

#include "circmax/common/error.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace circmax::geometry {

namespace {

struct Segment {
    long a, b;
};

}  // namespace

CurveSample marching_squares(const std::function<double(const Vec2&)>& f, const Box2& box, int nx, int ny) {
    std::vector<double> values(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            values[static_cast<std::size_t>(j) * (nx + 1) + i] =
                f(Vec2(box.lo.x() + box.width() * i / nx, box.lo.y() + box.height() * j / ny));
    return marching_squares(values, box, nx, ny);
}

CurveSample marching_squares(const std::vector<double>& v, const Box2& box, int nx, int ny) {
    if (nx < 1 || ny < 1 || v.size() != static_cast<std::size_t>(nx + 1) * (ny + 1))
        throw DomainError("marching squares: grid shape mismatch");
    const double hx = box.width() / nx, hy = box.height() / ny;
    auto at = [&](int i, int j) { return v[static_cast<std::size_t>(j) * (nx + 1) + i]; };
    const long n_horizontal = static_cast<long>(nx) * (ny + 1);
    auto h_edge = [&](int i, int j) { return static_cast<long>(j) * nx + i; };
    auto v_edge = [&](int i, int j) { return n_horizontal + static_cast<long>(j) * (nx + 1) + i; };
    auto edge_point = [&](long e) {
        int i0, j0, i1, j1;
        if (e < n_horizontal) {
            j0 = j1 = static_cast<int>(e / nx);
            i0 = static_cast<int>(e % nx);
            i1 = i0 + 1;
        } else {
            const long q = e - n_horizontal;
            i0 = i1 = static_cast<int>(q % (nx + 1));
            j0 = static_cast<int>(q / (nx + 1));
            j1 = j0 + 1;
        }
        const double f0 = at(i0, j0), f1 = at(i1, j1);
        const double t = f0 / (f0 - f1);
        const Vec2 p0(box.lo.x() + i0 * hx, box.lo.y() + j0 * hy);
        const Vec2 p1(box.lo.x() + i1 * hx, box.lo.y() + j1 * hy);
        return Vec2(p0 + t * (p1 - p0));
    };

    std::vector<Segment> segs;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double c0 = at(i, j), c1 = at(i + 1, j), c2 = at(i + 1, j + 1), c3 = at(i, j + 1);
            if (!std::isfinite(c0 + c1 + c2 + c3)) continue;
            const int code = (c0 > 0) | ((c1 > 0) << 1) | ((c2 > 0) << 2) | ((c3 > 0) << 3);
            if (code == 0 || code == 15) continue;
            const long e0 = h_edge(i, j), e1 = v_edge(i + 1, j), e2 = h_edge(i, j + 1), e3 = v_edge(i, j);
            if (code == 5 || code == 10) {
                const bool center_pos = 0.25 * (c0 + c1 + c2 + c3) > 0;
                if ((code == 5) == center_pos) {
                    segs.push_back({e0, e1});
                    segs.push_back({e2, e3});
                } else {
                    segs.push_back({e0, e3});
                    segs.push_back({e1, e2});
                }
                continue;
            }
            long cut[2];
            int k = 0;
            if (((code >> 0) & 1) != ((code >> 1) & 1)) cut[k++] = e0;
            if (((code >> 1) & 1) != ((code >> 2) & 1)) cut[k++] = e1;
            if (((code >> 3) & 1) != ((code >> 2) & 1)) cut[k++] = e2;
            if (((code >> 0) & 1) != ((code >> 3) & 1)) cut[k++] = e3;
            segs.push_back({cut[0], cut[1]});
        }

    std::unordered_map<long, std::vector<std::size_t>> by_edge;
    by_edge.reserve(segs.size() * 2);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge[segs[s].a].push_back(s);
        by_edge[segs[s].b].push_back(s);
    }
    std::vector<char> used(segs.size(), 0);
    CurveSample out;
    out.step = std::max(hx, hy);
    auto walk = [&](std::size_t s0, long start_edge) {
        Polyline line;
        line.points.push_back(edge_point(start_edge));
        long edge = start_edge;
        std::size_t s = s0;
        while (true) {
            used[s] = 1;
            const long next = segs[s].a == edge ? segs[s].b : segs[s].a;
            if (next == start_edge) {
                line.closed = true;
                break;
            }
            line.points.push_back(edge_point(next));
            edge = next;
            std::size_t follow = segs.size();
            for (std::size_t cand : by_edge[edge])
                if (!used[cand]) follow = cand;
            if (follow == segs.size()) break;
            s = follow;
        }
        out.pieces.push_back(std::move(line));
    };
    // Open chains start at edges touched by a single segment.
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        for (long e : {segs[s].a, segs[s].b})
            if (by_edge[e].size() == 1) {
                walk(s, e);
                break;
            }
    }
    for (std::size_t s = 0; s < segs.size(); ++s)
        if (!used[s]) walk(s, segs[s].a);
    return out;
}

CurveSample clip_to_window(const CurveSample& curve, const Window& X) {
    if (X.is_full_plane()) return curve;
    CurveSample out;
    out.step = curve.step;
    out.degenerate = curve.degenerate;
    for (const auto& piece : curve.pieces) {
        const auto& pts = piece.points;
        const std::size_t n = pts.size();
        if (n == 0) continue;
        std::size_t start = 0;
        bool all_inside = true;
        for (std::size_t k = 0; k < n; ++k)
            if (!X.contains(pts[k])) {
                all_inside = false;
                start = k;
                break;
            }
        if (all_inside) {
            out.pieces.push_back(piece);
            continue;
        }
        // Closed curves start at an outside point so runs do not straddle the seam.
        const std::size_t first = piece.closed ? start : 0;
        Polyline run;
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2& p = pts[(first + k) % n];
            if (X.contains(p)) {
                run.points.push_back(p);
            } else if (!run.points.empty()) {
                out.pieces.push_back(std::move(run));
                run = Polyline{};
            }
        }
        if (!run.points.empty()) out.pieces.push_back(std::move(run));
    }
    return out;
}

CurveSample phi_conic(const DefiningFunction& phi, const Vec2& x, const Vec2& xt, int omega, double r,
                      const Window& X, double step) {
    if (omega != 1 && omega != -1) throw DomainError("omega must be +1 or -1");
    if ((x - xt).norm() < 1e-12) throw DomainError("conic foci must be distinct");
    if (!(step > 0.0)) throw DomainError("conic step must be positive");
    const Box2 box = X.bounding_box(phi.reference_box());
    CurveSample out;
    out.step = step;
    if (box.empty()) return out;
    const int nx = std::max(2, static_cast<int>(std::ceil(box.width() / step)));
    const int ny = std::max(2, static_cast<int>(std::ceil(box.height() / step)));
    auto F = [&](const Vec2& y) { return phi.eval_unchecked(x, y) + omega * phi.eval_unchecked(xt, y) - r; };

    if (omega == 1) {
        // The minimum of Phi(x, .) + Phi(x~, .) sits on or near the focal segment.
        constexpr int kProbe = 400;
        double min_f = kInf;
        for (int k = 0; k <= kProbe; ++k) min_f = std::min(min_f, F(x + (xt - x) * (double(k) / kProbe)));
        constexpr double kTol = 1e-9;
        if (std::abs(min_f) <= kTol) {
            out.degenerate = true;
            Polyline seg;
            const int n = std::max(2, static_cast<int>(std::ceil((xt - x).norm() / step)));
            for (int k = 0; k <= n; ++k) seg.points.push_back(x + (xt - x) * (double(k) / n));
            out.pieces.push_back(std::move(seg));
            return clip_to_window(out, X);
        }
        // Perturbed minima can sit off the segment, so only Euclidean Phi stops here.
        if (min_f > kTol && phi.is_euclidean()) return out;
    }
    CurveSample grid = marching_squares(F, box, nx, ny);
    grid.step = step;
    return clip_to_window(grid, X);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double l2 = ab.squaredNorm();
    if (l2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / l2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

std::optional<Vec2> segment_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
    const Vec2 r = p1 - p0, s = q1 - q0;
    const double denom = wedge(r, s);
    if (denom == 0.0) return std::nullopt;
    const Vec2 qp = q0 - p0;
    const double t = wedge(qp, s) / denom;
    const double u = wedge(qp, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return p0 + t * r;
}

namespace {

struct SegmentSet {
    std::vector<std::pair<Vec2, Vec2>> segs;
};

SegmentSet segments_of(const CurveSample& c) {
    SegmentSet s;
    for (const auto& piece : c.pieces) {
        const auto& p = piece.points;
        for (std::size_t k = 0; k + 1 < p.size(); ++k) s.segs.emplace_back(p[k], p[k + 1]);
        if (piece.closed && p.size() > 2) s.segs.emplace_back(p.back(), p.front());
    }
    return s;
}

/// Uniform bucket grid over segment bounding boxes.
class SegmentGrid {
public:
    SegmentGrid(const SegmentSet& set, double cell) : set_(set), cell_(cell) {
        for (std::size_t k = 0; k < set.segs.size(); ++k) {
            const auto& [a, b] = set.segs[k];
            for (long i = key(std::min(a.x(), b.x())); i <= key(std::max(a.x(), b.x())); ++i)
                for (long j = key(std::min(a.y(), b.y())); j <= key(std::max(a.y(), b.y())); ++j)
                    buckets_[pack(i, j)].push_back(k);
        }
    }

    template <class Visit>
    void query(const Vec2& lo, const Vec2& hi, Visit&& visit) const {
        std::vector<std::size_t> seen;
        for (long i = key(lo.x()); i <= key(hi.x()); ++i)
            for (long j = key(lo.y()); j <= key(hi.y()); ++j) {
                const auto it = buckets_.find(pack(i, j));
                if (it == buckets_.end()) continue;
                for (std::size_t k : it->second) seen.push_back(k);
            }
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (std::size_t k : seen) visit(set_.segs[k]);
    }

private:
    long key(double v) const { return static_cast<long>(std::floor(v / cell_)); }
    static long long pack(long i, long j) { return (static_cast<long long>(i) << 32) ^ (j & 0xffffffffLL); }

    const SegmentSet& set_;
    double cell_;
    std::unordered_map<long long, std::vector<std::size_t>> buckets_;
};

double longest(const SegmentSet& s) {
    double m = 0.0;
    for (const auto& [a, b] : s.segs) m = std::max(m, (a - b).norm());
    return m;
}

}  // namespace

IntersectionCount conic_intersection_count(const CurveSample& a, const CurveSample& b, double tol) {
    IntersectionCount out;
    const SegmentSet sa = segments_of(a), sb = segments_of(b);
    if (sa.segs.empty() || sb.segs.empty()) return out;
    const double cell = std::max({longest(sb), tol, 1e-9}) * 2.0;
    const SegmentGrid grid_b(sb, cell);
    const Vec2 pad(tol, tol);

    // Shared stretches: many vertices of the smaller curve lie within tol of the other.
    const bool a_smaller = a.point_count() <= b.point_count();
    {
        const CurveSample& small = a_smaller ? a : b;
        const SegmentSet& big = a_smaller ? sb : sa;
        const SegmentGrid grid_big(big, std::max(longest(big), tol) * 2.0);
        std::size_t near = 0, total = 0;
        for (const auto& piece : small.pieces)
            for (const auto& p : piece.points) {
                ++total;
                bool hit = false;
                grid_big.query(p - pad, p + pad, [&](const auto& s) {
                    if (!hit && point_segment_distance(p, s.first, s.second) <= tol) hit = true;
                });
                near += hit;
            }
        if (total > 0 && near * 4 > total) out.non_transversal = true;
    }

    std::vector<Vec2> hits;
    for (const auto& [p0, p1] : sa.segs) {
        grid_b.query(p0.cwiseMin(p1) - pad, p0.cwiseMax(p1) + pad, [&](const auto& s) {
            if (auto q = segment_intersection(p0, p1, s.first, s.second)) hits.push_back(*q);
        });
    }
    // Single-linkage clusters at radius tol.
    std::vector<std::size_t> parent(hits.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t j = i + 1; j < hits.size(); ++j)
            if ((hits[i] - hits[j]).norm() <= tol) parent[find(i)] = find(j);
    for (std::size_t i = 0; i < hits.size(); ++i) out.count += find(i) == i;
    return out;
}

}  // namespace circmax::geometry
