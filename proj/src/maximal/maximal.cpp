#include "circmax/maximal/maximal.h"

#include "circmax/common/error.h"
#include "circmax/common/parallel.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

namespace circmax::maximal {

namespace {

/// Interval [lo, hi] (inclusive) of integers k where `inside(k)` holds, near
/// the guess |k h + e| < a. `inside` must hold on one interval.
template <class Pred>
std::pair<int, int> index_interval(double h, double e, double a, Pred&& inside) {
    int lo = static_cast<int>(std::ceil((-a - e) / h));
    int hi = static_cast<int>(std::floor((a - e) / h));
    while (lo <= hi && !inside(lo)) ++lo;
    while (inside(lo - 1)) --lo;
    while (hi >= lo && !inside(hi)) --hi;
    while (inside(hi + 1)) ++hi;
    return {lo, hi};
}

/// Pixel holding x0 and the offset of that pixel's center from x0.
struct Anchor {
    int ci = 0;
    int cj = 0;
    double ex = 0.0;
    double ey = 0.0;
};

Anchor anchor_of(const Grid& G, double x0, double y0) {
    Anchor a;
    a.ci = static_cast<int>(std::floor((x0 - G.box.lo.x()) / G.hx()));
    a.cj = static_cast<int>(std::floor((y0 - G.box.lo.y()) / G.hy()));
    a.ex = G.cell_x(a.ci) - x0;
    a.ey = G.cell_y(a.cj) - y0;
    return a;
}

/// Runs of a Euclidean annulus relative to the anchor pixel. Pixel
/// (ci + di, cj + dj) is inside when d^2 = (di hx + ex)^2 + (dj hy + ey)^2
/// satisfies (r0 - delta)^2 < d^2 < (r0 + delta)^2, so the runs depend on
/// the center only through (ex, ey).
struct Template {
    double ex = 0.0;
    double ey = 0.0;
    std::vector<RowRun> runs;
};

Template make_template(const Grid& G, double ex, double ey, double r0, double delta) {
    Template t{ex, ey, {}};
    const double R = r0 + delta, R2 = R * R;
    const double q = r0 - delta, q2 = q > 0.0 ? q * q : -1.0;
    const double hx = G.hx(), hy = G.hy();
    const int j0 = static_cast<int>(std::ceil((-R - ey) / hy)) - 1;
    const int j1 = static_cast<int>(std::floor((R - ey) / hy)) + 1;
    for (int dj = j0; dj <= j1; ++dj) {
        const double dy = dj * hy + ey, dy2 = dy * dy;
        if (dy2 >= R2) continue;
        auto d2 = [&](int di) {
            const double dx = di * hx + ex;
            return dx * dx + dy2;
        };
        const auto [o0, o1] = index_interval(hx, ex, std::sqrt(R2 - dy2), [&](int i) { return d2(i) < R2; });
        if (o0 > o1) continue;
        int h0 = o1 + 1, h1 = o1;
        if (q2 > dy2) {
            const auto hole = index_interval(hx, ex, std::sqrt(q2 - dy2), [&](int i) { return d2(i) <= q2; });
            if (hole.first <= hole.second) std::tie(h0, h1) = hole;
        }
        if (h0 > h1) {
            t.runs.push_back({dj, o0, o1 + 1});
        } else {
            if (o0 < h0) t.runs.push_back({dj, o0, h0});
            if (h1 < o1) t.runs.push_back({dj, h1 + 1, o1 + 1});
        }
    }
    return t;
}

/// Emits the runs of `t` placed at the anchor and clipped to the grid.
template <class Emit>
void place(const Grid& G, const Template& t, const Anchor& a, Emit&& emit) {
    for (const RowRun& r : t.runs) {
        const int j = a.cj + r.row;
        if (j < 0 || j >= G.ny) continue;
        const int b = std::max(a.ci + r.begin, 0), e = std::min(a.ci + r.end, G.nx);
        if (b < e) emit(j, b, e);
    }
}

/// Templates of one radius keyed by the exact anchor offset.
class TemplateCache {
public:
    TemplateCache(const Grid& G, double r0, double delta) : G_(G), r0_(r0), delta_(delta) {}

    const Template& get(const Anchor& a) {
        for (const auto& t : cache_)
            if (t.ex == a.ex && t.ey == a.ey) return t;
        if (cache_.size() >= kMaxTemplates) cache_.clear();
        cache_.push_back(make_template(G_, a.ex, a.ey, r0_, delta_));
        return cache_.back();
    }

private:
    static constexpr std::size_t kMaxTemplates = 16;
    const Grid& G_;
    double r0_;
    double delta_;
    std::vector<Template> cache_;
};

template <class Emit>
void euclidean_runs(const Grid& G, double x0, double y0, double r0, double delta, Emit&& emit) {
    const Anchor a = anchor_of(G, x0, y0);
    place(G, make_template(G, a.ex, a.ey, r0, delta), a, emit);
}

/// Runs of a general Phi annulus by testing pixels between bounding disks.
template <class Emit>
void general_runs(const Grid& G, const PhiCircle& g, double delta, Emit&& emit) {
    const PhiPtr& phi = g.phi_ptr();
    const Vec2& x0 = g.center();
    const double pad = 2.0 * std::max(G.hx(), G.hy());
    const double R = PhiCircle(phi, x0, g.radius() + delta).rho_max() + pad;
    const double q = g.radius() > delta ? PhiCircle(phi, x0, g.radius() - delta).rho_min() - pad : 0.0;
    const double R2 = R * R, q2 = q > 0.0 ? q * q : -1.0;
    const double hy = G.hy(), ly = G.box.lo.y();
    const int j0 = std::max(0, static_cast<int>(std::floor((x0.y() - R - ly) / hy)));
    const int j1 = std::min(G.ny - 1, static_cast<int>(std::ceil((x0.y() + R - ly) / hy)));
    const double hx = G.hx(), lx = G.box.lo.x();
    for (int j = j0; j <= j1; ++j) {
        const double dy = G.cell_y(j) - x0.y(), dy2 = dy * dy;
        if (dy2 >= R2) continue;
        const double a = std::sqrt(R2 - dy2);
        const int i0 = std::max(0, static_cast<int>(std::floor((x0.x() - a - lx) / hx)));
        const int i1 = std::min(G.nx - 1, static_cast<int>(std::ceil((x0.x() + a - lx) / hx)));
        int open = -1;
        for (int i = i0; i <= i1 + 1; ++i) {
            bool in = false;
            if (i <= i1) {
                const double dx = G.cell_x(i) - x0.x();
                if (dx * dx + dy2 > q2) in = std::abs(g.level(G.cell_center(i, j))) < delta;
            }
            if (in && open < 0) open = i;
            if (!in && open >= 0) {
                emit(j, open, i);
                open = -1;
            }
        }
    }
}

template <class Emit>
void for_each_run(const Grid& G, const PhiCircle& g, double delta, Emit&& emit) {
    if (g.phi().is_euclidean())
        euclidean_runs(G, g.center().x(), g.center().y(), g.radius(), delta, emit);
    else
        general_runs(G, g, delta, emit);
}

/// Per-row prefix sums; row j occupies [j (nx + 1), (j + 1)(nx + 1)).
std::vector<double> row_prefix(const GridFunction& f) {
    const Grid& G = f.grid();
    std::vector<double> P(static_cast<std::size_t>(G.ny) * (G.nx + 1), 0.0);
    for (int j = 0; j < G.ny; ++j) {
        double* row = P.data() + static_cast<std::size_t>(j) * (G.nx + 1);
        for (int i = 0; i < G.nx; ++i) row[i + 1] = row[i] + std::abs(f.at(i, j));
    }
    return P;
}

}  // namespace

std::vector<RowRun> annulus_runs(const Grid& grid, const PhiCircle& g, double delta) {
    std::vector<RowRun> out;
    for_each_run(grid, g, delta, [&](int j, int b, int e) { out.push_back({j, b, e}); });
    return out;
}

std::size_t run_cells(const std::vector<RowRun>& runs) {
    std::size_t n = 0;
    for (const auto& r : runs) n += static_cast<std::size_t>(r.end - r.begin);
    return n;
}

GridFunction annulus_indicator(const Grid& grid, const PhiCircle& g, double delta) {
    GridFunction f(grid);
    for_each_run(grid, g, delta, [&](int j, int b, int e) {
        for (int i = b; i < e; ++i) f.at(i, j) = 1.0;
    });
    return f;
}

void check_resolution(const Grid& grid, double delta) {
    if (!(delta >= 2.0 * std::max(grid.hx(), grid.hy())))
        throw ResolutionError("delta is under two grid cells");
}

double annulus_average(const GridFunction& f, const PhiCircle& g, double delta) {
    check_resolution(f.grid(), delta);
    double sum = 0.0, count = 0.0;
    for_each_run(f.grid(), g, delta, [&](int j, int b, int e) {
        for (int i = b; i < e; ++i) {
            sum += std::abs(f.at(i, j));
            count += 1.0;
        }
    });
    return count > 0.0 ? sum / count : 0.0;
}

std::vector<Vec2> center_lattice(double delta, const MaximalOptions& options) {
    const double coarse = options.spacing > 0.0 ? options.spacing : 0.5 * delta;
    if (coarse > 0.5 * delta * (1.0 + 1e-12)) throw PreconditionError("center spacing exceeds delta / 2");
    const double step = std::exp2(std::floor(std::log2(coarse))) * (options.refine ? 0.5 : 1.0);
    const Box2& B = options.centers;
    const int a0 = static_cast<int>(std::ceil(B.lo.x() / step)), a1 = static_cast<int>(std::floor(B.hi.x() / step));
    const int b0 = static_cast<int>(std::ceil(B.lo.y() / step)), b1 = static_cast<int>(std::floor(B.hi.y() / step));
    std::vector<Vec2> out;
    for (int b = b0; b <= b1; ++b)
        for (int a = a0; a <= a1; ++a) out.emplace_back(a * step, b * step);
    return out;
}

std::vector<double> maximal_transform(const GridFunction& f, double delta, const std::vector<double>& radii,
                                      const MaximalOptions& options) {
    const Grid& G = f.grid();
    check_resolution(G, delta);
    const PhiPtr phi = options.phi ? options.phi : geometry::make_euclidean();
    const auto centers = center_lattice(delta, options);
    const auto P = row_prefix(f);
    const std::size_t stride = static_cast<std::size_t>(G.nx) + 1;
    std::vector<double> out(radii.size(), 0.0);
    parallel_for(radii.size(), options.jobs, [&](std::size_t k) {
        TemplateCache cache(G, radii[k], delta);
        double best = 0.0;
        for (const Vec2& x : centers) {
            double sum = 0.0;
            long long count = 0;
            auto emit = [&](int j, int b, int e) {
                const double* row = P.data() + static_cast<std::size_t>(j) * stride;
                sum += row[e] - row[b];
                count += e - b;
            };
            if (phi->is_euclidean()) {
                const Anchor a = anchor_of(G, x.x(), x.y());
                place(G, cache.get(a), a, emit);
            } else {
                general_runs(G, PhiCircle(phi, x, radii[k]), delta, emit);
            }
            if (count > 0) best = std::max(best, sum / static_cast<double>(count));
        }
        out[k] = best;
    });
    return out;
}

std::vector<double> radius_grid(int count) {
    if (count <= 0) throw PreconditionError("radius grid needs a positive count");
    std::vector<double> r(count);
    for (int k = 0; k < count; ++k) r[k] = 0.5 + 0.5 * (k + 0.5) / count;
    return r;
}

double lp_norm(const std::vector<double>& values, double p, double dr) {
    if (!(p >= 1.0)) throw PreconditionError("lp_norm needs p >= 1");
    double s = 0.0;
    for (double v : values) s += std::pow(std::abs(v), p);
    return std::pow(s * dr, 1.0 / p);
}

double lp_norm(const std::vector<double>& values, double p) {
    if (values.empty()) return 0.0;
    return lp_norm(values, p, 0.5 / static_cast<double>(values.size()));
}

std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw PreconditionError("line fit needs two or more points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw PreconditionError("line fit needs distinct abscissae");
    const double slope = sxy / sxx, icpt = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (icpt + slope * x[i]);
        ss += e * e;
    }
    return {slope, icpt, std::sqrt(ss / n)};
}

ScalingReport scaling_experiment(const std::function<GridFunction(double)>& make_f,
                                 const std::vector<double>& deltas, const ScalingConfig& config) {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw PreconditionError("deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) throw PreconditionError("deltas must strictly decrease");
    }
    ScalingReport rep;
    const auto radii = radius_grid(config.radii);
    std::vector<double> lx, ly;
    for (double delta : deltas) {
        const GridFunction f = make_f(delta);
        check_resolution(f.grid(), delta);
        const double fn = f.lp_norm(3.0);
        if (!(fn > 0.0)) throw PreconditionError("scaling needs a nonzero function");
        const double ratio = lp_norm(maximal_transform(f, delta, radii, config.maximal), 3.0) / fn;
        rep.deltas.push_back(delta);
        rep.ratios.push_back(ratio);
        lx.push_back(std::log(1.0 / delta));
        ly.push_back(std::log(ratio));
    }
    if (deltas.size() >= 2) {
        const auto fit = fit_line(lx, ly);
        rep.slope = fit[0];
        rep.intercept = fit[1];
        rep.residual = fit[2];
    }
    return rep;
}

ScalingReport scaling_experiment(const GridFunction& f, const std::vector<double>& deltas,
                                 const ScalingConfig& config) {
    return scaling_experiment([&](double) { return f; }, deltas, config);
}

void write_report(std::ostream& os, const ScalingReport& r) {
    nlohmann::ordered_json j;
    j["deltas"] = r.deltas;
    j["ratios"] = r.ratios;
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["residual"] = r.residual;
    os << j.dump(2) << '\n';
}

GridFunction annulus_bush(const Grid& grid, double width, int count, const Vec2& touch, double spread) {
    GridFunction f(grid);
    for (int k = 0; k < count; ++k) {
        const Vec2 x = spread * unit_vector(2.0 * kPi * k / count);
        euclidean_runs(grid, x.x(), x.y(), (touch - x).norm(), width, [&](int j, int b, int e) {
            for (int i = b; i < e; ++i) f.at(i, j) = 1.0;
        });
    }
    return f;
}

GridFunction random_blobs(const Grid& grid, Rng& rng, int blobs, double r_min, double r_max) {
    GridFunction f(grid);
    for (int k = 0; k < blobs; ++k) {
        const double r = r_min * std::pow(r_max / r_min, uniform(rng, 0.0, 1.0));
        const Vec2 c(uniform(rng, grid.box.lo.x() + r_max, grid.box.hi.x() - r_max),
                     uniform(rng, grid.box.lo.y() + r_max, grid.box.hi.y() - r_max));
        const double h = 1.0 - uniform(rng, 0.0, 1.0);
        euclidean_runs(grid, c.x(), c.y(), 0.5 * r, 0.5 * r, [&](int j, int b, int e) {
            for (int i = b; i < e; ++i) f.at(i, j) += h;
        });
    }
    return f;
}

double trivial_ratio(const GridFunction& f, double delta, const std::vector<double>& radii,
                     const MaximalOptions& options) {
    const double l1 = f.lp_norm(1.0);
    if (!(l1 > 0.0)) throw PreconditionError("trivial bound needs a nonzero function");
    const auto m = maximal_transform(f, delta, radii, options);
    return *std::max_element(m.begin(), m.end()) * delta / l1;
}

}  // namespace circmax::maximal
