#include "circmax/arrangement/decomposition.h"

#include "circmax/common/error.h"
#include "circmax/geometry/defining_function.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

namespace circmax::arrangement {

namespace {

double radius_lo(const ParameterDomain& box) { return 1.0 - box.tau; }
constexpr double kRadiusHi = 1.0;

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct RunInfo {
    int precell = 0;
    int column = 0;
    int row_lo = 0;
    int row_hi = 0;
    int below = kFloor;
    int above = kCeiling;
    int front = kBoxSide;
    int back = kBoxSide;
    int cell = -1;
};

}  // namespace

int Decomposition::pixel_of(const Vec2& x) const {
    const double h = pixel_size();
    const int i = std::clamp(static_cast<int>(std::floor((x.x() - box_.centers.lo.x()) / h)), 0, grid_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((x.y() - box_.centers.lo.y()) / h)), 0, grid_ - 1);
    return j * grid_ + i;
}

Vec2 Decomposition::pixel_center(int pixel) const {
    const double h = pixel_size();
    const int i = pixel % grid_, j = pixel / grid_;
    return box_.centers.lo + Vec2((i + 0.5) * h, (j + 0.5) * h);
}

std::vector<std::pair<double, int>> Decomposition::exact_stack(const Vec2& x) const {
    std::vector<std::pair<double, int>> out;
    const double r_lo = radius_lo(box_);
    for (std::size_t s = 0; s < surfaces_.size(); ++s)
        for (Sheet sh : {Sheet::lower, Sheet::upper}) {
            const double h = surfaces_[s].height(sh, x);
            if (h > r_lo && h < kRadiusHi) out.emplace_back(h, SurfacePatch{static_cast<int>(s), sh}.id());
        }
    std::sort(out.begin(), out.end());
    return out;
}

ExactLabel Decomposition::exact_label(const Vec2& x, double r) const {
    ExactLabel label;
    const double r_lo = radius_lo(box_);
    const Box2& b = box_.centers;
    const double edge = std::min({x.x() - b.lo.x(), b.hi.x() - x.x(), x.y() - b.lo.y(), b.hi.y() - x.y()});
    if (edge <= kLocateTolerance || r - r_lo <= kLocateTolerance || kRadiusHi - r <= kLocateTolerance)
        label.on_boundary = true;
    double below_h = -kInf, above_h = kInf;
    for (const auto& [h, sheet] : exact_stack(x)) {
        if (std::abs(h - r) <= kLocateTolerance) label.on_boundary = true;
        if (h < r && h > below_h) {
            below_h = h;
            label.below = sheet;
        }
        if (h > r && h < above_h) {
            above_h = h;
            label.above = sheet;
        }
    }
    return label;
}

namespace {

/// Interval index k of pixel stack [first, first + K) with the given label, or -1.
int find_interval(const std::vector<int>& sheets, std::size_t first, std::size_t K, int below, int above) {
    int k = -1;
    if (below == kFloor) {
        k = 0;
    } else {
        for (std::size_t e = 0; e < K; ++e)
            if (sheets[first + e] == below) {
                k = static_cast<int>(e) + 1;
                break;
            }
        if (k < 0) return -1;
    }
    const int up = static_cast<std::size_t>(k) == K ? kCeiling : sheets[first + k];
    return up == above ? k : -1;
}

}  // namespace

int Decomposition::locate(const Vec2& x, double r) const {
    const double r_lo = radius_lo(box_);
    if (!box_.centers.contains(x) || r < r_lo || r > kRadiusHi)
        throw PreconditionError("locate needs a point inside the box");
    const ExactLabel label = exact_label(x, r);
    if (label.on_boundary) return kBoundary;
    const int p = pixel_of(x);
    const std::size_t first = stack_offset_[p], K = stack_offset_[p + 1] - first;
    const int k = find_interval(sheets_, first, K, label.below, label.above);
    if (k < 0) return kBoundary;
    return interval_cell_[first + p + k];
}

int Decomposition::locate_closure(const Vec2& x, double r) const {
    const int c = locate(x, r);
    if (c != kBoundary) return c;
    const int p = pixel_of(x);
    const std::size_t first = stack_offset_[p], last = stack_offset_[p + 1];
    const auto k = std::lower_bound(heights_.begin() + first, heights_.begin() + last, r) - (heights_.begin() + first);
    return interval_cell_[first + p + k];
}

bool Decomposition::cell_contains(const Cell& c, const Vec2& x, const ExactLabel& label) const {
    if (label.on_boundary || label.below != c.floor || label.above != c.ceiling) return false;
    const int p = pixel_of(x);
    const int i = p % grid_, j = p / grid_;
    if (i < c.column_lo() || i > c.column_hi()) return false;
    const Run& run = c.runs[i - c.column_lo()];
    return j >= run.row_lo && j <= run.row_hi;
}

int Decomposition::cell_at_pixel(int pixel, double r, double tol) const {
    if (!(r > radius_lo(box_) + tol && r < kRadiusHi - tol)) return kBoundary;
    const std::size_t first = stack_offset_[pixel], last = stack_offset_[pixel + 1];
    const auto it = std::lower_bound(heights_.begin() + first, heights_.begin() + last, r);
    if (it != heights_.begin() + last && *it - r <= tol) return kBoundary;
    if (it != heights_.begin() + first && r - *(it - 1) <= tol) return kBoundary;
    return interval_cell_[first + pixel + (it - (heights_.begin() + first))];
}

Decomposition vertical_decomposition(std::vector<TangencySurface> surfaces, const ParameterDomain& box,
                                     const DecompositionOptions& options, Rng* rng) {
    const int N = static_cast<int>(surfaces.size());
    const int G = options.grid;
    if (G < 1) throw PreconditionError("decomposition grid must be positive");
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b)
            if (surfaces[a].base().center() == surfaces[b].base().center() &&
                surfaces[a].base().radius() == surfaces[b].base().radius())
                throw PreconditionError("surfaces " + std::to_string(a) + " and " + std::to_string(b) +
                                        " share an apex");

    Decomposition D;
    D.box_ = box;
    D.grid_ = G;
    const double r_lo = radius_lo(box), r_hi = kRadiusHi;
    const std::size_t P = static_cast<std::size_t>(G) * G;
    const int S = 2 * N;

    // Pixel stacks, redrawing w for surfaces whose sheets tie.
    for (int attempt = 0;; ++attempt) {
        D.surfaces_ = surfaces;
        D.stack_offset_.assign(P + 1, 0);
        D.heights_.clear();
        D.sheets_.clear();
        std::vector<char> tied(N, 0);
        bool degenerate = false;
        std::vector<std::pair<double, int>> buf;
        for (std::size_t p = 0; p < P; ++p) {
            buf = D.exact_stack(D.pixel_center(static_cast<int>(p)));
            for (std::size_t k = 1; k < buf.size(); ++k)
                if (buf[k].first - buf[k - 1].first < options.tie_tolerance &&
                    buf[k].second / 2 != buf[k - 1].second / 2) {
                    tied[buf[k].second / 2] = tied[buf[k - 1].second / 2] = 1;
                    degenerate = true;
                }
            for (const auto& [h, s] : buf) {
                D.heights_.push_back(h);
                D.sheets_.push_back(s);
            }
            D.stack_offset_[p + 1] = D.heights_.size();
        }
        if (!degenerate) break;
        if (rng == nullptr || attempt >= options.max_retries)
            throw DegeneracyError("coincident sheets persist after " + std::to_string(attempt) + " redraws");
        for (int s = 0; s < N; ++s)
            if (tied[s])
                surfaces[s] = tangency_surface(surfaces[s].base(), surfaces[s].window(), surfaces[s].delta(), *rng);
        D.retries_ = attempt + 1;
    }

    const auto& off = D.stack_offset_;
    const auto& heights = D.heights_;
    const auto& sheets = D.sheets_;
    // pos[p * S + s]: index of sheet s in the stack of pixel p, or -1.
    std::vector<std::int16_t> pos(P * S, -1);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t e = off[p]; e < off[p + 1]; ++e) pos[p * S + sheets[e]] = static_cast<std::int16_t>(e - off[p]);
    auto K_of = [&](std::size_t p) { return static_cast<int>(off[p + 1] - off[p]); };
    auto interval_index = [&](std::size_t p, int k) { return off[p] + p + k; };
    auto below_of = [&](std::size_t p, int k) { return k == 0 ? kFloor : sheets[off[p] + k - 1]; };
    auto above_of = [&](std::size_t p, int k) { return k == K_of(p) ? kCeiling : sheets[off[p] + k]; };
    auto find = [&](std::size_t q, int below, int above) {
        int k = 0;
        if (below != kFloor) {
            const int at = pos[q * S + below];
            if (at < 0) return -1;
            k = at + 1;
        }
        return above_of(q, k) == above ? k : -1;
    };
    auto height_in = [&](std::size_t q, int sheet) {
        if (sheet == kFloor) return r_lo;
        if (sheet == kCeiling) return r_hi;
        const int at = pos[q * S + sheet];
        return at < 0 ? std::numeric_limits<double>::quiet_NaN() : heights[off[q] + at];
    };
    auto mid_height = [&](std::size_t p, int k) {
        const double lo = k == 0 ? r_lo : heights[off[p] + k - 1];
        const double hi = k == K_of(p) ? r_hi : heights[off[p] + k];
        return 0.5 * (lo + hi);
    };

    // Pre-cells: connected pieces of equal label.
    const std::size_t M = heights.size() + P;
    DisjointSets ds(M);
    for (int j = 0; j < G; ++j)
        for (int i = 0; i < G; ++i) {
            const std::size_t p = static_cast<std::size_t>(j) * G + i;
            for (int k = 0; k <= K_of(p); ++k) {
                const int a = below_of(p, k), b = above_of(p, k);
                if (i + 1 < G) {
                    const std::size_t q = p + 1;
                    const int kq = find(q, a, b);
                    if (kq >= 0) ds.unite(static_cast<int>(interval_index(p, k)), static_cast<int>(interval_index(q, kq)));
                }
                if (j + 1 < G) {
                    const std::size_t q = p + G;
                    const int kq = find(q, a, b);
                    if (kq >= 0) ds.unite(static_cast<int>(interval_index(p, k)), static_cast<int>(interval_index(q, kq)));
                }
            }
        }
    std::vector<int> precell(M, -1);
    {
        std::vector<int> root_id(M, -1);
        int next = 0;
        for (std::size_t e = 0; e < M; ++e) {
            const int r = ds.find(static_cast<int>(e));
            if (root_id[r] < 0) root_id[r] = next++;
            precell[e] = root_id[r];
        }
        D.precells_ = next;
    }

    // Wall cause seen from pixel q for the interval (a, b) at height m.
    auto cause = [&](std::size_t q, int a, int b, double m) {
        const double ha = height_in(q, a), hb = height_in(q, b);
        if (std::isnan(ha)) return a;
        if (std::isnan(hb)) return b;
        if (ha >= hb) return kSheetCrossing;
        const int pa = a == kFloor ? -1 : pos[q * S + a];
        const int pb = b == kCeiling ? K_of(q) : pos[q * S + b];
        int best = kSheetCrossing;
        double gap = kInf;
        for (int e = pa + 1; e < pb; ++e) {
            const double d = std::abs(heights[off[q] + e] - m);
            if (d < gap) {
                gap = d;
                best = sheets[off[q] + e];
            }
        }
        return best;
    };

    // Column runs of every pre-cell.
    std::vector<std::vector<RunInfo>> columns(G);
    for (int i = 0; i < G; ++i) {
        struct Entry {
            int precell, row, k;
        };
        std::vector<Entry> entries;
        for (int j = 0; j < G; ++j) {
            const std::size_t p = static_cast<std::size_t>(j) * G + i;
            for (int k = 0; k <= K_of(p); ++k) entries.push_back({precell[interval_index(p, k)], j, k});
        }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& l, const Entry& r) { return l.precell != r.precell ? l.precell < r.precell : l.row < r.row; });
        for (std::size_t e = 0; e < entries.size();) {
            std::size_t f = e + 1;
            while (f < entries.size() && entries[f].precell == entries[e].precell && entries[f].row == entries[f - 1].row + 1)
                ++f;
            RunInfo run;
            run.precell = entries[e].precell;
            run.column = i;
            run.row_lo = entries[e].row;
            run.row_hi = entries[f - 1].row;
            const std::size_t p_lo = static_cast<std::size_t>(run.row_lo) * G + i;
            const std::size_t p_hi = static_cast<std::size_t>(run.row_hi) * G + i;
            run.below = below_of(p_lo, entries[e].k);
            run.above = above_of(p_lo, entries[e].k);
            run.front = run.row_lo == 0 ? kBoxSide
                                        : cause(p_lo - G, run.below, run.above, mid_height(p_lo, entries[e].k));
            run.back = run.row_hi == G - 1
                           ? kBoxSide
                           : cause(p_hi + G, run.below, run.above, mid_height(p_hi, entries[f - 1].k));
            columns[i].push_back(run);
            e = f;
        }
    }

    // Chain runs across columns: one predecessor, one successor, same causes.
    auto overlaps = [](const RunInfo& a, const RunInfo& b) {
        return a.precell == b.precell && a.row_lo <= b.row_hi && b.row_lo <= a.row_hi;
    };
    for (int i = 0; i < G; ++i) {
        for (auto& run : columns[i]) {
            int pred = -1, preds = 0;
            if (i > 0) {
                const auto& prev = columns[i - 1];
                auto it = std::lower_bound(prev.begin(), prev.end(), run.precell,
                                           [](const RunInfo& r, int pc) { return r.precell < pc; });
                for (; it != prev.end() && it->precell == run.precell; ++it)
                    if (overlaps(*it, run)) {
                        pred = static_cast<int>(it - prev.begin());
                        ++preds;
                    }
            }
            bool extend = false;
            if (preds == 1) {
                const RunInfo& P = columns[i - 1][pred];
                int succs = 0;
                auto it = std::lower_bound(columns[i].begin(), columns[i].end(), run.precell,
                                           [](const RunInfo& r, int pc) { return r.precell < pc; });
                for (; it != columns[i].end() && it->precell == run.precell; ++it)
                    if (overlaps(P, *it)) ++succs;
                extend = succs == 1 && P.front == run.front && P.back == run.back;
            }
            if (extend) {
                run.cell = columns[i - 1][pred].cell;
            } else {
                run.cell = static_cast<int>(D.cells_.size());
                Cell c;
                c.id = run.cell;
                c.floor = run.below;
                c.ceiling = run.above;
                c.front = run.front;
                c.back = run.back;
                c.precell = run.precell;
                D.cells_.push_back(std::move(c));
            }
            D.cells_[run.cell].runs.push_back({i, run.row_lo, run.row_hi});
        }
    }

    D.interval_cell_.assign(M, -1);
    for (int i = 0; i < G; ++i)
        for (const auto& run : columns[i])
            for (int j = run.row_lo; j <= run.row_hi; ++j) {
                const std::size_t p = static_cast<std::size_t>(j) * G + i;
                D.interval_cell_[interval_index(p, find(p, run.below, run.above))] = run.cell;
            }

    const double h = D.pixel_size();
    for (auto& c : D.cells_) {
        const Run& run = c.runs[c.runs.size() / 2];
        const int j = (run.row_lo + run.row_hi) / 2;
        const std::size_t p = static_cast<std::size_t>(j) * G + run.column;
        c.witness_x = D.pixel_center(static_cast<int>(p));
        c.witness_r = mid_height(p, find(p, c.floor, c.ceiling));
        for (int s : {c.floor, c.ceiling, c.front, c.back})
            if (s >= 0) c.defining_surfaces.push_back(s / 2);
        std::sort(c.defining_surfaces.begin(), c.defining_surfaces.end());
        c.defining_surfaces.erase(std::unique(c.defining_surfaces.begin(), c.defining_surfaces.end()),
                                  c.defining_surfaces.end());
        const double x_lo = box.centers.lo.x();
        D.walls_.push_back({Wall::Kind::plane, c.id, x_lo + c.column_lo() * h, kBoxSide});
        D.walls_.push_back({Wall::Kind::plane, c.id, x_lo + (c.column_hi() + 1) * h, kBoxSide});
        D.walls_.push_back({Wall::Kind::curve, c.id, 0.0, c.front});
        D.walls_.push_back({Wall::Kind::curve, c.id, 0.0, c.back});
    }
    return D;
}

bool crosses(const Decomposition& D, const Cell& c, const TangencySurface& S, int refine) {
    const double r_lo = radius_lo(D.box()), h = D.pixel_size();
    const int G = D.grid();
    auto hit = [&](const Vec2& x) {
        for (Sheet sh : {Sheet::lower, Sheet::upper}) {
            const double r = S.height(sh, x);
            if (r > r_lo && r < kRadiusHi && D.locate(x, r) == c.id) return true;
        }
        return false;
    };
    for (const Run& run : c.runs)
        for (int j = run.row_lo; j <= run.row_hi; ++j) {
            const Vec2 center = D.pixel_center(j * G + run.column);
            const bool edge = j == run.row_lo || j == run.row_hi || run.column == c.column_lo() ||
                              run.column == c.column_hi();
            if (!edge) {
                if (hit(center)) return true;
                continue;
            }
            for (int a = 0; a < refine; ++a)
                for (int b = 0; b < refine; ++b)
                    if (hit(center + h * Vec2((a + 0.5) / refine - 0.5, (b + 0.5) / refine - 0.5))) return true;
        }
    return false;
}

std::vector<int> crossed_cells(const Decomposition& D, const TangencySurface& S) {
    std::vector<int> out;
    const int P = D.grid() * D.grid();
    for (int p = 0; p < P; ++p) {
        const Vec2 x = D.pixel_center(p);
        for (Sheet sh : {Sheet::lower, Sheet::upper}) {
            const double r = S.height(sh, x);
            if (std::isnan(r)) continue;
            const int c = D.cell_at_pixel(p, r);
            if (c >= 0) out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double cell_count_bound(int N, double C) {
    const double n = std::max(N, 1);
    return C * n * n * n * std::log(N + 2.0);
}

namespace {

std::string sheet_name(int s) {
    switch (s) {
        case kFloor: return "floor";
        case kCeiling: return "ceiling";
        case kBoxSide: return "box";
        case kSheetCrossing: return "crossing";
        default: return std::to_string(s / 2) + (s % 2 ? "U" : "L");
    }
}

}  // namespace

void write_manifest(std::ostream& os, const Decomposition& D) {
    char buf[256];
    os << "grid = " << D.grid() << "\n";
    os << "surfaces = " << D.surfaces().size() << "\n";
    for (std::size_t s = 0; s < D.surfaces().size(); ++s) {
        const auto& S = D.surfaces()[s];
        std::snprintf(buf, sizeof buf, "surface %zu = %.17g %.17g %.17g w %.17g %.17g %.17g\n", s,
                      S.base().center().x(), S.base().center().y(), S.base().radius(), S.w()[0], S.w()[1], S.w()[2]);
        os << buf;
    }
    os << "precells = " << D.precell_count() << "\n";
    os << "cells = " << D.cells().size() << "\n";
    for (const auto& c : D.cells()) {
        std::snprintf(buf, sizeof buf, "cell %d witness %.17g %.17g %.17g defining", c.id, c.witness_x.x(),
                      c.witness_x.y(), c.witness_r);
        os << buf;
        for (int s : c.defining_surfaces) os << " " << s;
        os << "\n";
    }
}

void write_cells_csv(std::ostream& os, const Decomposition& D) {
    os << "id,floor,ceiling,front,back,column_lo,column_hi,witness_x1,witness_x2,witness_r,defining\n";
    char buf[256];
    for (const auto& c : D.cells()) {
        std::snprintf(buf, sizeof buf, "%d,%s,%s,%s,%s,%d,%d,%.17g,%.17g,%.17g,", c.id, sheet_name(c.floor).c_str(),
                      sheet_name(c.ceiling).c_str(), sheet_name(c.front).c_str(), sheet_name(c.back).c_str(),
                      c.column_lo(), c.column_hi(), c.witness_x.x(), c.witness_x.y(), c.witness_r);
        os << buf;
        for (std::size_t k = 0; k < c.defining_surfaces.size(); ++k)
            os << (k ? ";" : "") << c.defining_surfaces[k];
        os << "\n";
    }
}

}  // namespace circmax::arrangement
