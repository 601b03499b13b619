#include "circmax/tangency/bipartite.h"

#include "circmax/common/error.h"
#include "circmax/common/parallel.h"
#include "circmax/geometry/delta.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace circmax::tangency {

void validate(const BipartitePair& P) {
    std::vector<double> radii;
    for (const auto& g : P.white) radii.push_back(g.radius());
    for (const auto& g : P.black) radii.push_back(g.radius());
    std::sort(radii.begin(), radii.end());
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] - radii[i - 1] < P.delta)
            throw SeparationError("radii " + std::to_string(radii[i - 1]) + " and " + std::to_string(radii[i]) +
                                  " are not delta-separated");
    auto same_side = [&](const std::vector<PhiCircle>& side, const char* name) {
        for (std::size_t i = 0; i < side.size(); ++i)
            for (std::size_t j = i + 1; j < side.size(); ++j) {
                const double d = geometry::metric_d(side[i], side[j]);
                if (!(d > 0.0 && d < P.t))
                    throw PreconditionError(std::string(name) + " circles " + std::to_string(i) + ", " +
                                            std::to_string(j) + " are not within t");
            }
    };
    same_side(P.white, "white");
    same_side(P.black, "black");
    for (std::size_t i = 0; i < P.white.size(); ++i)
        for (std::size_t j = 0; j < P.black.size(); ++j) {
            const double d = geometry::metric_d(P.white[i], P.black[j]);
            if (!(d > P.t && d < 2.0 * P.t))
                throw PreconditionError("cross pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                        ") has d outside (t, 2t)");
        }
}

std::vector<std::pair<int, int>> tangency_pairs(const BipartitePair& P, const Window& X, double c, unsigned jobs) {
    // Values within rounding of the threshold count as equal to it.
    const double threshold = c * P.delta - kRoundingGuard;
    std::vector<std::vector<int>> hits(P.m());
    parallel_for(P.m(), jobs, [&](std::size_t i) {
        for (std::size_t j = 0; j < P.n(); ++j) {
            if (geometry::delta_lower_bound(P.white[i], P.black[j]) >= threshold) continue;
            if (geometry::delta_fast(P.white[i], P.black[j], X) < threshold) hits[i].push_back(static_cast<int>(j));
        }
    });
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (int j : hits[i]) out.emplace_back(static_cast<int>(i), j);
    return out;
}

void write_bipartite(std::ostream& os, const BipartitePair& P) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "t = %.17g\ndelta = %.17g\n", P.t, P.delta);
    os << buf;
    const geometry::PhiPtr phi = P.white.empty() ? (P.black.empty() ? geometry::make_euclidean() : P.black[0].phi_ptr())
                                                 : P.white[0].phi_ptr();
    os << geometry::serialize(*phi) << "\n";
    os << "x0_1,x0_2,r0,side\n";
    auto rows = [&](const std::vector<PhiCircle>& side, char tag) {
        for (const auto& g : side) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%c\n", g.center().x(), g.center().y(), g.radius(), tag);
            os << buf;
        }
    };
    rows(P.white, 'W');
    rows(P.black, 'B');
}

BipartitePair read_bipartite(std::istream& is) {
    BipartitePair P;
    std::string line, phi_text;
    bool have_t = false, have_delta = false, in_rows = false;
    std::vector<std::pair<Vec2, double>> whites, blacks;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!in_rows) {
            if (line == "x0_1,x0_2,r0,side") {
                in_rows = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw IoError("malformed bipartite header line: " + line);
            std::string key = line.substr(0, eq);
            key.erase(key.find_last_not_of(' ') + 1);
            const std::string value = line.substr(eq + 1);
            if (key == "t") {
                P.t = std::stod(value);
                have_t = true;
            } else if (key == "delta") {
                P.delta = std::stod(value);
                have_delta = true;
            } else {
                phi_text += line + "\n";
            }
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, r, side;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, r, ',') ||
            !std::getline(ls, side))
            throw IoError("malformed bipartite row: " + line);
        const Vec2 x0(std::stod(a), std::stod(b));
        if (side == "W") whites.emplace_back(x0, std::stod(r));
        else if (side == "B") blacks.emplace_back(x0, std::stod(r));
        else throw IoError("unknown side tag: " + side);
    }
    if (!have_t || !have_delta || !in_rows) throw IoError("bipartite record is missing t, delta or rows");
    const auto phi = std::make_shared<const geometry::DefiningFunction>(geometry::parse_defining_function(phi_text));
    for (const auto& [x0, r0] : whites) P.white.emplace_back(phi, x0, r0);
    for (const auto& [x0, r0] : blacks) P.black.emplace_back(phi, x0, r0);
    return P;
}

}  // namespace circmax::tangency
