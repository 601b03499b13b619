#pragma once

#include "circmax/geometry/phi_circle.h"

#include <iosfwd>
#include <utility>
#include <vector>

namespace circmax::tangency {

using geometry::PhiCircle;
using geometry::Window;

/// Two families of Phi-circles: whites and blacks.
struct BipartitePair {
    std::vector<PhiCircle> white;
    std::vector<PhiCircle> black;
    double t = 0.0;
    double delta = 0.0;

    std::size_t m() const { return white.size(); }
    std::size_t n() const { return black.size(); }
};

/// Throws SeparationError when two radii in W u B are closer than delta and
/// PreconditionError when a cross distance is outside (t, 2t) or a same-side
/// distance outside (0, t).
void validate(const BipartitePair& P);

/// Absolute slack below which Delta is treated as equal to a threshold.
inline constexpr double kRoundingGuard = 1e-12;

/// Cross pairs (white index, black index) with Delta_X < c * delta - kRoundingGuard, sorted.
std::vector<std::pair<int, int>> tangency_pairs(const BipartitePair& P, const Window& X, double c = 1.0,
                                                unsigned jobs = 1);

/// Text form: `t = ..`, `delta = ..`, the defining-function record, then a
/// CSV block with header x0_1,x0_2,r0,side (side is W or B). All circles in a
/// pair share one defining function.
void write_bipartite(std::ostream& os, const BipartitePair& P);
BipartitePair read_bipartite(std::istream& is);

}  // namespace circmax::tangency
