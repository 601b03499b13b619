#pragma once

#include "circmax/common/random.h"
#include "circmax/geometry/phi_circle.h"
#include "circmax/tangency/bipartite.h"

#include <array>
#include <vector>

namespace circmax::harness {

using geometry::PhiCircle;
using geometry::PhiPtr;

/// N circles with centers uniform in U_1 and radii uniform in (1 - tau, 1).
std::vector<PhiCircle> random_circles(Rng& rng, int N, const PhiPtr& phi,
                                      const geometry::ParameterDomain& domain = {});

/// N Euclidean circles internally tangent at the common point `touch`, with
/// centers on the normal line through it: x = touch - r u.
std::vector<PhiCircle> pencil_family(int N, const Vec2& touch = {0.95, 0.0});

/// Two concentric groups of N/2 circles on a radius lattice; the second
/// group is shifted by `shift` lattice steps along the negative x axis.
std::vector<PhiCircle> concentric_shift_family(int N, int shift = 3);

/// White circle and a black circle internally tangent to it at a point of
/// X.shrunk(2), with d in (t, 2t).
std::pair<PhiCircle, PhiCircle> tangent_pair(Rng& rng, double t, const geometry::Window& X);

/// A t-bipartite pair whose reference white and black circles are internally
/// tangent near (0.94, 0). Each circle is the reference perturbed by less than
/// t / 4 in d; radii come from disjoint lattices of spacing 1.01 delta.
tangency::BipartitePair random_bipartite(Rng& rng, int m, int n, double t, double delta, const PhiPtr& phi);

/// Three circles internally tangent to one hidden circle at distinct points
/// of X.shrunk(2), each at d in (t, 2t) from it and pairwise at least t apart.
/// Also returns the hidden circle.
struct AdmissibleTriple {
    std::array<PhiCircle, 3> circles;
    PhiCircle hidden;
};
AdmissibleTriple admissible_triple(Rng& rng, double t, const geometry::Window& X);

}  // namespace circmax::harness
