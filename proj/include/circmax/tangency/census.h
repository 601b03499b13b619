#pragma once

#include "circmax/tangency/bipartite.h"
#include "circmax/tangency/rectangle.h"

#include <iosfwd>
#include <vector>

namespace circmax::tangency {

struct CensusOptions {
    double C1 = kDefaultC1;
    double C0 = kDefaultC0;
    double min_ratio = kMinScaleRatio;
    /// Offset between consecutive canonical arcs, as a fraction of the arc length.
    double stride = 0.5;
    unsigned jobs = 1;
};

/// A canonical rectangle with the curves incident to it. Curve indices run
/// over whites first (0..m-1), then blacks (m..m+n-1).
struct CanonicalRect {
    Rectangle rect;
    int curve;
    std::vector<int> whites;
    std::vector<int> blacks;
};

/// Canonical rectangles on every curve of W u B: arcs of length sqrt(delta/t)
/// at offsets `stride * sqrt(delta/t)`, each lying inside X. Ordered by
/// (curve index, arc center).
std::vector<CanonicalRect> canonical_family(const BipartitePair& P, const Window& X,
                                            const CensusOptions& options = {});

struct CensusEntry {
    Rectangle rect;
    int curve;
    int mu;
    int nu;
};

/// Pairwise incomparable rectangles of type (>= 1, >= 1).
struct RectCensus {
    std::vector<CensusEntry> entries;
    std::size_t size() const { return entries.size(); }
};

/// Throws PreconditionError when t < min_ratio * delta.
RectCensus rect_census(const BipartitePair& P, const Window& X, const CensusOptions& options = {});

/// Census rectangles with at least mu whites and nu blacks incident.
std::size_t count_type(const RectCensus& census, int mu, int nu);

/// CSV with header curve,arc_center,mu,nu.
void write_census_csv(std::ostream& os, const RectCensus& census);

struct ClusterSplit {
    std::vector<int> good;
    std::vector<std::vector<int>> clusters;
    /// The rectangle every member of the matching cluster is incident to.
    std::vector<Rectangle> representatives;
};

/// Repeatedly removes the remaining whites incident to the canonical
/// rectangle with the most remaining white incidences, while that count is at
/// least mu0 and some black is incident. What is left is W_good.
ClusterSplit cluster_split(const BipartitePair& P, const Window& X, int mu0, const CensusOptions& options = {});

}  // namespace circmax::tangency
