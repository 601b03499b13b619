#pragma once

#include "circmax/arrangement/decomposition.h"
#include "circmax/tangency/bipartite.h"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace circmax::arrangement {

struct CuttingOptions {
    /// Precondition N <= n / C.
    double C = 10.0;
    /// Skip the N < n / C check (tests with N = n).
    bool relax_precondition = false;
    DecompositionOptions decomposition{128, 3, 1e-12};
    ParameterDomain box{};
    /// Draws allowed before sampling gives up.
    int max_draws = 100000;
};

struct Cutting {
    /// Family indices of the dividing surfaces, in draw order.
    std::vector<int> sample;
    /// Surfaces of the whole family; sampled entries may have been redrawn
    /// inside the decomposition.
    std::vector<TangencySurface> family_surfaces;
    Decomposition decomposition;
    /// Per cell, sorted family indices of the surfaces crossing it.
    std::vector<std::vector<int>> crossing_lists;

    std::size_t max_crossing() const;
    double mean_crossing() const;
};

/// Samples N distinct circles (redrawing on collision), decomposes with their
/// surfaces and lists, per cell, the family surfaces meeting it at pixel
/// centers. Throws PreconditionError unless N <= n / C and SamplingError when
/// N distinct circles cannot be drawn.
Cutting cutting(const std::vector<PhiCircle>& family, int N, double delta, const Window& X, Rng& rng,
                const CuttingOptions& options = {});

/// C (n / N) log n.
double crossing_bound(int n, int N, double C);

/// An axis-aligned block of (x, r)-space.
struct ReferenceRegion {
    Box2 x;
    double r_lo = 0.0;
    double r_hi = 0.0;
};

/// Blocks with sides log-uniform in [min_side, max_side], inside the box.
std::vector<ReferenceRegion> reference_regions(Rng& rng, int count, const ParameterDomain& box = {},
                                               double min_side = 5e-3, double max_side = 5e-2);

/// Whether a sheet of S passes through the block (heights on a k x k grid,
/// joined by continuity).
bool meets(const TangencySurface& S, const ReferenceRegion& region, int k = 5);

/// For one cutting and one block: Z = number of family surfaces meeting the
/// block, and whether no dividing surface meets it.
struct TailObservation {
    int crossings = 0;
    bool avoided = false;
};
std::vector<TailObservation> tail_observations(const Cutting& cut, const std::vector<ReferenceRegion>& regions);

/// Frequency of avoidance among blocks with Z >= lambda against the
/// bound (1 - lambda / n)^N, using the upper binomial quantile at `level`.
struct TailStats {
    double lambda = 0.0;
    std::size_t trials = 0;
    std::size_t avoided = 0;
    double bound = 0.0;
    std::size_t upper_band = 0;
    bool pass = true;
};
TailStats tail_test(const std::vector<TailObservation>& observations, double lambda, int n, int N,
                    double level = 0.99);

/// Smallest k with P(Bin(trials, p) <= k) >= level.
std::size_t binomial_upper_quantile(std::size_t trials, double p, double level);

struct CrossingRow {
    std::uint64_t seed = 0;
    int N = 0;
    int n = 0;
    std::size_t max_crossing = 0;
    double mean_crossing = 0.0;
};
/// CSV with header seed,N,n,max_crossing,mean_crossing.
void write_crossing_csv(std::ostream& os, const std::vector<CrossingRow>& rows);

struct PartitionOptions {
    /// Whites within C_surface delta of a dividing surface go to W*.
    double C_surface = 4.0;
    /// Blacks with Delta < C_tangent delta to a member of W_i go to B_i.
    double C_tangent = 4.0;
    CuttingOptions cutting{};
};

struct CellGroup {
    int cell = 0;
    std::vector<int> whites;
    std::vector<int> blacks;
};

struct WhitePartition {
    std::vector<int> sample;
    std::vector<int> w_star;
    std::vector<CellGroup> groups;
    std::size_t max_black_group() const;
};

/// Splits the whites of P into W* and per-cell groups W_i (closure
/// membership), each with its black group B_i.
WhitePartition partition_white(const tangency::BipartitePair& P, int N, double delta, const Window& X, Rng& rng,
                               const PartitionOptions& options = {});

/// Every white appears exactly once across W* and the groups.
bool is_exact_partition(const WhitePartition& part, std::size_t whites);

}  // namespace circmax::arrangement
