#pragma once

#include "circmax/arrangement/cutting.h"
#include "circmax/geometry/phi_circle.h"
#include "circmax/tangency/apollonius.h"
#include "circmax/tangency/kst.h"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace circmax::harness {

using geometry::PhiCircle;

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Family names accepted by make_family: random, pencil, concentric-shift.
std::vector<PhiCircle> make_family(const std::string& kind, int N, Rng& rng);

/// Pairs i < j with Delta_X < delta. The closed form screens pairs first.
std::size_t near_tangent_pairs(const std::vector<PhiCircle>& family, double delta, const geometry::Window& X,
                               unsigned jobs = 1);

struct TangencyCountOptions {
    std::vector<std::string> families{"random", "pencil", "concentric-shift"};
    std::vector<int> sizes{32, 64, 128, 256, 512};
    int seeds = 8;
    /// delta = delta_scale / N.
    double delta_scale = 0.1;
    /// Also census the family split into even (white) and odd (black) members.
    bool census = false;
    double census_t = 0.05;
    unsigned jobs = 1;
};

struct TangencyCountRow {
    std::string family;
    int N = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double delta = 0.0;
    std::size_t pairs = 0;
    /// count_type(census, 1, 1) of the split family; -1 when not computed.
    long long census = -1;
};

std::vector<TangencyCountRow> tangency_count(const TangencyCountOptions& options, std::uint64_t seed);
/// Slope of the per-N pair totals of one family.
double tangency_exponent(const std::vector<TangencyCountRow>& rows, const std::string& family);
void write_tangency_csv(std::ostream& os, const std::vector<TangencyCountRow>& rows);

struct CuttingExperimentOptions {
    int n = 500;
    int N = 50;
    int trials = 100;
    double delta = 1e-3;
    int grid = 128;
    /// Bound constant of C (n / N) log n.
    double C = 1.0;
    /// Reference blocks per trial for the tail statistics.
    int regions = 200;
    unsigned jobs = 1;
};

struct CuttingTrial {
    arrangement::CrossingRow row;
    double bound = 0.0;
    bool pass = false;
    std::vector<arrangement::TailObservation> tail;
};

/// One cutting per trial on a fresh random family; trial k uses stream k.
std::vector<CuttingTrial> cutting_experiment(const CuttingExperimentOptions& options, std::uint64_t seed);
/// CSV with header trial,seed,N,n,max_crossing,mean_crossing,bound,pass.
void write_cutting_csv(std::ostream& os, const std::vector<CuttingTrial>& trials);
std::vector<arrangement::TailObservation> pooled_tail(const std::vector<CuttingTrial>& trials);

struct DecomposeOptions {
    int N = 8;
    double delta = 1e-3;
    int grid = 128;
    /// Monte Carlo points for the containment scan.
    int points = 100000;
    /// Run crosses() for every (cell, source surface) pair.
    bool check_crosses = true;
    unsigned jobs = 1;
};

struct DecomposeStats {
    int N = 0;
    std::size_t cells = 0;
    std::size_t precells = 0;
    std::size_t max_defining = 0;
    std::size_t points = 0;
    std::size_t boundary = 0;
    /// Points in no cell though not on a boundary, or in more than one cell,
    /// or where locate disagrees with the scan.
    std::size_t containment_failures = 0;
    /// (cell, source surface) pairs reported as crossing.
    std::size_t crossed = 0;
    bool crosses_checked = false;
};

/// Cone family of N random circles, its decomposition and the checks.
/// The decomposition itself is copied to `built` when given.
DecomposeStats decompose_experiment(const DecomposeOptions& options, std::uint64_t seed,
                                    arrangement::Decomposition* built = nullptr);
void write_decompose_csv(std::ostream& os, const std::vector<DecomposeStats>& rows);

struct KstScan {
    int rows = 0;
    int cols = 0;
    std::uint64_t matrices = 0;
    /// Matrices where kst_detect and the brute-force search disagree.
    std::uint64_t mismatches = 0;
    std::uint64_t witness_free = 0;
    long long max_free_ones = 0;
    /// Largest kst_ratio among witness-free matrices.
    double max_ratio = 0.0;
};

/// Every 0/1 matrix of the shape (rows * cols <= 24).
KstScan kst_exhaustive(int rows, int cols, unsigned jobs = 1);
/// `trials` random matrices with entry density p.
KstScan kst_random(int rows, int cols, int trials, double p, Rng& rng);
/// Brute-force search for an all-ones 2 x 3 submatrix.
bool kst_brute_force(const tangency::IncidenceMatrix& M);

struct ApolloniusTrial {
    int trial = 0;
    std::uint64_t seed = 0;
    std::size_t survivors = 0;
    std::size_t clusters = 0;
    double max_diameter = 0.0;
    bool insufficient = false;
};

struct ApolloniusOptions {
    int trials = 20;
    double t = 0.03;
    double delta = 1e-6;
    std::size_t candidates = 20000;
    unsigned jobs = 1;
};

/// Window B((0.95, 0), 0.5); trial k uses stream k.
std::vector<ApolloniusTrial> apollonius_experiment(const ApolloniusOptions& options, std::uint64_t seed);
void write_apollonius_csv(std::ostream& os, const std::vector<ApolloniusTrial>& rows);

}  // namespace circmax::harness
