#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace circmax::tangency {

/// m x n 0/1 matrix stored as one column bitmask per row.
class IncidenceMatrix {
public:
    IncidenceMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool get(int i, int j) const { return (bits_[index(i, j)] >> (j % 64)) & 1u; }
    void set(int i, int j, bool value = true);
    const std::uint64_t* row_words(int i) const { return &bits_[static_cast<std::size_t>(i) * words_]; }
    int words() const { return words_; }
    long long ones() const;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * words_ + j / 64; }
    int rows_;
    int cols_;
    int words_;
    std::vector<std::uint64_t> bits_;
};

/// Rows (r0 < r1) and columns (c0 < c1 < c2) of an all-ones 2 x 3 submatrix.
struct KstWitness {
    std::array<int, 2> rows;
    std::array<int, 3> cols;
};

/// First witness in (row pair, column triple) lexicographic order, if any.
std::optional<KstWitness> kst_detect(const IncidenceMatrix& M);

struct KstBound {
    long long ones;
    double bound;
};

/// Ones of M against C_kst * m * n^(2/3). Throws PreconditionError when M has
/// a 2 x 3 all-ones submatrix.
KstBound kst_ones_bound(const IncidenceMatrix& M, double C_kst);

/// ones / (m n^(2/3)).
double kst_ratio(const IncidenceMatrix& M);

}  // namespace circmax::tangency
