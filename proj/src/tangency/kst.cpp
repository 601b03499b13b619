#include "circmax/tangency/kst.h"

#include "circmax/common/error.h"

#include <bit>
#include <cmath>

namespace circmax::tangency {

IncidenceMatrix::IncidenceMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_(std::max(1, (cols + 63) / 64)) {
    if (rows < 0 || cols < 0) throw PreconditionError("matrix shape must be non-negative");
    bits_.assign(static_cast<std::size_t>(rows) * words_, 0);
}

void IncidenceMatrix::set(int i, int j, bool value) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw PreconditionError("matrix index out of range");
    const std::uint64_t bit = std::uint64_t{1} << (j % 64);
    if (value) bits_[index(i, j)] |= bit;
    else bits_[index(i, j)] &= ~bit;
}

long long IncidenceMatrix::ones() const {
    long long s = 0;
    for (auto w : bits_) s += std::popcount(w);
    return s;
}

std::optional<KstWitness> kst_detect(const IncidenceMatrix& M) {
    const int W = M.words();
    for (int a = 0; a < M.rows(); ++a) {
        const auto* ra = M.row_words(a);
        for (int b = a + 1; b < M.rows(); ++b) {
            const auto* rb = M.row_words(b);
            int common = 0;
            for (int w = 0; w < W && common < 3; ++w) common += std::popcount(ra[w] & rb[w]);
            if (common < 3) continue;
            KstWitness wit{{a, b}, {}};
            int k = 0;
            for (int w = 0; w < W && k < 3; ++w) {
                std::uint64_t both = ra[w] & rb[w];
                while (both && k < 3) {
                    wit.cols[k++] = w * 64 + std::countr_zero(both);
                    both &= both - 1;
                }
            }
            return wit;
        }
    }
    return std::nullopt;
}

double kst_ratio(const IncidenceMatrix& M) {
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    return static_cast<double>(M.ones()) / (M.rows() * std::cbrt(static_cast<double>(M.cols()) * M.cols()));
}

KstBound kst_ones_bound(const IncidenceMatrix& M, double C_kst) {
    if (kst_detect(M)) throw PreconditionError("matrix contains an all-ones 2 x 3 submatrix");
    return {M.ones(), C_kst * M.rows() * std::cbrt(static_cast<double>(M.cols()) * M.cols())};
}

}  // namespace circmax::tangency
