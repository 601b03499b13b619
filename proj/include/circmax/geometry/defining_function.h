#pragma once

#include "circmax/common/types.h"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace circmax::geometry {

/// Exponents of x1, x2, y1, y2 in a monomial of the perturbation polynomial.
using Exponents = std::array<int, 4>;

/// Monomials of total degree <= `degree` in graded lexicographic order:
/// ascending total degree, and within one degree lexicographically
/// descending in (x1, x2, y1, y2). This is the coefficient order of the
/// serialized record.
std::vector<Exponents> grlex_monomials(int degree);

/// Half-width of the reference box [-2, 2]^2 shared by x and y.
inline constexpr double kReferenceHalfWidth = 2.0;

/// Default bound on the third-order partials of a perturbation.
inline constexpr double kDefaultSmallness = 0.05;

/// The map Phi(x, y): either |x - y| or |x - y| + P(x, y) with P a small
/// polynomial in the four coordinates.
class DefiningFunction {
public:
    enum class Kind { euclidean, perturbed };

    static DefiningFunction euclidean();

    /// `coefficients` follow grlex_monomials(degree). Throws DomainError when a
    /// coefficient is not finite or the third-order bound reaches `smallness`.
    static DefiningFunction perturbed(int degree, std::vector<double> coefficients,
                                      double smallness = kDefaultSmallness);

    Kind kind() const { return kind_; }
    bool is_euclidean() const { return kind_ == Kind::euclidean; }
    int degree() const { return degree_; }
    std::span<const double> coefficients() const { return coefficients_; }

    /// Upper bound for sup |d^3 P| over the reference box (0 for Euclidean).
    double c3_bound() const { return c3_bound_; }

    /// Both x and y must lie in this box for checked evaluation.
    const Box2& reference_box() const { return reference_box_; }

    /// Phi(x, y); throws DomainError outside the reference box.
    double operator()(const Vec2& x, const Vec2& y) const;
    double eval(const Vec2& x, const Vec2& y) const { return (*this)(x, y); }

    /// Phi(x, y) without the domain check; hot loops use this.
    double eval_unchecked(const Vec2& x, const Vec2& y) const {
        const double d = (x - y).norm();
        return is_euclidean() ? d : d + perturbation(x, y);
    }

    /// Gradient of Phi(x, .) at y. Throws SingularityError when |x - y| < 1e-9.
    Vec2 grad_y(const Vec2& x, const Vec2& y) const;

    /// Hessian of Phi(x, .) at y. Same singularity rule as grad_y.
    Mat2 hess_y(const Vec2& x, const Vec2& y) const;

    /// P(x, y).
    double perturbation(const Vec2& x, const Vec2& y) const;
    /// Gradient of P(x, .) at y.
    Vec2 perturbation_grad_y(const Vec2& x, const Vec2& y) const;

private:
    DefiningFunction() = default;

    Kind kind_ = Kind::euclidean;
    int degree_ = 0;
    std::vector<double> coefficients_;
    std::vector<Exponents> monomials_;
    double c3_bound_ = 0.0;
    Box2 reference_box_ = Box2::square(Vec2::Zero(), kReferenceHalfWidth);
};

/// Distance below which the Euclidean y-gradient is treated as undefined.
inline constexpr double kSingularDistance = 1e-9;

/// Structured text record: `kind`, `degree`, `coefficients` (grlex order).
std::string serialize(const DefiningFunction& phi);
DefiningFunction parse_defining_function(std::string_view text);

/// Determinant test of the cinematic curvature condition at (a, b).
struct CinematicResult {
    double gradient_norm = 0.0;
    double determinant = 0.0;
};

/// |grad_y Phi(a, b)| and the 2x2 determinant of the x-gradients of
///   e . grad_y Phi(x, b)   and   e . grad_y (e . grad_y Phi(x, y) / |grad_y Phi(x, y)|) at y = b,
/// with e the +90 degree rotation of the unit gradient at (a, b). The
/// x-derivatives use central differences with step `fd_step`.
CinematicResult cinematic_check(const DefiningFunction& phi, const Vec2& a, const Vec2& b,
                                double fd_step = 1e-5);

}  // namespace circmax::geometry
