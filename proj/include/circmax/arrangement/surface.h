#pragma once

#include "circmax/common/random.h"
#include "circmax/geometry/phi_circle.h"

#include <array>
#include <optional>

namespace circmax::arrangement {

using geometry::PhiCircle;
using geometry::Window;

/// Offsets w are drawn from [0, delta / kOffsetDivisor)^3.
inline constexpr double kOffsetDivisor = 4.0;
/// Points with |x - x0| <= kApexClip * delta are removed from a surface.
inline constexpr double kApexClip = 4.0;
/// Smallest singular value of the defining map's Jacobian accepted by the probe.
inline constexpr double kRegularityFloor = 1e-6;

/// The two graphs r = f(x) making up a surface. `lower` holds circles
/// tangent to the base from inside, `upper` those containing it.
enum class Sheet { lower = 0, upper = 1 };

struct SheetPoint {
    double r = 0.0;
    /// Tangency point on the base curve.
    Vec2 y;
};

/// Circles (x, r) tangent to `base` at a point of the window, with the
/// offsets w = (w1, w2, w3) of the perturbed tangency system.
class TangencySurface {
public:
    TangencySurface(PhiCircle base, Window X, std::array<double, 3> w, double delta,
                    double apex_clip_factor = kApexClip);

    const PhiCircle& base() const { return base_; }
    const Window& window() const { return window_; }
    const std::array<double, 3>& w() const { return w_; }
    double delta() const { return delta_; }
    /// Radius of the excluded disk around the base center.
    double apex_clip() const { return apex_clip_; }

    /// Sheet value over x. With `windowed` false the tangency point may leave
    /// X. Empty inside the apex clip, off the window or when the solve fails.
    std::optional<SheetPoint> evaluate(Sheet s, const Vec2& x, bool windowed = true) const;

    /// Height of the sheet, NaN where undefined.
    double height(Sheet s, const Vec2& x, bool windowed = true) const;

    /// Smallest singular value of the Jacobian of (x, r, y) -> (Phi(x0, y) - r0,
    /// Phi(x, y) - r, grad Phi(x0, y) ^ grad Phi(x, y)) at `samples` random
    /// surface points with x in `centers`. +inf when no sample lands on the surface.
    double regularity_margin(Rng& rng, const Box2& centers, int samples = 16) const;

private:
    PhiCircle base_;
    /// Level set Phi(x0, .) = r0 + w1.
    PhiCircle level_;
    Window window_;
    std::array<double, 3> w_;
    double delta_;
    double apex_clip_;
};

/// The w = 0 surface: for Euclidean Phi the cone |x - x0| = |r - r0|.
TangencySurface exact_cone(const PhiCircle& g, const Window& X, double delta);

struct SurfaceOptions {
    int max_redraws = 100;
    int probe_samples = 16;
    geometry::ParameterDomain domain{};
};

/// Surface with w uniform in [0, delta / kOffsetDivisor)^3, redrawn while the
/// regularity probe is below kRegularityFloor. Throws PreconditionError for
/// delta <= 0 and RegularityError after max_redraws failures.
TangencySurface tangency_surface(const PhiCircle& g, const Window& X, double delta, Rng& rng,
                                 const SurfaceOptions& options = {});

/// Euclidean distance in (x, r)-space from (x~0, r~0) to the surface (both
/// sheets, windowed, no radius restriction). +inf for an empty surface.
double surface_distance(const TangencySurface& S, const PhiCircle& h);

/// Same, from an arbitrary point (x, r).
double surface_distance(const TangencySurface& S, const Vec2& x, double r);

/// Lower bound on surface_distance valid for Euclidean Phi: the distance to
/// the full w = 0 cone minus the offset shift. Zero for perturbed Phi.
double surface_distance_lower_bound(const TangencySurface& S, const Vec2& x, double r);

/// Ratio C with t < |x - x0| / C required by vertical_sheet_span.
inline constexpr double kSpanRatio = 4.0;

/// Whether S meets {|x - x'| < t, |r - r'| < C0 t} above every point of the
/// disk |x - x'| < t, tested on a polar grid with unwindowed heights. Throws
/// PreconditionError when t >= |x' - x0| / kSpanRatio.
bool vertical_sheet_span(const TangencySurface& S, const Vec2& x, double r, double t, double C0,
                         int n_radial = 8, int n_angular = 32);

/// One sheet of a surface in a family.
struct SurfacePatch {
    int parent = 0;
    Sheet sheet = Sheet::lower;

    int id() const { return 2 * parent + static_cast<int>(sheet); }
    static SurfacePatch from_id(int id) { return {id / 2, static_cast<Sheet>(id % 2)}; }
};

}  // namespace circmax::arrangement
