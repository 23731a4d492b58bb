#pragma once

// Poincare half-space and hyperboloid primitives.
//
// Half-space points are stored as a flat coordinate vector whose last entry is
// the height (x_d > 0). Every batched routine in the library works on such
// rows directly, so the span overloads below are the hot paths and the
// point-typed overloads are thin validating wrappers around them.

#include <cstddef>
#include <span>
#include <vector>

namespace cone {

class HalfSpacePoint {
public:
    HalfSpacePoint(std::vector<double> horizontal, double height);

    /// Coordinates with the height last.
    static HalfSpacePoint from_coords(std::span<const double> coords);

    std::size_t dim() const noexcept { return coords_.size(); }
    std::span<const double> horizontal() const noexcept {
        return {coords_.data(), coords_.size() - 1};
    }
    double height() const noexcept { return coords_.back(); }
    std::span<const double> coords() const noexcept { return coords_; }

    friend bool operator==(const HalfSpacePoint&, const HalfSpacePoint&) = default;

private:
    explicit HalfSpacePoint(std::vector<double> coords);
    std::vector<double> coords_;
};

/// Point on the upper sheet of the hyperboloid <x,x>_M = -1, time coordinate last.
class HyperboloidPoint {
public:
    /// Accepts ambient coordinates that are already on the hyperboloid up to
    /// rounding and re-solves the time coordinate so the constraint holds to
    /// machine precision. Rejects points that are clearly off the manifold.
    explicit HyperboloidPoint(std::vector<double> coords);

    /// Lifts spatial coordinates; the time coordinate is sqrt(1 + |x|^2).
    static HyperboloidPoint from_spatial(std::span<const double> spatial);

    /// Manifold dimension (ambient dimension minus one).
    std::size_t dim() const noexcept { return coords_.size() - 1; }
    std::span<const double> coords() const noexcept { return coords_; }
    std::span<const double> spatial() const noexcept { return {coords_.data(), coords_.size() - 1}; }
    double time() const noexcept { return coords_.back(); }

    friend bool operator==(const HyperboloidPoint&, const HyperboloidPoint&) = default;

private:
    struct Trusted {};
    HyperboloidPoint(std::vector<double> coords, Trusted) : coords_(std::move(coords)) {}
    std::vector<double> coords_;
};

/// The reduced-plane triple every cone kernel depends on.
struct PlaneCoords {
    double delta;  // horizontal Euclidean distance, >= 0
    double hu;     // height of the first point
    double hv;     // height of the second point
};

double halfspace_distance(const HalfSpacePoint& u, const HalfSpacePoint& v);
double halfspace_distance(std::span<const double> u, std::span<const double> v);

double minkowski_inner(const HyperboloidPoint& p, const HyperboloidPoint& q);
double minkowski_inner(std::span<const double> p, std::span<const double> q);

/// arcosh(-<p,q>_M). The argument is clamped at 1; with on-manifold inputs the
/// clamp only ever absorbs rounding within ~1e-12 of 1.
double hyperboloid_distance(const HyperboloidPoint& p, const HyperboloidPoint& q);
double hyperboloid_distance(std::span<const double> p, std::span<const double> q);

/// Isometries between the half-space and the hyperboloid.
HyperboloidPoint to_hyperboloid(const HalfSpacePoint& x);
HalfSpacePoint to_halfspace(const HyperboloidPoint& p);

/// Exponential map at x. The tangent vector v is given in the orthonormal
/// frame at x, so the geodesic distance from x to the result equals |v|.
/// Throws ErrorCode::numeric_range when the result leaves double range.
HalfSpacePoint exp_map(const HalfSpacePoint& x, std::span<const double> v);

PlaneCoords reduce_to_plane(const HalfSpacePoint& u, const HalfSpacePoint& v);
PlaneCoords reduce_to_plane(std::span<const double> u, std::span<const double> v);

/// sqrt(h^2 - y^2): horizontal offset from a point at height y to the centres
/// of the two radius-h geodesics through it that touch the light horosphere.
double tangent_offset(double height, double light_height);

/// Child lies in the penumbral cone of parent (light horosphere at height h).
/// Both heights must be strictly below h. `slack` loosens the defining
/// inequalities, used when testing transitivity under rounding.
bool penumbral_member(const HalfSpacePoint& parent, const HalfSpacePoint& child, double h,
                      double slack = 0.0);
/// Reduced-plane form: plane.hu is the parent height, plane.hv the child height.
bool penumbral_member(const PlaneCoords& plane, double h, double slack = 0.0);

/// Child lies in the umbral cone of parent for occluding balls of radius r.
bool umbral_member(const HalfSpacePoint& parent, const HalfSpacePoint& child, double r,
                   double slack = 0.0);
bool umbral_member(const PlaneCoords& plane, double r, double slack = 0.0);

}  // namespace cone
