#pragma once

// Maps from Euclidean parameters onto the hyperbolic models, plus the Klein
// model helpers used for Einstein-midpoint aggregation.
//
// The last Euclidean coordinate always selects the height (or the radial
// coordinate for the pseudopolar map); the leading coordinates are carried
// along as horizontal directions.

#include "cone/geometry.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cone {

enum class ProjectionKind {
    identity,     // raw Euclidean vectors (laplacian / dot kernels)
    psi,          // (x_{:-1} e^{x_d}, e^{x_d})
    xi,           // (x_{:-1} s, s), s = h * sigmoid(x_d)
    exp_origin,   // Exp at (0,...,0,1), height clamped below the light source
    pseudopolar,  // (x̂_{:-1} sinh x_d, cosh x_d) on the hyperboloid
};

std::string_view to_string(ProjectionKind kind) noexcept;
std::optional<ProjectionKind> parse_projection_kind(std::string_view name) noexcept;

/// Smallest height xi() will return; sigmoid underflow is clamped here.
inline constexpr double kXiHeightFloor = 2.2250738585072014e-308;  // DBL_MIN

/// Relative gap kept between exp_origin_project heights and the light source.
inline constexpr double kLightClampGap = 1e-9;

HalfSpacePoint psi(std::span<const double> x);
HalfSpacePoint xi(std::span<const double> x, double h);
HyperboloidPoint pseudopolar(std::span<const double> x);
HalfSpacePoint exp_origin_project(std::span<const double> v, double h);

std::vector<double> hyperboloid_to_klein(const HyperboloidPoint& p);
HyperboloidPoint klein_to_hyperboloid(std::span<const double> x);

/// Weighted Einstein midpoint of Klein-model points.
std::vector<double> einstein_midpoint(std::span<const double> weights,
                                      const std::vector<std::vector<double>>& points);

/// Applies a projection and returns the raw coordinates of the result:
/// half-space coordinates (height last) or hyperboloid ambient coordinates.
/// `h` is the light height for xi and the clamp height for exp_origin.
std::vector<double> project(std::span<const double> x, ProjectionKind kind, double h);

}  // namespace cone
