#pragma once

// Similarity logits. Cone kernels return L = -gamma * height(sup2(u, v)); the
// exponential is left to the softmax so large gamma * height cannot underflow.

#include "cone/geometry.hpp"
#include "cone/projections.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace cone {

enum class KernelKind { penumbral, umbral, dist_halfspace, dist_hyperboloid, laplacian, dot };

std::string_view to_string(KernelKind kind) noexcept;
std::optional<KernelKind> parse_kernel_kind(std::string_view name) noexcept;

inline constexpr double kDefaultLightHeight = 1.0;
inline constexpr double kDefaultBallRadius = 0.1;

struct KernelConfig {
    KernelKind kind = KernelKind::penumbral;
    double gamma = 1.0;                         // softmax temperature
    double light_height = kDefaultLightHeight;  // penumbral horosphere height h
    double ball_radius = kDefaultBallRadius;    // umbral occluder radius r
    double beta = 1.0;                          // distance attention scale
    double c = 0.0;                             // distance attention offset
    std::optional<ProjectionKind> projection;   // nullopt: per-kernel default

    /// Throws ErrorCode::domain on non-positive gamma, h, r or beta, or on a
    /// projection that cannot feed the kernel.
    void validate() const;
};

/// Projection used when the config does not override it: xi for penumbral
/// and half-space distance, psi for umbral, pseudopolar for hyperboloid
/// distance and identity for laplacian/dot.
ProjectionKind resolve_projection(const KernelConfig& config) noexcept;

/// Height passed to project() for this config (light height, or +inf when the
/// kernel has no light source).
double projection_height(const KernelConfig& config) noexcept;

bool is_cone(KernelKind kind) noexcept;

// Penumbral -----------------------------------------------------------------

/// A cone containing both points exists. Symmetrised: exists(u,v) || exists(v,u).
bool penumbral_exists(const PlaneCoords& plane, double h);
bool penumbral_exists(const HalfSpacePoint& u, const HalfSpacePoint& v, double h);

/// Height of sup2(u, v); when no common cone exists, the height of the lowest
/// light source under which one would.
double penumbral_height(const PlaneCoords& plane, double h);
double penumbral_height(const HalfSpacePoint& u, const HalfSpacePoint& v, double h);

// Umbral --------------------------------------------------------------------

double umbral_height(const PlaneCoords& plane, double r);
double umbral_height(const HalfSpacePoint& u, const HalfSpacePoint& v, double r);

// Logits --------------------------------------------------------------------

/// -gamma * height for kind penumbral or umbral.
double cone_logit(const HalfSpacePoint& u, const HalfSpacePoint& v, const KernelConfig& config);
double cone_logit(const PlaneCoords& plane, const KernelConfig& config);

double distance_logit(const HalfSpacePoint& u, const HalfSpacePoint& v, double beta, double c);
double distance_logit(const HyperboloidPoint& u, const HyperboloidPoint& v, double beta, double c);

double laplacian_logit(std::span<const double> u, std::span<const double> v, double gamma);
double dot_logit(std::span<const double> u, std::span<const double> v, std::size_t d);

/// Logit of two already-projected coordinate rows (the layout produced by
/// project()). This is the single scalar path the batched operator uses.
double pair_logit(std::span<const double> u, std::span<const double> v, const KernelConfig& config);

}  // namespace cone
