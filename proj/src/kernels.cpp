#include "cone/kernels.hpp"

#include "cone/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cone {

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        fail(ErrorCode::domain, std::string(name) + " must be a positive finite number");
}

void require_below_light(const PlaneCoords& p, double h) {
    if (!(p.hu < h) || !(p.hv < h)) fail(ErrorCode::domain, "point at or above light source");
}

bool is_halfspace_projection(ProjectionKind k) {
    return k == ProjectionKind::psi || k == ProjectionKind::xi || k == ProjectionKind::exp_origin;
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
    case KernelKind::penumbral: return "penumbral";
    case KernelKind::umbral: return "umbral";
    case KernelKind::dist_halfspace: return "dist_halfspace";
    case KernelKind::dist_hyperboloid: return "dist_hyperboloid";
    case KernelKind::laplacian: return "laplacian";
    case KernelKind::dot: return "dot";
    }
    return "?";
}

std::optional<KernelKind> parse_kernel_kind(std::string_view name) noexcept {
    for (auto k : {KernelKind::penumbral, KernelKind::umbral, KernelKind::dist_halfspace,
                   KernelKind::dist_hyperboloid, KernelKind::laplacian, KernelKind::dot})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

bool is_cone(KernelKind kind) noexcept {
    return kind == KernelKind::penumbral || kind == KernelKind::umbral;
}

ProjectionKind resolve_projection(const KernelConfig& config) noexcept {
    if (config.projection) return *config.projection;
    switch (config.kind) {
    case KernelKind::penumbral: return ProjectionKind::xi;
    case KernelKind::umbral: return ProjectionKind::psi;
    case KernelKind::dist_halfspace: return ProjectionKind::xi;
    case KernelKind::dist_hyperboloid: return ProjectionKind::pseudopolar;
    case KernelKind::laplacian:
    case KernelKind::dot: return ProjectionKind::identity;
    }
    return ProjectionKind::identity;
}

double projection_height(const KernelConfig& config) noexcept {
    if (config.kind == KernelKind::penumbral || resolve_projection(config) == ProjectionKind::xi)
        return config.light_height;
    return std::numeric_limits<double>::infinity();
}

void KernelConfig::validate() const {
    require_positive(gamma, "gamma");
    require_positive(light_height, "light_height");
    require_positive(ball_radius, "ball_radius");
    require_positive(beta, "beta");
    if (!std::isfinite(c)) fail(ErrorCode::domain, "c must be finite");
    const ProjectionKind p = resolve_projection(*this);
    bool ok = false;
    switch (kind) {
    case KernelKind::penumbral:
    case KernelKind::umbral:
    case KernelKind::dist_halfspace: ok = is_halfspace_projection(p); break;
    case KernelKind::dist_hyperboloid: ok = p == ProjectionKind::pseudopolar; break;
    case KernelKind::laplacian:
    case KernelKind::dot: ok = p == ProjectionKind::identity; break;
    }
    if (!ok)
        fail(ErrorCode::domain, "projection '" + std::string(to_string(p)) + "' cannot feed kernel '" +
                                    std::string(to_string(kind)) + "'");
}

bool penumbral_exists(const PlaneCoords& p, double h) {
    require_below_light(p, h);
    const double su = tangent_offset(p.hu, h);
    const double sv = tangent_offset(p.hv, h);
    const double h2 = h * h;
    auto one_sided = [&](double s_first, double h_second) {
        const double d = p.delta - s_first;
        return d * d + h_second * h_second < h2 || p.delta <= s_first;
    };
    return one_sided(su, p.hv) || one_sided(sv, p.hu);
}

bool penumbral_exists(const HalfSpacePoint& u, const HalfSpacePoint& v, double h) {
    return penumbral_exists(reduce_to_plane(u, v), h);
}

double penumbral_height(const PlaneCoords& p, double h) {
    if (penumbral_exists(p, h)) {
        const double su = tangent_offset(p.hu, h);
        const double sv = tangent_offset(p.hv, h);
        const double m = 0.5 * (su + sv - p.delta);
        const double meet = std::sqrt((h - m) * (h + m));
        return std::max({p.hu, p.hv, meet});
    }
    // Radius of the geodesic semicircle through both points, written in a form
    // that is symmetric in (hu, hv) bit for bit.
    const double d = p.delta;
    if (!(d > 0.0)) fail(ErrorCode::inconsistency, "penumbral fallback reached with zero separation");
    const double a = p.hu * p.hu;
    const double b = p.hv * p.hv;
    const double d2 = d * d;
    const double diff = a - b;
    return std::sqrt(d2 * d2 + diff * diff + 2.0 * d2 * (a + b)) / (2.0 * d);
}

double penumbral_height(const HalfSpacePoint& u, const HalfSpacePoint& v, double h) {
    return penumbral_height(reduce_to_plane(u, v), h);
}

double umbral_height(const PlaneCoords& p, double r) {
    const double mid = p.delta / (2.0 * std::sinh(r)) + 0.5 * (p.hu + p.hv);
    return std::max({p.hu, p.hv, mid});
}

double umbral_height(const HalfSpacePoint& u, const HalfSpacePoint& v, double r) {
    return umbral_height(reduce_to_plane(u, v), r);
}

double cone_logit(const PlaneCoords& plane, const KernelConfig& config) {
    switch (config.kind) {
    case KernelKind::penumbral: return -config.gamma * penumbral_height(plane, config.light_height);
    case KernelKind::umbral: return -config.gamma * umbral_height(plane, config.ball_radius);
    default: fail(ErrorCode::domain, "cone_logit: kernel is not a cone kernel");
    }
}

double cone_logit(const HalfSpacePoint& u, const HalfSpacePoint& v, const KernelConfig& config) {
    return cone_logit(reduce_to_plane(u, v), config);
}

double distance_logit(const HalfSpacePoint& u, const HalfSpacePoint& v, double beta, double c) {
    return -beta * halfspace_distance(u, v) - c;
}

double distance_logit(const HyperboloidPoint& u, const HyperboloidPoint& v, double beta, double c) {
    return -beta * hyperboloid_distance(u, v) - c;
}

double laplacian_logit(std::span<const double> u, std::span<const double> v, double gamma) {
    if (u.size() != v.size()) fail(ErrorCode::dimension, "laplacian_logit: dimensions differ");
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        sq += d * d;
    }
    return -gamma * std::sqrt(sq);
}

double dot_logit(std::span<const double> u, std::span<const double> v, std::size_t d) {
    if (u.size() != v.size()) fail(ErrorCode::dimension, "dot_logit: dimensions differ");
    if (d == 0) fail(ErrorCode::domain, "dot_logit: d must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc / std::sqrt(static_cast<double>(d));
}

double pair_logit(std::span<const double> u, std::span<const double> v, const KernelConfig& config) {
    switch (config.kind) {
    case KernelKind::penumbral:
    case KernelKind::umbral: return cone_logit(reduce_to_plane(u, v), config);
    case KernelKind::dist_halfspace: return -config.beta * halfspace_distance(u, v) - config.c;
    case KernelKind::dist_hyperboloid: return -config.beta * hyperboloid_distance(u, v) - config.c;
    case KernelKind::laplacian: return laplacian_logit(u, v, config.gamma);
    case KernelKind::dot: return dot_logit(u, v, u.size());
    }
    fail(ErrorCode::domain, "unknown kernel");
}

}  // namespace cone
