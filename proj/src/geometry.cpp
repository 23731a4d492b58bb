#include "cone/geometry.hpp"

#include "cone/errors.hpp"

#include <cmath>
#include <string>

namespace cone {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
    for (double x : xs)
        if (!std::isfinite(x)) fail(ErrorCode::domain, std::string(what) + ": non-finite coordinate");
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        fail(ErrorCode::dimension, std::string(what) + ": dimensions " + std::to_string(a) +
                                       " and " + std::to_string(b) + " differ");
    }
}

// acosh(1 + x) for x >= 0 without the cancellation of acosh near 1.
double acosh1p(double x) { return std::log1p(x + std::sqrt(x * (x + 2.0))); }

void require_below_light(double height, double h) {
    if (!(height < h)) {
        fail(ErrorCode::domain, "point at or above light source (height " + std::to_string(height) +
                                    ", light height " + std::to_string(h) + ")");
    }
}

}  // namespace

HalfSpacePoint::HalfSpacePoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) fail(ErrorCode::dimension, "half-space point needs at least one coordinate");
    require_finite(coords_, "half-space point");
    if (!(coords_.back() > 0.0)) fail(ErrorCode::domain, "half-space point height must be > 0");
}

HalfSpacePoint::HalfSpacePoint(std::vector<double> horizontal, double height)
    : HalfSpacePoint([&] {
          horizontal.push_back(height);
          return std::move(horizontal);
      }()) {}

HalfSpacePoint HalfSpacePoint::from_coords(std::span<const double> coords) {
    return HalfSpacePoint(std::vector<double>(coords.begin(), coords.end()));
}

HyperboloidPoint::HyperboloidPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) fail(ErrorCode::dimension, "hyperboloid point needs at least two coordinates");
    require_finite(coords_, "hyperboloid point");
    if (!(coords_.back() > 0.0)) fail(ErrorCode::domain, "hyperboloid point must lie on the upper sheet");
    double spatial_sq = 0.0;
    for (std::size_t i = 0; i + 1 < coords_.size(); ++i) spatial_sq += coords_[i] * coords_[i];
    const double t = coords_.back();
    const double residual = spatial_sq - t * t + 1.0;
    if (std::abs(residual) > 1e-6 * std::max(1.0, t * t))
        fail(ErrorCode::domain, "point is not on the hyperboloid (<x,x>_M + 1 = " +
                                    std::to_string(residual) + ")");
    coords_.back() = std::sqrt(1.0 + spatial_sq);
}

HyperboloidPoint HyperboloidPoint::from_spatial(std::span<const double> spatial) {
    if (spatial.empty()) fail(ErrorCode::dimension, "hyperboloid point needs spatial coordinates");
    require_finite(spatial, "hyperboloid point");
    std::vector<double> coords(spatial.begin(), spatial.end());
    double sq = 0.0;
    for (double x : spatial) sq += x * x;
    const double t = std::sqrt(1.0 + sq);
    if (!std::isfinite(t)) fail(ErrorCode::numeric_range, "hyperboloid time coordinate overflows");
    coords.push_back(t);
    return HyperboloidPoint(std::move(coords), Trusted{});
}

double halfspace_distance(std::span<const double> u, std::span<const double> v) {
    require_same_dim(u.size(), v.size(), "halfspace_distance");
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        sq += d * d;
    }
    return acosh1p(sq / (2.0 * u.back() * v.back()));
}

double halfspace_distance(const HalfSpacePoint& u, const HalfSpacePoint& v) {
    return halfspace_distance(u.coords(), v.coords());
}

double minkowski_inner(std::span<const double> p, std::span<const double> q) {
    require_same_dim(p.size(), q.size(), "minkowski_inner");
    const std::size_t t = p.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < t; ++i) acc += p[i] * q[i];
    return acc - p[t] * q[t];
}

double minkowski_inner(const HyperboloidPoint& p, const HyperboloidPoint& q) {
    return minkowski_inner(p.coords(), q.coords());
}

double hyperboloid_distance(std::span<const double> p, std::span<const double> q) {
    require_same_dim(p.size(), q.size(), "hyperboloid_distance");
    // -<p,q>_M - 1 = <p-q, p-q>_M / 2 on the manifold; the difference form keeps
    // precision for nearby points.
    const std::size_t t = p.size() - 1;
    double sq = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        const double d = p[i] - q[i];
        sq += d * d;
    }
    const double dt = p[t] - q[t];
    const double excess = 0.5 * (sq - dt * dt);
    if (!std::isfinite(excess)) fail(ErrorCode::numeric_range, "hyperboloid_distance: non-finite input");
    return acosh1p(std::max(excess, 0.0));
}

double hyperboloid_distance(const HyperboloidPoint& p, const HyperboloidPoint& q) {
    return hyperboloid_distance(p.coords(), q.coords());
}

HyperboloidPoint to_hyperboloid(const HalfSpacePoint& x) {
    const double y = x.height();
    double s = 0.0;
    for (double c : x.horizontal()) s += c * c;
    std::vector<double> spatial;
    spatial.reserve(x.dim());
    for (double c : x.horizontal()) spatial.push_back(c / y);
    spatial.push_back((1.0 - s - y * y) / (2.0 * y));
    return HyperboloidPoint::from_spatial(spatial);
}

HalfSpacePoint to_halfspace(const HyperboloidPoint& p) {
    const auto sp = p.spatial();
    const std::size_t last = sp.size() - 1;
    const double t = p.time();
    const double s = sp[last];
    // t + s = 1/y. When s < 0 the sum cancels, so use (t^2 - s^2)/(t - s).
    double sum;
    if (s >= 0.0) {
        sum = t + s;
    } else {
        double rest = 0.0;
        for (std::size_t i = 0; i < last; ++i) rest += sp[i] * sp[i];
        sum = (1.0 + rest) / (t - s);
    }
    const double y = 1.0 / sum;
    std::vector<double> horizontal;
    horizontal.reserve(last);
    for (std::size_t i = 0; i < last; ++i) horizontal.push_back(sp[i] * y);
    return HalfSpacePoint(std::move(horizontal), y);
}

HalfSpacePoint exp_map(const HalfSpacePoint& x, std::span<const double> v) {
    require_same_dim(x.dim(), v.size(), "exp_map");
    require_finite(v, "exp_map tangent");
    const std::size_t last = v.size() - 1;
    const double vd = v[last];
    double horiz_sq = 0.0;
    for (std::size_t i = 0; i < last; ++i) horiz_sq += v[i] * v[i];
    const double n = std::sqrt(horiz_sq + vd * vd);

    // horiz_den = |v|/tanh|v| - v_d,  height_den = cosh|v| - v_d sinh|v| / |v|
    double horiz_den;
    double height_den;
    if (n < 1e-6) {
        const double n2 = n * n;
        horiz_den = 1.0 + n2 / 3.0 - vd;
        height_den = 1.0 + n2 / 2.0 - vd * (1.0 + n2 / 6.0);
    } else {
        // |v| - v_d without cancellation when v is nearly vertical.
        const double gap = vd > 0.0 ? horiz_sq / (n + vd) : n - vd;
        horiz_den = gap + 2.0 * n / std::expm1(2.0 * n);
        height_den = (gap * std::exp(n) + (n + vd) * std::exp(-n)) / (2.0 * n);
    }

    const double xd = x.height();
    const double height = xd / height_den;
    if (!std::isfinite(height) || !(height > 0.0))
        fail(ErrorCode::numeric_range, "exp_map: result height out of double range (|v| = " +
                                           std::to_string(n) + ")");

    std::vector<double> coords(x.coords().begin(), x.coords().end());
    const double scale = xd / horiz_den;
    for (std::size_t i = 0; i < last; ++i) {
        if (v[i] != 0.0) coords[i] += scale * v[i];
        if (!std::isfinite(coords[i]))
            fail(ErrorCode::numeric_range, "exp_map: horizontal coordinate out of double range");
    }
    coords[last] = height;
    return HalfSpacePoint::from_coords(coords);
}

PlaneCoords reduce_to_plane(std::span<const double> u, std::span<const double> v) {
    require_same_dim(u.size(), v.size(), "reduce_to_plane");
    const std::size_t last = u.size() - 1;
    double sq = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        const double d = u[i] - v[i];
        sq += d * d;
    }
    return {std::sqrt(sq), u[last], v[last]};
}

PlaneCoords reduce_to_plane(const HalfSpacePoint& u, const HalfSpacePoint& v) {
    return reduce_to_plane(u.coords(), v.coords());
}

double tangent_offset(double height, double light_height) {
    return std::sqrt((light_height - height) * (light_height + height));
}

bool penumbral_member(const PlaneCoords& plane, double h, double slack) {
    require_below_light(plane.hu, h);
    require_below_light(plane.hv, h);
    // Inside both radius-h discs centred at +-s on either side of the parent:
    //   (delta -+ s)^2 + hv^2 <= h^2, rewritten with s^2 = h^2 - hu^2 so that the
    //   delta = 0 case reduces to hv^2 <= hu^2 exactly.
    const double s = tangent_offset(plane.hu, h);
    const double d2 = plane.delta * plane.delta;
    const double cross = 2.0 * plane.delta * s;
    const double hv2 = plane.hv * plane.hv;
    const double hu2 = plane.hu * plane.hu;
    return d2 + cross + hv2 <= hu2 + slack && d2 - cross + hv2 <= hu2 + slack;
}

bool penumbral_member(const HalfSpacePoint& parent, const HalfSpacePoint& child, double h,
                      double slack) {
    return penumbral_member(reduce_to_plane(parent, child), h, slack);
}

bool umbral_member(const PlaneCoords& plane, double r, double slack) {
    return plane.hv <= plane.hu - plane.delta / std::sinh(r) + slack;
}

bool umbral_member(const HalfSpacePoint& parent, const HalfSpacePoint& child, double r,
                   double slack) {
    return umbral_member(reduce_to_plane(parent, child), r, slack);
}

}  // namespace cone
