#include "cone/projections.hpp"

#include "cone/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cone {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
    for (double x : xs)
        if (!std::isfinite(x)) fail(ErrorCode::domain, std::string(what) + ": non-finite input");
}

void require_nonempty(std::span<const double> xs, const char* what) {
    if (xs.empty()) fail(ErrorCode::dimension, std::string(what) + ": empty input");
}

HalfSpacePoint scale_family(std::span<const double> x, double height) {
    std::vector<double> coords(x.begin(), x.end());
    for (std::size_t i = 0; i + 1 < coords.size(); ++i) coords[i] *= height;
    coords.back() = height;
    return HalfSpacePoint::from_coords(coords);
}

}  // namespace

std::string_view to_string(ProjectionKind kind) noexcept {
    switch (kind) {
    case ProjectionKind::identity: return "identity";
    case ProjectionKind::psi: return "psi";
    case ProjectionKind::xi: return "xi";
    case ProjectionKind::exp_origin: return "exp_origin";
    case ProjectionKind::pseudopolar: return "pseudopolar";
    }
    return "?";
}

std::optional<ProjectionKind> parse_projection_kind(std::string_view name) noexcept {
    for (auto k : {ProjectionKind::identity, ProjectionKind::psi, ProjectionKind::xi,
                   ProjectionKind::exp_origin, ProjectionKind::pseudopolar})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

HalfSpacePoint psi(std::span<const double> x) {
    require_nonempty(x, "psi");
    require_finite(x, "psi");
    const double height = std::exp(x.back());
    if (!std::isfinite(height) || height < std::numeric_limits<double>::min())
        fail(ErrorCode::numeric_range, "psi: exp(" + std::to_string(x.back()) + ") out of double range");
    HalfSpacePoint p = scale_family(x, height);
    for (double c : p.horizontal())
        if (!std::isfinite(c)) fail(ErrorCode::numeric_range, "psi: horizontal coordinate overflows");
    return p;
}

HalfSpacePoint xi(std::span<const double> x, double h) {
    require_nonempty(x, "xi");
    require_finite(x, "xi");
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::domain, "xi: light height must be positive");
    const double t = x.back();
    double s;
    if (t >= 0.0) {
        s = h / (1.0 + std::exp(-t));
    } else {
        const double e = std::exp(t);
        s = h * e / (1.0 + e);
    }
    // Keep the height strictly inside (0, h).
    s = std::clamp(s, kXiHeightFloor, std::nextafter(h, 0.0));
    return scale_family(x, s);
}

HyperboloidPoint pseudopolar(std::span<const double> x) {
    require_nonempty(x, "pseudopolar");
    require_finite(x, "pseudopolar");
    const double radial = x.back();
    const std::size_t last = x.size() - 1;
    double norm = 0.0;
    for (std::size_t i = 0; i < last; ++i) norm += x[i] * x[i];
    norm = std::sqrt(norm);
    std::vector<double> coords(x.size());
    if (norm == 0.0) {
        if (radial != 0.0) fail(ErrorCode::domain, "pseudopolar: zero direction with nonzero radius");
        coords.back() = 1.0;
        return HyperboloidPoint(std::move(coords));
    }
    const double sh = std::sinh(radial);
    const double ch = std::cosh(radial);
    if (!std::isfinite(ch)) fail(ErrorCode::numeric_range, "pseudopolar: cosh overflows");
    for (std::size_t i = 0; i < last; ++i) coords[i] = x[i] / norm * sh;
    coords.back() = ch;
    return HyperboloidPoint(std::move(coords));
}

HalfSpacePoint exp_origin_project(std::span<const double> v, double h) {
    require_nonempty(v, "exp_origin_project");
    const HalfSpacePoint origin(std::vector<double>(v.size() - 1, 0.0), 1.0);
    HalfSpacePoint p = exp_map(origin, v);
    const double cap = h * (1.0 - kLightClampGap);
    if (p.height() <= cap) return p;
    std::vector<double> coords(p.coords().begin(), p.coords().end());
    coords.back() = cap;
    return HalfSpacePoint::from_coords(coords);
}

std::vector<double> hyperboloid_to_klein(const HyperboloidPoint& p) {
    std::vector<double> out(p.spatial().begin(), p.spatial().end());
    for (double& c : out) c /= p.time();
    return out;
}

HyperboloidPoint klein_to_hyperboloid(std::span<const double> x) {
    require_nonempty(x, "klein_to_hyperboloid");
    require_finite(x, "klein_to_hyperboloid");
    double sq = 0.0;
    for (double c : x) sq += c * c;
    if (!(sq < 1.0)) fail(ErrorCode::domain, "klein_to_hyperboloid: point outside the unit ball");
    const double lorentz = 1.0 / std::sqrt((1.0 - std::sqrt(sq)) * (1.0 + std::sqrt(sq)));
    std::vector<double> coords;
    coords.reserve(x.size() + 1);
    for (double c : x) coords.push_back(c * lorentz);
    coords.push_back(lorentz);
    return HyperboloidPoint(std::move(coords));
}

std::vector<double> einstein_midpoint(std::span<const double> weights,
                                      const std::vector<std::vector<double>>& points) {
    if (points.empty()) fail(ErrorCode::domain, "einstein_midpoint: no points");
    if (weights.size() != points.size())
        fail(ErrorCode::dimension, "einstein_midpoint: weight count does not match point count");
    const std::size_t dim = points.front().size();
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::domain, "einstein_midpoint: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::domain, "einstein_midpoint: weights must sum to 1");

    std::vector<double> num(dim, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& v = points[i];
        if (v.size() != dim) fail(ErrorCode::dimension, "einstein_midpoint: ragged points");
        double sq = 0.0;
        for (double c : v) sq += c * c;
        if (!(sq < 1.0)) fail(ErrorCode::domain, "einstein_midpoint: point outside the unit ball");
        const double g = weights[i] / std::sqrt(1.0 - sq);
        for (std::size_t j = 0; j < dim; ++j) num[j] += g * v[j];
        den += g;
    }
    if (!(den > 0.0)) fail(ErrorCode::domain, "einstein_midpoint: all weights are zero");
    for (double& c : num) c /= den;
    return num;
}

std::vector<double> project(std::span<const double> x, ProjectionKind kind, double h) {
    switch (kind) {
    case ProjectionKind::identity: {
        require_finite(x, "identity projection");
        return {x.begin(), x.end()};
    }
    case ProjectionKind::psi: {
        auto p = psi(x);
        return {p.coords().begin(), p.coords().end()};
    }
    case ProjectionKind::xi: {
        auto p = xi(x, h);
        return {p.coords().begin(), p.coords().end()};
    }
    case ProjectionKind::exp_origin: {
        auto p = exp_origin_project(x, h);
        return {p.coords().begin(), p.coords().end()};
    }
    case ProjectionKind::pseudopolar: {
        auto p = pseudopolar(x);
        return {p.coords().begin(), p.coords().end()};
    }
    }
    fail(ErrorCode::domain, "unknown projection");
}

}  // namespace cone
