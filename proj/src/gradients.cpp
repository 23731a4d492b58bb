#include "cone/gradients.hpp"

#include "cone/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Derivative of a height function of (delta, hu, hv).
struct PlaneGrad {
    double d_delta = 0.0;
    double d_hu = 0.0;
    double d_hv = 0.0;
    bool nonsmooth = false;
    double margin = kInf;  // distance to the nearest kink
};

// Index of the largest of three branch values, earlier index winning ties,
// plus the gap to the runner-up.
struct Branch {
    int index;
    double gap;
};

Branch pick_branch(const std::array<double, 3>& vals) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (vals[k] > vals[best]) best = k;
    double gap = kInf;
    for (int k = 0; k < 3; ++k)
        if (k != best) gap = std::min(gap, vals[best] - vals[k]);
    return {best, gap};
}

PlaneGrad umbral_plane_grad(const PlaneCoords& p, double r) {
    const double inv = 1.0 / (2.0 * std::sinh(r));
    const double mid = p.delta * inv + 0.5 * (p.hu + p.hv);
    const Branch b = pick_branch({p.hu, p.hv, mid});
    PlaneGrad g;
    g.margin = b.gap;
    switch (b.index) {
    case 0: g.d_hu = 1.0; break;
    case 1: g.d_hv = 1.0; break;
    default:
        g.d_delta = inv;
        g.d_hu = 0.5;
        g.d_hv = 0.5;
        g.margin = std::min(g.margin, p.delta);
        break;
    }
    g.nonsmooth = g.margin <= kNonsmoothBand;
    return g;
}

PlaneGrad penumbral_plane_grad(const PlaneCoords& p, double h) {
    const double su = tangent_offset(p.hu, h);
    const double sv = tangent_offset(p.hv, h);
    PlaneGrad g;
    const double boundary_gap = std::abs(p.delta - (su + sv));
    if (penumbral_exists(p, h)) {
        const double m = 0.5 * (su + sv - p.delta);
        const double meet = std::sqrt((h - m) * (h + m));
        const Branch b = pick_branch({p.hu, p.hv, meet});
        g.margin = b.gap;
        switch (b.index) {
        case 0: g.d_hu = 1.0; break;
        case 1: g.d_hv = 1.0; break;
        default: {
            // d meet = -(m / meet) dm, dm = (dsu + dsv - ddelta) / 2, dsu/dhu = -hu / su
            const double k = m / meet;
            g.d_delta = 0.5 * k;
            g.d_hu = 0.5 * k * p.hu / su;
            g.d_hv = 0.5 * k * p.hv / sv;
            g.margin = std::min(g.margin, p.delta);
            break;
        }
        }
    } else {
        const double d = p.delta;
        const double a = p.hu * p.hu;
        const double bb = p.hv * p.hv;
        const double d2 = d * d;
        const double root = std::sqrt(d2 * d2 + (a - bb) * (a - bb) + 2.0 * d2 * (a + bb));
        const double height = root / (2.0 * d);
        g.d_delta = (d2 + a + bb) / root - height / d;
        g.d_hu = 2.0 * p.hu * (a - bb + d2) / (2.0 * d * root);
        g.d_hv = 2.0 * p.hv * (bb - a + d2) / (2.0 * d * root);
    }
    g.margin = std::min(g.margin, boundary_gap);
    g.nonsmooth = g.margin <= kNonsmoothBand;
    return g;
}

// Spreads a plane gradient of `scale * height` back onto coordinate rows.
PairGradient lift_plane_grad(std::span<const double> u, std::span<const double> v,
                             const PlaneCoords& plane, const PlaneGrad& g, double scale) {
    const std::size_t n = u.size();
    PairGradient out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), g.nonsmooth};
    if (plane.delta > 0.0 && g.d_delta != 0.0) {
        const double k = scale * g.d_delta / plane.delta;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double diff = u[i] - v[i];
            out.grad_u[i] = k * diff;
            out.grad_v[i] = -k * diff;
        }
    }
    out.grad_u[n - 1] = scale * g.d_hu;
    out.grad_v[n - 1] = scale * g.d_hv;
    return out;
}

PairGradient halfspace_distance_grad(std::span<const double> u, std::span<const double> v,
                                     double scale) {
    const std::size_t n = u.size();
    const double hu = u[n - 1];
    const double hv = v[n - 1];
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (u[i] - v[i]) * (u[i] - v[i]);
    const double q = sq / (2.0 * hu * hv);
    PairGradient out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), false};
    if (!(q > 0.0)) {
        out.nonsmooth = true;
        return out;
    }
    const double dd_dq = scale / std::sqrt(q * (q + 2.0));
    const double inv = 1.0 / (hu * hv);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double diff = (u[i] - v[i]) * inv;
        out.grad_u[i] = dd_dq * diff;
        out.grad_v[i] = -dd_dq * diff;
    }
    out.grad_u[n - 1] = dd_dq * ((hu - hv) * inv - q / hu);
    out.grad_v[n - 1] = dd_dq * ((hv - hu) * inv - q / hv);
    out.nonsmooth = std::acosh(1.0 + q) <= kNonsmoothBand;
    return out;
}

PairGradient hyperboloid_distance_grad(std::span<const double> p, std::span<const double> q,
                                       double scale) {
    const std::size_t n = p.size();
    const std::size_t t = n - 1;
    double sq = 0.0;
    for (std::size_t i = 0; i < t; ++i) sq += (p[i] - q[i]) * (p[i] - q[i]);
    const double dt = p[t] - q[t];
    const double excess = std::max(0.5 * (sq - dt * dt), 0.0);
    PairGradient out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), false};
    if (!(excess > 0.0)) {
        out.nonsmooth = true;
        return out;
    }
    // d acosh(a) / da with a = -<p,q>_M = 1 + excess
    const double k = scale / std::sqrt(excess * (excess + 2.0));
    for (std::size_t i = 0; i < t; ++i) {
        out.grad_u[i] = -k * q[i];
        out.grad_v[i] = -k * p[i];
    }
    out.grad_u[t] = k * q[t];
    out.grad_v[t] = k * p[t];
    out.nonsmooth = std::acosh(1.0 + excess) <= kNonsmoothBand;
    return out;
}

// Pieces of the exponential map at the origin, shared by value and Jacobian.
struct ExpOriginParts {
    double n;
    double horiz_den;   // n coth n - v_d
    double height_den;  // cosh n - v_d sinh(n)/n
    double sinc;        // sinh(n)/n
    double g1;          // (coth n - n / sinh^2 n) / n
    double g2;          // (n cosh n - sinh n) / n^3
};

ExpOriginParts exp_origin_parts(std::span<const double> v) {
    const std::size_t last = v.size() - 1;
    const double vd = v[last];
    double horiz_sq = 0.0;
    for (std::size_t i = 0; i < last; ++i) horiz_sq += v[i] * v[i];
    ExpOriginParts e{};
    e.n = std::sqrt(horiz_sq + vd * vd);
    const double n = e.n;
    const double n2 = n * n;
    if (n < 1e-6) {
        e.horiz_den = 1.0 + n2 / 3.0 - vd;
        e.height_den = 1.0 + n2 / 2.0 - vd * (1.0 + n2 / 6.0);
    } else {
        const double gap = vd > 0.0 ? horiz_sq / (n + vd) : n - vd;
        e.horiz_den = gap + 2.0 * n / std::expm1(2.0 * n);
        e.height_den = (gap * std::exp(n) + (n + vd) * std::exp(-n)) / (2.0 * n);
    }
    if (n < 1e-3) {
        e.sinc = 1.0 + n2 / 6.0;
        e.g1 = 2.0 / 3.0 - 4.0 * n2 / 45.0;
        e.g2 = 1.0 / 3.0 + n2 / 30.0;
    } else {
        const double sh = std::sinh(n);
        e.sinc = sh / n;
        e.g1 = (1.0 / std::tanh(n) - n / (sh * sh)) / n;
        e.g2 = (n * std::cosh(n) - sh) / (n2 * n);
    }
    return e;
}

}  // namespace

PairGradient pair_logit_grad(std::span<const double> u, std::span<const double> v,
                             const KernelConfig& config) {
    if (u.size() != v.size()) fail(ErrorCode::dimension, "pair_logit_grad: dimensions differ");
    const std::size_t n = u.size();
    switch (config.kind) {
    case KernelKind::penumbral: {
        const PlaneCoords plane = reduce_to_plane(u, v);
        return lift_plane_grad(u, v, plane, penumbral_plane_grad(plane, config.light_height),
                               -config.gamma);
    }
    case KernelKind::umbral: {
        const PlaneCoords plane = reduce_to_plane(u, v);
        return lift_plane_grad(u, v, plane, umbral_plane_grad(plane, config.ball_radius),
                               -config.gamma);
    }
    case KernelKind::dist_halfspace: return halfspace_distance_grad(u, v, -config.beta);
    case KernelKind::dist_hyperboloid: return hyperboloid_distance_grad(u, v, -config.beta);
    case KernelKind::laplacian: {
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) sq += (u[i] - v[i]) * (u[i] - v[i]);
        const double norm = std::sqrt(sq);
        PairGradient out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), norm <= kNonsmoothBand};
        if (norm > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                out.grad_u[i] = -config.gamma * (u[i] - v[i]) / norm;
                out.grad_v[i] = -out.grad_u[i];
            }
        }
        return out;
    }
    case KernelKind::dot: {
        const double inv = 1.0 / std::sqrt(static_cast<double>(n));
        PairGradient out{std::vector<double>(n), std::vector<double>(n), false};
        for (std::size_t i = 0; i < n; ++i) {
            out.grad_u[i] = v[i] * inv;
            out.grad_v[i] = u[i] * inv;
        }
        return out;
    }
    }
    fail(ErrorCode::domain, "unknown kernel");
}

PairGradient cone_logit_grad(const HalfSpacePoint& u, const HalfSpacePoint& v,
                             const KernelConfig& config) {
    if (!is_cone(config.kind)) fail(ErrorCode::domain, "cone_logit_grad: kernel is not a cone kernel");
    return pair_logit_grad(u.coords(), v.coords(), config);
}

double smoothness_margin(std::span<const double> u, std::span<const double> v,
                         const KernelConfig& config) {
    switch (config.kind) {
    case KernelKind::penumbral:
        return penumbral_plane_grad(reduce_to_plane(u, v), config.light_height).margin;
    case KernelKind::umbral: return umbral_plane_grad(reduce_to_plane(u, v), config.ball_radius).margin;
    case KernelKind::dist_halfspace: return halfspace_distance(u, v);
    case KernelKind::dist_hyperboloid: return hyperboloid_distance(u, v);
    case KernelKind::laplacian: return -laplacian_logit(u, v, 1.0);
    case KernelKind::dot: return kInf;
    }
    return kInf;
}

Matrix projection_jacobian(std::span<const double> x, ProjectionKind kind, double h) {
    const std::size_t n = x.size();
    if (n == 0) fail(ErrorCode::dimension, "projection_jacobian: empty input");
    const std::size_t last = n - 1;
    Matrix jac(n, n, 0.0);
    switch (kind) {
    case ProjectionKind::identity:
        for (std::size_t i = 0; i < n; ++i) jac(i, i) = 1.0;
        return jac;
    case ProjectionKind::psi: {
        const double e = std::exp(x[last]);
        for (std::size_t i = 0; i < last; ++i) {
            jac(i, i) = e;
            jac(i, last) = x[i] * e;
        }
        jac(last, last) = e;
        return jac;
    }
    case ProjectionKind::xi: {
        // s = h sigmoid(t), ds/dt = s (1 - sigmoid(t))
        const double t = x[last];
        const double sig = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
        const double one_minus = t >= 0.0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
        const double s = h * sig;
        const double ds = s * one_minus;
        for (std::size_t i = 0; i < last; ++i) {
            jac(i, i) = s;
            jac(i, last) = x[i] * ds;
        }
        jac(last, last) = ds;
        return jac;
    }
    case ProjectionKind::pseudopolar: {
        double norm = 0.0;
        for (std::size_t i = 0; i < last; ++i) norm += x[i] * x[i];
        norm = std::sqrt(norm);
        if (norm == 0.0) fail(ErrorCode::domain, "pseudopolar Jacobian undefined for a zero direction");
        const double sh = std::sinh(x[last]);
        const double ch = std::cosh(x[last]);
        const double inv = 1.0 / norm;
        for (std::size_t i = 0; i < last; ++i) {
            const double xi_hat = x[i] * inv;
            for (std::size_t j = 0; j < last; ++j)
                jac(i, j) = sh * ((i == j ? inv : 0.0) - xi_hat * x[j] * inv * inv);
            jac(i, last) = xi_hat * ch;
        }
        jac(last, last) = sh;
        return jac;
    }
    case ProjectionKind::exp_origin: {
        const ExpOriginParts e = exp_origin_parts(x);
        const double vd = x[last];
        const double a = e.horiz_den;
        const double b = e.height_den;
        const double height = 1.0 / b;
        const bool clamped = height > h * (1.0 - kLightClampGap);
        for (std::size_t j = 0; j < n; ++j) {
            const double da = e.g1 * x[j] - (j == last ? 1.0 : 0.0);
            const double db = e.sinc * x[j] - vd * e.g2 * x[j] - (j == last ? e.sinc : 0.0);
            for (std::size_t i = 0; i < last; ++i)
                jac(i, j) = (i == j ? 1.0 / a : 0.0) - x[i] * da / (a * a);
            jac(last, j) = clamped ? 0.0 : -db / (b * b);
        }
        return jac;
    }
    }
    fail(ErrorCode::domain, "unknown projection");
}

double raw_logit(std::span<const double> q, std::span<const double> k, const KernelConfig& config) {
    const ProjectionKind kind = resolve_projection(config);
    const double h = projection_height(config);
    const auto pu = project(q, kind, h);
    const auto pv = project(k, kind, h);
    return pair_logit(pu, pv, config);
}

PairGradient raw_logit_grad(std::span<const double> q, std::span<const double> k,
                            const KernelConfig& config) {
    if (q.size() != k.size()) fail(ErrorCode::dimension, "raw_logit_grad: dimensions differ");
    const ProjectionKind kind = resolve_projection(config);
    const double h = projection_height(config);
    const auto pu = project(q, kind, h);
    const auto pv = project(k, kind, h);
    const PairGradient inner = pair_logit_grad(pu, pv, config);
    const Matrix ju = projection_jacobian(q, kind, h);
    const Matrix jv = projection_jacobian(k, kind, h);
    const std::size_t n = q.size();
    PairGradient out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), inner.nonsmooth};
    for (std::size_t i = 0; i < ju.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.grad_u[j] += inner.grad_u[i] * ju(i, j);
            out.grad_v[j] += inner.grad_v[i] * jv(i, j);
        }
    }
    return out;
}

double raw_smoothness_margin(std::span<const double> q, std::span<const double> k,
                             const KernelConfig& config) {
    const ProjectionKind kind = resolve_projection(config);
    const double h = projection_height(config);
    const auto pu = project(q, kind, h);
    const auto pv = project(k, kind, h);
    double margin = smoothness_margin(pu, pv, config);
    if (kind == ProjectionKind::exp_origin && std::isfinite(h)) {
        const double cap = h * (1.0 - kLightClampGap);
        for (std::span<const double> x : {std::span<const double>(q), std::span<const double>(k)}) {
            const ExpOriginParts e = exp_origin_parts(x);
            margin = std::min(margin, std::abs(1.0 / e.height_den - cap));
        }
    }
    return margin;
}

std::vector<double> central_difference(const ScalarFn& fn, std::span<const double> point, double step) {
    std::vector<double> x(point.begin(), point.end());
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        volatile double plus = orig + step;
        volatile double minus = orig - step;
        x[i] = plus;
        const double fp = fn(x);
        x[i] = minus;
        const double fm = fn(x);
        x[i] = orig;
        out[i] = (fp - fm) / (plus - minus);
    }
    return out;
}

double finite_diff_check(const ScalarFn& fn, std::span<const double> point,
                         std::span<const double> analytic, double step) {
    if (analytic.size() != point.size())
        fail(ErrorCode::dimension, "finite_diff_check: gradient and point sizes differ");
    const auto numeric = central_difference(fn, point, step);
    double worst = 0.0;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), kRelativeErrorFloor});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
    return worst;
}

}  // namespace cone
