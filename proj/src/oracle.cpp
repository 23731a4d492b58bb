#include "cone/oracle.hpp"

#include "cone/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace cone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Roots under a trial light height H sit this fraction below it, so that
// the predicate's "strictly below the light" precondition holds.
constexpr double kUnderLight = 1e-14;

using ColumnFn = std::function<double(double)>;

struct Plane2 {
    double delta, hu, hv;
};

Plane2 plane_of(const HalfSpacePoint& u, const HalfSpacePoint& v) {
    if (u.dim() != v.dim()) fail(ErrorCode::dimension, "oracle: points have different dimensions");
    const PlaneCoords p = reduce_to_plane(u, v);
    return {p.delta, p.hu, p.hv};
}

// Root at (x, y) in the reduced plane contains both points.
bool penumbral_root_ok(const Plane2& p, double x, double y, double light) {
    return penumbral_member(PlaneCoords{std::abs(x), y, p.hu}, light) &&
           penumbral_member(PlaneCoords{std::abs(p.delta - x), y, p.hv}, light);
}

bool umbral_root_ok(const Plane2& p, double x, double y, double r) {
    return umbral_member(PlaneCoords{std::abs(x), y, p.hu}, r) &&
           umbral_member(PlaneCoords{std::abs(p.delta - x), y, p.hv}, r);
}

// Smallest t in [lo, hi] with ok(t), assuming ok is monotone and ok(hi).
double bisect_lowest(double lo, double hi, const std::function<bool(double)>& ok) {
    if (ok(lo)) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

// Golden-section refinement of a quasi-convex column function around the
// best grid cell. The bracket always keeps the best point seen so far.
double refine_min(const ColumnFn& f, double a, double b, double c, double fb) {
    constexpr double kGold = 0.3819660112501051;
    for (int it = 0; it < 200; ++it) {
        const bool right = (c - b) > (b - a);
        const double x = right ? b + kGold * (c - b) : b - kGold * (b - a);
        if (x == b || c - a <= 1e-15 * std::max(1.0, std::abs(b))) break;
        const double fx = f(x);
        if (fx < fb) {
            (right ? a : c) = b;
            b = x;
            fb = fx;
        } else {
            (right ? c : a) = x;
        }
    }
    return fb;
}

double grid_minimum(const ColumnFn& f, double x0, double x1, std::size_t grid,
                    std::vector<double>* columns = nullptr) {
    if (grid < 2) fail(ErrorCode::domain, "oracle grid must have at least 2 columns");
    const double step = (x1 - x0) / static_cast<double>(grid - 1);
    std::vector<double> vals(grid);
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid; ++k) {
        vals[k] = f(x0 + step * static_cast<double>(k));
        if (vals[k] < vals[best]) best = k;
    }
    if (columns) *columns = vals;
    if (!std::isfinite(vals[best])) return kInf;
    const double b = x0 + step * static_cast<double>(best);
    const double a = best == 0 ? b : b - step;
    const double c = best + 1 == grid ? b : b + step;
    return refine_min(f, a, b, c, vals[best]);
}

struct SearchSetup {
    ColumnFn column;
    double x0, x1;
};

// Largest t in [lo, hi] with ok(t), assuming ok(lo) and ok monotone decreasing.
double bisect_highest(double lo, double hi, const std::function<bool(double)>& ok) {
    if (ok(hi)) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

// Columns are searched only where a root just under the light contains both
// points; every feasible column lies there, since raising a root widens its
// cone. Near the existence boundary this window is far narrower than any
// fixed grid step over the whole box.
SearchSetup penumbral_in_cone(const Plane2& p, double h) {
    const double lo = std::max(p.hu, p.hv);
    const double top = std::nextafter(h, 0.0);
    const double reach = h + p.delta;
    const double au = bisect_highest(0.0, reach, [&](double t) { return penumbral_member(PlaneCoords{t, top, p.hu}, h); });
    const double av = bisect_highest(0.0, reach, [&](double t) { return penumbral_member(PlaneCoords{t, top, p.hv}, h); });
    const double x0 = std::max(-au, p.delta - av);
    const double x1 = std::min(au, p.delta + av);
    ColumnFn column = [p, lo, top, h](double x) {
        if (!penumbral_root_ok(p, x, top, h)) return kInf;
        return bisect_lowest(lo, top, [&](double y) { return penumbral_root_ok(p, x, y, h); });
    };
    if (x0 > x1) return {[](double) { return kInf; }, -h, p.delta + h};
    return {column, x0, x1};
}

// Lowest light height H for which a root just under H at column x contains
// both points.
SearchSetup penumbral_light_search(const Plane2& p, double h) {
    const double floor = std::max(p.hu, p.hv);
    auto ok = [p, floor](double x, double light) {
        if (!(light > floor)) return false;
        const double y = light * (1.0 - kUnderLight);
        return y > floor && penumbral_root_ok(p, x, y, light);
    };
    return {[p, floor, ok](double x) {
                double hi = 2.0 * std::max(std::hypot(x, p.hu), std::hypot(p.delta - x, p.hv)) + floor;
                while (!ok(x, hi)) hi *= 2.0;
                return bisect_lowest(floor, hi, [&](double light) { return ok(x, light); });
            },
            -h, p.delta + h};
}

SearchSetup umbral_search(const Plane2& p, double r) {
    const double sh = std::sinh(r);
    const double lo = std::max(p.hu, p.hv);
    const double top = lo + p.delta / sh + 1.0;
    const double w = p.delta / sh + 1.0;
    return {[p, r, lo, top](double x) {
                if (!umbral_root_ok(p, x, top, r)) return kInf;
                return bisect_lowest(lo, top, [&](double y) { return umbral_root_ok(p, x, y, r); });
            },
            -w, p.delta + w};
}

void require_cone_kind(const KernelConfig& config) {
    if (!is_cone(config.kind)) fail(ErrorCode::domain, "oracle: kernel is not a cone kernel");
}

}  // namespace

Sup2 oracle_sup2_penumbral(const HalfSpacePoint& u, const HalfSpacePoint& v, double h, double tol) {
    const Plane2 p = plane_of(u, v);
    if (penumbral_member(PlaneCoords{p.delta, p.hu, p.hv}, h)) return {p.hu, HalfSpacePoint({0.0}, p.hu)};
    if (penumbral_member(PlaneCoords{p.delta, p.hv, p.hu}, h))
        return {p.hv, HalfSpacePoint({p.delta}, p.hv)};

    // Arc through u centred at +s_u (rising toward v) and arc through v
    // centred at delta - s_v (rising toward u).
    const double c1 = tangent_offset(p.hu, h);
    const double c2 = p.delta - tangent_offset(p.hv, h);
    double lo = std::max(c1, c2) - h;
    double hi = std::min(c1, c2) + h;
    if (!(lo < hi)) fail(ErrorCode::inconsistency, "penumbral oracle: boundary arcs do not cross below h");
    auto arc = [h](double x, double c) {
        const double t = x - c;
        return std::sqrt(std::max(0.0, (h - t) * (h + t)));
    };
    auto gap = [&](double x) { return arc(x, c1) - arc(x, c2); };
    const bool lo_sign = gap(lo) > 0.0;
    if (lo_sign == (gap(hi) > 0.0))
        fail(ErrorCode::inconsistency, "penumbral oracle: boundary arcs do not cross below h");
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        ((gap(mid) > 0.0) == lo_sign ? lo : hi) = mid;
    }
    const double x = lo + 0.5 * (hi - lo);
    const double y = 0.5 * (arc(x, c1) + arc(x, c2));
    if (!(y < h)) fail(ErrorCode::inconsistency, "penumbral oracle: crossing is not below the light source");
    const double slack = 1e-6 * h * h;
    if (!penumbral_member(PlaneCoords{std::abs(x), y, p.hu}, h, slack) ||
        !penumbral_member(PlaneCoords{std::abs(p.delta - x), y, p.hv}, h, slack))
        fail(ErrorCode::inconsistency, "penumbral oracle: crossing root does not contain both points");
    return {y, HalfSpacePoint({x}, y)};
}

Sup2 oracle_sup2_umbral(const HalfSpacePoint& u, const HalfSpacePoint& v, double r) {
    if (!(r > 0.0)) fail(ErrorCode::domain, "umbral oracle: radius must be positive");
    const Plane2 p = plane_of(u, v);
    if (umbral_member(PlaneCoords{p.delta, p.hu, p.hv}, r)) return {p.hu, HalfSpacePoint({0.0}, p.hu)};
    if (umbral_member(PlaneCoords{p.delta, p.hv, p.hu}, r)) return {p.hv, HalfSpacePoint({p.delta}, p.hv)};
    // y = hu + x / sinh r and y = hv + (delta - x) / sinh r.
    const long double sh = std::sinh(static_cast<long double>(r));
    const long double x = ((static_cast<long double>(p.hv) - p.hu) * sh + p.delta) / 2.0L;
    const long double y = p.hu + x / sh;
    return {static_cast<double>(y), HalfSpacePoint({static_cast<double>(x)}, static_cast<double>(y))};
}

double oracle_min_lightsource(const HalfSpacePoint& u, const HalfSpacePoint& v) {
    const Plane2 p = plane_of(u, v);
    if (!(p.delta > 0.0)) fail(ErrorCode::domain, "min light source undefined for coincident horizontals");
    // Centre c on the boundary with equal distance to u (at 0) and v (at delta):
    // c^2 + hu^2 - (c - delta)^2 - hv^2 is increasing in c.
    auto excess = [&](double c) { return c * c + p.hu * p.hu - (c - p.delta) * (c - p.delta) - p.hv * p.hv; };
    double bound = p.delta + (p.hu * p.hu + p.hv * p.hv) / p.delta + 1.0;
    double lo = -bound, hi = bound;
    for (int it = 0; it < 400; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double c = lo + 0.5 * (hi - lo);
    return std::hypot(c, p.hu);
}

double oracle_bruteforce_height(const HalfSpacePoint& u, const HalfSpacePoint& v,
                                const KernelConfig& config, std::size_t grid) {
    require_cone_kind(config);
    const Plane2 p = plane_of(u, v);
    if (config.kind == KernelKind::umbral) {
        const SearchSetup s = umbral_search(p, config.ball_radius);
        const double best = grid_minimum(s.column, s.x0, s.x1, grid);
        if (!std::isfinite(best)) fail(ErrorCode::inconsistency, "umbral brute force found no root in its box");
        return best;
    }
    const double h = config.light_height;
    const SearchSetup in = penumbral_in_cone(p, h);
    const double best = grid_minimum(in.column, in.x0, in.x1, grid);
    if (std::isfinite(best)) return best;
    const SearchSetup out = penumbral_light_search(p, h);
    const double light = grid_minimum(out.column, out.x0, out.x1, grid);
    if (penumbral_exists(PlaneCoords{p.delta, p.hu, p.hv}, h) && light > h * (1.0 + 1e-6))
        fail(ErrorCode::inconsistency, "brute force finds no common cone under light height " +
                                           std::to_string(h) + " but the existence test says one exists");
    return light;
}

std::vector<HalfSpacePoint> oracle_feasible_roots(const HalfSpacePoint& u, const HalfSpacePoint& v,
                                                  const KernelConfig& config, std::size_t grid) {
    require_cone_kind(config);
    const Plane2 p = plane_of(u, v);
    const SearchSetup s = config.kind == KernelKind::umbral ? umbral_search(p, config.ball_radius)
                                                            : penumbral_in_cone(p, config.light_height);
    std::vector<double> columns;
    grid_minimum(s.column, s.x0, s.x1, grid, &columns);
    std::vector<HalfSpacePoint> roots;
    const double step = (s.x1 - s.x0) / static_cast<double>(grid - 1);
    for (std::size_t k = 0; k < grid; ++k)
        if (std::isfinite(columns[k])) roots.emplace_back(std::vector<double>{s.x0 + step * k}, columns[k]);
    return roots;
}

double oracle_column_height(const HalfSpacePoint& u, const HalfSpacePoint& v,
                            std::span<const double> root_horizontal, const KernelConfig& config) {
    require_cone_kind(config);
    if (root_horizontal.size() + 1 != u.dim() || u.dim() != v.dim())
        fail(ErrorCode::dimension, "oracle_column_height: dimension mismatch");
    std::vector<double> horizontal(root_horizontal.begin(), root_horizontal.end());
    const double lo = std::max(u.height(), v.height());
    auto ok = [&](double y) {
        const HalfSpacePoint root(horizontal, y);
        if (config.kind == KernelKind::umbral)
            return umbral_member(root, u, config.ball_radius) && umbral_member(root, v, config.ball_radius);
        return penumbral_member(root, u, config.light_height) && penumbral_member(root, v, config.light_height);
    };
    double hi;
    if (config.kind == KernelKind::umbral) {
        hi = 2.0 * lo + 1.0;
        for (int it = 0; !ok(hi); ++it) {
            if (it > 2000) return kInf;
            hi *= 2.0;
        }
    } else {
        hi = std::nextafter(config.light_height, 0.0);
        if (!ok(hi)) return kInf;
    }
    return bisect_lowest(lo, hi, ok);
}

int lca_depth(const TreeSpec& tree, int a, int b) {
    int da = tree.depth(a);
    int db = tree.depth(b);
    while (da > db) {
        a = tree.parent(a);
        --da;
    }
    while (db > da) {
        b = tree.parent(b);
        --db;
    }
    while (a != b) {
        a = tree.parent(a);
        b = tree.parent(b);
        --da;
    }
    return da;
}

}  // namespace cone
