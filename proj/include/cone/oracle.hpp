#pragma once

// Independent recomputations of sup2 heights. None of these call the closed
// forms in kernels.hpp; the brute-force search touches the geometry only
// through the membership predicates.

#include "cone/geometry.hpp"
#include "cone/kernels.hpp"
#include "cone/tree.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cone {

/// Height of sup2 and its root, expressed in the reduced plane (u at
/// horizontal 0, v at horizontal delta).
struct Sup2 {
    double height;
    HalfSpacePoint root;
};

/// Bisects for the crossing of the radius-h boundary arc rising from u
/// toward v and the one rising from v toward u. Throws inconsistency when no
/// crossing below h exists, or when the crossing fails to contain both points.
Sup2 oracle_sup2_penumbral(const HalfSpacePoint& u, const HalfSpacePoint& v, double h,
                           double tol = 1e-9);

/// Intersects the lines of slope +-1/sinh(r) through u and v.
Sup2 oracle_sup2_umbral(const HalfSpacePoint& u, const HalfSpacePoint& v, double r);

/// Radius of the boundary-centred semicircle through u and v, with the
/// centre found by bisection. Requires distinct horizontal positions.
double oracle_min_lightsource(const HalfSpacePoint& u, const HalfSpacePoint& v);

/// Grid search over candidate roots in the reduced plane followed by a
/// golden-section refinement. Penumbral columns span only the window where a
/// root just under the light contains both points, found by bisecting the
/// membership predicates. For penumbral pairs with no common cone under
/// the configured light, searches for the lowest light height that admits one.
double oracle_bruteforce_height(const HalfSpacePoint& u, const HalfSpacePoint& v,
                                const KernelConfig& config, std::size_t grid = 2000);

/// Lowest root (in the reduced plane) of each grid column that admits a cone
/// containing both points. Penumbral pairs without a common cone give an
/// empty list.
std::vector<HalfSpacePoint> oracle_feasible_roots(const HalfSpacePoint& u, const HalfSpacePoint& v,
                                                  const KernelConfig& config, std::size_t grid = 2000);

/// Lowest height of a root with the given horizontal position (full
/// dimension, not reduced) whose cone contains both u and v, found by
/// bisection on the membership predicates. +infinity when no such root
/// exists below the light source.
double oracle_column_height(const HalfSpacePoint& u, const HalfSpacePoint& v,
                            std::span<const double> root_horizontal, const KernelConfig& config);

/// Depth of the lowest common ancestor by walking parent pointers.
int lca_depth(const TreeSpec& tree, int a, int b);

}  // namespace cone
