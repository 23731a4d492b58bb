#pragma once

// Hand-derived first derivatives of every logit and projection.
//
// Gradients are taken with respect to projected coordinates (the rows
// project() produces) and composed with projection Jacobians to reach the
// Euclidean inputs. At max() ties the subgradient follows a fixed priority:
// the u-height branch, then the v-height branch, then the meeting-point
// expression. Points within kNonsmoothBand of a tie, of the penumbral
// existence boundary, or of zero separation are flagged as nonsmooth; a
// gradient is still returned for them.

#include "cone/geometry.hpp"
#include "cone/kernels.hpp"
#include "cone/matrix.hpp"
#include "cone/projections.hpp"

#include <functional>
#include <span>
#include <vector>

namespace cone {

inline constexpr double kNonsmoothBand = 1e-9;

struct PairGradient {
    std::vector<double> grad_u;
    std::vector<double> grad_v;
    bool nonsmooth = false;
};

/// Gradient of cone_logit with respect to both points' coordinates
/// (horizontal first, height last).
PairGradient cone_logit_grad(const HalfSpacePoint& u, const HalfSpacePoint& v,
                             const KernelConfig& config);

/// Gradient of pair_logit with respect to projected coordinate rows.
PairGradient pair_logit_grad(std::span<const double> u, std::span<const double> v,
                             const KernelConfig& config);

/// Jacobian d project(x) / dx, one row per output coordinate.
Matrix projection_jacobian(std::span<const double> x, ProjectionKind kind, double h);

/// Logit of two Euclidean inputs: project both with the config's projection,
/// then pair_logit.
double raw_logit(std::span<const double> q, std::span<const double> k, const KernelConfig& config);

/// Gradient of raw_logit with respect to the Euclidean inputs.
PairGradient raw_logit_grad(std::span<const double> q, std::span<const double> k,
                            const KernelConfig& config);

/// How far (in the kernel's own units) a projected pair sits from the nearest
/// kink of its logit. Infinite for kernels without kinks.
double smoothness_margin(std::span<const double> u, std::span<const double> v,
                         const KernelConfig& config);

/// smoothness_margin of the projected pair, also accounting for the height
/// clamp of exp_origin_project.
double raw_smoothness_margin(std::span<const double> q, std::span<const double> k,
                             const KernelConfig& config);

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(x + e_i s) - f(x - e_i s)) / (2 s), using the
/// actually representable step.
std::vector<double> central_difference(const ScalarFn& fn, std::span<const double> point,
                                       double step = 1e-6);

/// Relative errors below this magnitude are measured against it instead, so
/// vanishing gradient components are compared absolutely.
inline constexpr double kRelativeErrorFloor = 1e-3;

/// Worst per-coordinate relative error between `analytic` and central
/// differences of `fn` at `point`.
double finite_diff_check(const ScalarFn& fn, std::span<const double> point,
                         std::span<const double> analytic, double step = 1e-6);

}  // namespace cone
