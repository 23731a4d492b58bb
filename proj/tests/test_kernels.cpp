#include "cone/attention.hpp"
#include "cone/errors.hpp"
#include "cone/kernels.hpp"
#include "cone/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace cone;
using testing::Big;
using testing::Rng;

namespace {

KernelConfig cfg(KernelKind kind, double gamma = 1.0) {
    KernelConfig c;
    c.kind = kind;
    c.gamma = gamma;
    return c;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("penumbral_exists examples") {
    const HalfSpacePoint a({0.0}, 0.6), b({0.3}, 0.8);
    CHECK(penumbral_exists(a, b, 1.0));
    CHECK(!oracle_feasible_roots(a, b, cfg(KernelKind::penumbral)).empty());
    CHECK(penumbral_exists(a, a, 1.0));

    const HalfSpacePoint c({0.0}, 0.9), d({2.5}, 0.9);
    CHECK_FALSE(penumbral_exists(c, d, 1.0));
    CHECK(oracle_feasible_roots(c, d, cfg(KernelKind::penumbral)).empty());

    CHECK_THROWS_AS(penumbral_exists(HalfSpacePoint({0.0}, 1.0), a, 1.0), Error);
}

TEST_CASE("penumbral_exists agrees with the brute-force feasibility search") {
    Rng rng(31);
    for (int k = 0; k < 200; ++k) {
        const auto u = rng.point(2, 0.02, 0.98);
        const auto v = rng.point(2, 0.02, 0.98);
        const auto p = reduce_to_plane(u, v);
        const double su = tangent_offset(p.hu, 1.0), sv = tangent_offset(p.hv, 1.0);
        if (std::abs(p.delta - (su + sv)) < 1e-2) continue;  // grid cannot resolve the boundary
        CHECK(penumbral_exists(u, v, 1.0) == !oracle_feasible_roots(u, v, cfg(KernelKind::penumbral)).empty());
    }
}

TEST_CASE("penumbral_height examples") {
    for (double t : {0.1, 0.5, 0.9}) {
        const HalfSpacePoint u({0.4}, t);
        CHECK(penumbral_height(u, u, 1.0) == doctest::Approx(t).epsilon(1e-15));
    }
    const HalfSpacePoint a({0.0}, 0.6), b({0.3}, 0.8);
    const double got = penumbral_height(a, b, 1.0);
    CHECK(got == doctest::Approx(std::sqrt(1.0 - 0.3025)).epsilon(1e-14));
    CHECK(std::abs(got - 0.835165) < 1e-6);
    CHECK(std::abs(got - oracle_sup2_penumbral(a, b, 1.0).height) < 1e-9);
    CHECK(std::abs(got - oracle_bruteforce_height(a, b, cfg(KernelKind::penumbral))) < 1e-6);
}

TEST_CASE("penumbral_height on the existence boundary equals the light height") {
    Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        const double h = rng.uniform(0.5, 2.0);
        const double hu = rng.uniform(0.05, 0.95) * h, hv = rng.uniform(0.05, 0.95) * h;
        const double delta = tangent_offset(hu, h) + tangent_offset(hv, h);
        const double at = penumbral_height(PlaneCoords{delta, hu, hv}, h);
        CHECK(std::abs(at - h) <= 1e-12 * h);
        KernelConfig c = cfg(KernelKind::penumbral, 1.3);
        c.light_height = h;
        CHECK(std::abs(std::exp(cone_logit(PlaneCoords{delta, hu, hv}, c)) - std::exp(-1.3 * h)) <= 1e-6);
        const double in = penumbral_height(PlaneCoords{delta - 1e-7, hu, hv}, h);
        const double out = penumbral_height(PlaneCoords{delta + 1e-7, hu, hv}, h);
        CHECK(std::abs(in - out) <= 1e-5);
    }
}

TEST_CASE("umbral_height examples") {
    const HalfSpacePoint u({0.0}, 0.5), v({0.2}, 0.5);
    CHECK(umbral_height(u, u, 0.1) == 0.5);
    const double got = umbral_height(u, v, 0.1);
    // extended precision line intersection
    const Big expected = Big(0.2) / (2 * boost::multiprecision::sinh(Big(0.1))) + Big(0.5);
    CHECK(std::abs(got - expected.convert_to<double>()) < 1e-14);
    CHECK(std::abs(got - 1.49833) < 1e-5);
    CHECK(std::abs(got - oracle_sup2_umbral(u, v, 0.1).height) < 1e-12);

    const HalfSpacePoint top({0.0}, 1.0), deep({0.05}, 0.4);
    CHECK(umbral_member(top, deep, 0.1));
    CHECK(umbral_height(top, deep, 0.1) == 1.0);
}

TEST_CASE("cone_logit examples and monotonicity") {
    const HalfSpacePoint u({0.0}, 0.35);
    CHECK(cone_logit(u, u, cfg(KernelKind::penumbral)) == -0.35);
    const HalfSpacePoint a({0.0}, 0.5), b({0.2}, 0.5);
    CHECK(cone_logit(a, b, cfg(KernelKind::umbral, 2.0)) == doctest::Approx(-2.99667).epsilon(1e-5));
    CHECK(cone_logit(a, b, cfg(KernelKind::umbral, 2.0)) ==
          doctest::Approx(-2.0 * oracle_sup2_umbral(a, b, 0.1).height).epsilon(1e-14));
    CHECK_THROWS_AS(cone_logit(a, b, cfg(KernelKind::dot)), Error);

    Rng rng(9);
    for (auto kind : {KernelKind::penumbral, KernelKind::umbral}) {
        for (int k = 0; k < 100; ++k) {
            const auto p = rng.point(3, 0.05, 0.95);
            const auto q = rng.point(3, 0.05, 0.95);
            std::vector<double> dir(q.horizontal().begin(), q.horizontal().end());
            for (std::size_t i = 0; i < 2; ++i) dir[i] -= p.horizontal()[i];
            double prev = INFINITY;
            for (double t = 0.0; t <= 3.0; t += 0.01) {
                std::vector<double> h{p.horizontal()[0] + t * dir[0], p.horizontal()[1] + t * dir[1]};
                const double l = cone_logit(p, HalfSpacePoint(h, q.height()), cfg(kind));
                CHECK(l <= prev);
                prev = l;
            }
        }
    }
}

TEST_CASE("distance, laplacian and dot logits") {
    const HalfSpacePoint u({0.0}, 1.0), v({0.0}, std::exp(1.0));
    CHECK(distance_logit(u, u, 2.0, 0.5) == -0.5);
    CHECK(distance_logit(u, v, 1.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    Rng rng(10);
    for (int k = 0; k < 50; ++k) {
        const auto p = HyperboloidPoint::from_spatial(rng.normals(3));
        const auto q = HyperboloidPoint::from_spatial(rng.normals(3));
        const double expected = -1.5 * std::acosh(-minkowski_inner(p, q)) - 0.25;
        CHECK(distance_logit(p, q, 1.5, 0.25) == doctest::Approx(expected).epsilon(1e-10));
    }

    const std::vector<double> a{3.0, 4.0}, z{0.0, 0.0};
    CHECK(laplacian_logit(a, a, 1.0) == 0.0);
    CHECK(laplacian_logit(a, z, 1.0) == -5.0);
    const std::vector<double> two{2.0, 0.0};
    CHECK(laplacian_logit(two, z, 0.5) == -1.0);

    const std::vector<double> e1{1.0, 0.0, 0.0, 0.0}, e2{0.0, 1.0, 0.0, 0.0};
    CHECK(dot_logit(e1, e2, 4) == 0.0);
    CHECK(dot_logit(e1, e1, 4) == 0.5);
    const std::vector<double> p{1.0, 2.0}, q{3.0, 4.0};
    CHECK(dot_logit(p, q, 2) == doctest::Approx(11.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(dot_logit(p, e1, 2), Error);
}

TEST_CASE("cone logits are symmetric, including across the branch split") {
    Rng rng(13);
    int in = 0, out = 0;
    for (int k = 0; k < 10000; ++k) {
        const auto u = rng.point(3, 0.01, 0.99, 1.5);
        const auto v = rng.point(3, 0.01, 0.99, 1.5);
        CHECK(penumbral_exists(u, v, 1.0) == penumbral_exists(v, u, 1.0));
        (penumbral_exists(u, v, 1.0) ? in : out)++;
        for (auto kind : {KernelKind::penumbral, KernelKind::umbral})
            CHECK(std::abs(cone_logit(u, v, cfg(kind)) - cone_logit(v, u, cfg(kind))) <= 1e-12);
    }
    CHECK(in > 1000);
    CHECK(out > 1000);
}

TEST_CASE("containment consistency") {
    Rng rng(14);
    int umbral_in = 0, pen_in = 0;
    for (int k = 0; k < 5000; ++k) {
        const auto u = rng.point(2, 0.05, 0.95, 0.2);
        const auto v = rng.point(2, 0.01, 0.95, 0.2);
        const auto p = reduce_to_plane(u, v);
        const bool um = umbral_member(u, v, 0.1);
        umbral_in += um;
        CHECK(um == (std::abs(umbral_height(p, 0.1) - p.hu) <= 1e-12));
        if (penumbral_member(u, v, 1.0)) {
            ++pen_in;
            CHECK(penumbral_height(p, 1.0) == p.hu);
        }
    }
    CHECK(umbral_in > 100);
    CHECK(pen_in > 100);
}

TEST_CASE("ordering by sup2 height is preserved exactly by the logit") {
    Rng rng(15);
    for (int k = 0; k < 2000; ++k) {
        const auto u = rng.point(2, 0.05, 0.95);
        const auto v = rng.point(2, 0.05, 0.95);
        const auto w = rng.point(2, 0.05, 0.95);
        for (auto kind : {KernelKind::penumbral, KernelKind::umbral}) {
            const KernelConfig c = cfg(kind, 1.7);
            const auto hv = kind == KernelKind::penumbral ? penumbral_height(u, v, 1.0) : umbral_height(u, v, 0.1);
            const auto hw = kind == KernelKind::penumbral ? penumbral_height(u, w, 1.0) : umbral_height(u, w, 0.1);
            if (hv < hw) CHECK(cone_logit(u, v, c) > cone_logit(u, w, c));
        }
    }
}

TEST_CASE("umbral logits reduce to the Laplacian kernel at equal heights") {
    Rng rng(16);
    const double r = 0.1, gamma = 1.3;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5, m = 7, d = 4;
        const double height = rng.uniform(0.1, 3.0);
        Matrix q(n, d), k(m, d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j + 1 < d; ++j) q(i, j) = rng.normal();
            q(i, d - 1) = rng.uniform(0.1, 3.0);
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j + 1 < d; ++j) k(i, j) = rng.normal();
            k(i, d - 1) = height;
        }
        // identity-like feed: hand over half-space rows directly
        Matrix logits(n, m), lap(n, m);
        KernelConfig c = cfg(KernelKind::umbral, gamma);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                std::vector<double> qq(q.row(i).begin(), q.row(i).end());
                qq[d - 1] = height;  // equal heights for the pair
                logits(i, j) = pair_logit(qq, k.row(j), c);
                lap(i, j) = laplacian_logit(std::span<const double>(qq).first(d - 1), k.row(j).first(d - 1),
                                            gamma / (2.0 * std::sinh(r)));
            }
        }
        CHECK(testing::max_abs_diff(softmax_rows(logits), softmax_rows(lap)) <= 1e-9);
    }
}

TEST_CASE("config validation and names") {
    KernelConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(resolve_projection(c) == ProjectionKind::xi);
    c.gamma = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.gamma = 1.0;
    c.light_height = -1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.light_height = 1.0;
    c.projection = ProjectionKind::pseudopolar;
    CHECK_THROWS_AS(c.validate(), Error);
    c.kind = KernelKind::dist_hyperboloid;
    CHECK_NOTHROW(c.validate());
    c.projection.reset();
    c.kind = KernelKind::umbral;
    CHECK(resolve_projection(c) == ProjectionKind::psi);
    CHECK(std::isinf(projection_height(c)));
    c.kind = KernelKind::laplacian;
    CHECK(resolve_projection(c) == ProjectionKind::identity);
    c.ball_radius = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    for (auto k : {KernelKind::penumbral, KernelKind::umbral, KernelKind::dist_halfspace, KernelKind::dist_hyperboloid,
                   KernelKind::laplacian, KernelKind::dot})
        CHECK(parse_kernel_kind(to_string(k)) == k);
    CHECK_FALSE(parse_kernel_kind("cosine").has_value());
}

}  // TEST_SUITE
