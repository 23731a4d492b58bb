#include "cone/attention.hpp"
#include "cone/errors.hpp"
#include "cone/gradients.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using namespace cone;
using testing::max_abs_diff;
using testing::Rng;

namespace {

KernelConfig cfg(KernelKind kind) {
    KernelConfig c;
    c.kind = kind;
    return c;
}

AttentionBatch random_batch(Rng& rng, std::size_t n, std::size_t m, std::size_t d, std::size_t dv) {
    return AttentionBatch{rng.matrix(n, d), rng.matrix(m, d), rng.matrix(m, dv), std::nullopt};
}

// Plain triple loop with a textbook softmax.
Matrix naive_dot_attention(const AttentionBatch& b) {
    const std::size_t n = b.queries.rows(), m = b.keys.rows(), d = b.queries.cols();
    Matrix out(n, b.values.cols());
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> s(m);
        for (std::size_t j = 0; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += b.queries(i, k) * b.keys(j, k);
            s[j] = dot / std::sqrt(double(d));
        }
        const double mx = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        for (double& x : s) z += (x = std::exp(x - mx));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < out.cols(); ++k) out(i, k) += s[j] / z * b.values(j, k);
    }
    return out;
}

}  // namespace

TEST_SUITE("attention") {

TEST_CASE("single query and key returns the value row") {
    const AttentionBatch b{Matrix{{0.3, 0.2}}, Matrix{{-0.1, 0.4}}, Matrix{{7.0, -2.0, 0.5}}, std::nullopt};
    for (auto kind : {KernelKind::penumbral, KernelKind::umbral, KernelKind::dist_halfspace, KernelKind::dist_hyperboloid,
                      KernelKind::laplacian, KernelKind::dot}) {
        const Matrix out = attend(b, cfg(kind));
        CHECK(out == b.values);
    }
}

TEST_CASE("dot attention matches a naive reference") {
    Rng rng(60);
    const auto b = random_batch(rng, 17, 23, 8, 5);
    CHECK(max_abs_diff(attend(b, cfg(KernelKind::dot)), naive_dot_attention(b)) <= 1e-12);
}

TEST_CASE("batched logits agree with scalar evaluation") {
    Rng rng(61);
    const auto b = random_batch(rng, 9, 11, 4, 2);
    for (auto kind : {KernelKind::penumbral, KernelKind::umbral, KernelKind::dist_halfspace, KernelKind::dist_hyperboloid,
                      KernelKind::laplacian, KernelKind::dot}) {
        const Matrix l = pairwise_logits(b, cfg(kind));
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 11; ++j)
                CHECK(std::abs(l(i, j) - raw_logit(b.queries.row(i), b.keys.row(j), cfg(kind))) <= 1e-12);
    }
}

TEST_CASE("softmax examples") {
    const Matrix eq = softmax_rows(Matrix{{2.0, 2.0, 2.0, 2.0}});
    for (std::size_t j = 0; j < 4; ++j) CHECK(eq(0, j) == 0.25);

    const double ninf = -std::numeric_limits<double>::infinity();
    const Matrix masked = softmax_rows(Matrix{{0.0, ninf}});
    CHECK(masked(0, 0) == 1.0);
    CHECK(masked(0, 1) == 0.0);

    const Matrix big = softmax_rows(Matrix{{1000.0, 1001.0}});
    CHECK(big(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-15));
    CHECK(big(0, 1) == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))).epsilon(1e-15));

    CHECK_THROWS_AS(softmax_rows(Matrix{{ninf, ninf}}), Error);
}

TEST_CASE("one key gives that key's value for every query") {
    Rng rng(62);
    const auto b = random_batch(rng, 6, 1, 3, 4);
    const Matrix out = attend(b, cfg(KernelKind::penumbral));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t k = 0; k < 4; ++k) CHECK(out(i, k) == b.values(0, k));
}

TEST_CASE("identical keys give the mean of the values") {
    Rng rng(63);
    auto b = random_batch(rng, 4, 5, 3, 2);
    for (std::size_t j = 1; j < 5; ++j)
        for (std::size_t k = 0; k < 3; ++k) b.keys(j, k) = b.keys(0, k);
    const Matrix out = attend(b, cfg(KernelKind::umbral));
    for (std::size_t k = 0; k < 2; ++k) {
        double mean = 0.0;
        for (std::size_t j = 0; j < 5; ++j) mean += b.values(j, k);
        mean /= 5.0;
        for (std::size_t i = 0; i < 4; ++i) CHECK(out(i, k) == doctest::Approx(mean).epsilon(1e-14));
    }
}

TEST_CASE("multi_head equals slicing, attending and stitching") {
    Rng rng(64);
    const auto b = random_batch(rng, 7, 9, 8, 8);
    for (std::size_t heads : {1u, 2u, 4u}) {
        for (auto kind : {KernelKind::penumbral, KernelKind::dot}) {
            const Matrix got = multi_head(b, cfg(kind), heads);
            const std::size_t w = 8 / heads;
            for (std::size_t h = 0; h < heads; ++h) {
                const AttentionBatch s{b.queries.col_slice(h * w, w), b.keys.col_slice(h * w, w),
                                       b.values.col_slice(h * w, w), std::nullopt};
                const Matrix part = attend(s, cfg(kind));
                for (std::size_t i = 0; i < 7; ++i)
                    for (std::size_t k = 0; k < w; ++k) CHECK(got(i, h * w + k) == part(i, k));
            }
        }
    }
    CHECK_THROWS_AS(multi_head(b, cfg(KernelKind::dot), 3), Error);
    CHECK_THROWS_AS(multi_head(b, cfg(KernelKind::dot), 0), Error);
}

TEST_CASE("masks") {
    Rng rng(65);
    auto b = random_batch(rng, 3, 4, 2, 1);
    Mask mask(3, 4, true);
    mask.set(0, 1, false);
    mask.set(0, 2, false);
    b.mask = mask;
    const Matrix w = softmax_rows(pairwise_logits(b, cfg(KernelKind::penumbral)));
    CHECK(w(0, 1) == 0.0);
    CHECK(w(0, 2) == 0.0);
    CHECK(w(0, 0) + w(0, 3) == doctest::Approx(1.0).epsilon(1e-15));

    Mask empty_row(3, 4, true);
    for (std::size_t j = 0; j < 4; ++j) empty_row.set(1, j, false);
    b.mask = empty_row;
    CHECK_THROWS_AS(attend(b, cfg(KernelKind::penumbral)), Error);

    b.mask = Mask(3, 3, true);
    try {
        attend(b, cfg(KernelKind::dot));
        FAIL("expected a dimension error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::dimension);
    }
}

TEST_CASE("shape errors") {
    Rng rng(66);
    AttentionBatch b = random_batch(rng, 2, 3, 4, 2);
    b.values = rng.matrix(2, 2);
    CHECK_THROWS_AS(attend(b, cfg(KernelKind::dot)), Error);
    b = random_batch(rng, 2, 3, 4, 2);
    b.keys = rng.matrix(3, 5);
    CHECK_THROWS_AS(attend(b, cfg(KernelKind::dot)), Error);
    const AttentionBatch one_col{rng.matrix(2, 1), rng.matrix(3, 1), rng.matrix(3, 1), std::nullopt};
    CHECK_THROWS_AS(attend(one_col, cfg(KernelKind::penumbral)), Error);
    CHECK_NOTHROW(attend(one_col, cfg(KernelKind::dot)));
}

TEST_CASE("results are bit-identical across thread counts") {
    Rng rng(67);
    const auto b = random_batch(rng, 37, 29, 6, 3);
    for (auto kind : {KernelKind::penumbral, KernelKind::umbral, KernelKind::laplacian}) {
        const Matrix ref = attend(b, cfg(kind), 1);
        for (std::size_t t : {2u, 3u, 8u, 64u}) CHECK(attend(b, cfg(kind), t) == ref);
        CHECK(attend(b, cfg(kind), 1) == ref);
    }
}

TEST_CASE("permuting keys and values permutes nothing in the output") {
    Rng rng(68);
    const auto b = random_batch(rng, 10, 12, 4, 3);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine);
    AttentionBatch p = b;
    for (std::size_t j = 0; j < 12; ++j) {
        for (std::size_t k = 0; k < 4; ++k) p.keys(j, k) = b.keys(perm[j], k);
        for (std::size_t k = 0; k < 3; ++k) p.values(j, k) = b.values(perm[j], k);
    }
    for (auto kind : {KernelKind::penumbral, KernelKind::umbral}) {
        const Matrix w = softmax_rows(pairwise_logits(b, cfg(kind)));
        const Matrix wp = softmax_rows(pairwise_logits(p, cfg(kind)));
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 12; ++j) CHECK(wp(i, j) == w(i, perm[j]));
        CHECK(max_abs_diff(attend(b, cfg(kind)), attend(p, cfg(kind))) <= 1e-14);
    }
}

TEST_CASE("attention rows are convex combinations of values") {
    Rng rng(69);
    const auto b = random_batch(rng, 8, 10, 3, 2);
    const Matrix w = softmax_rows(pairwise_logits(b, cfg(KernelKind::penumbral)));
    for (std::size_t i = 0; i < 8; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 10; ++j) {
            CHECK(w(i, j) >= 0.0);
            s += w(i, j);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
}

}  // TEST_SUITE
