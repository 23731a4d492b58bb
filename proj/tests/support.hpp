#pragma once

#include "cone/geometry.hpp"
#include "cone/matrix.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using Big = boost::multiprecision::cpp_bin_float_50;

struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(engine); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine); }

    std::vector<double> normals(std::size_t n, double sd = 1.0) {
        std::vector<double> v(n);
        for (double& x : v) x = normal(sd);
        return v;
    }

    cone::HalfSpacePoint point(std::size_t dim, double hlo, double hhi, double spread = 1.0) {
        std::vector<double> horizontal(dim - 1);
        for (double& x : horizontal) x = uniform(-spread, spread);
        return cone::HalfSpacePoint(std::move(horizontal), uniform(hlo, hhi));
    }

    cone::Matrix matrix(std::size_t rows, std::size_t cols, double sd = 1.0) {
        cone::Matrix m(rows, cols);
        for (double& x : m.data()) x = normal(sd);
        return m;
    }

    std::mt19937_64 engine;
};

/// Random orthogonal matrix (Gram-Schmidt on a Gaussian matrix), row-major k x k.
inline std::vector<std::vector<double>> random_rotation(std::size_t k, Rng& rng) {
    std::vector<std::vector<double>> q;
    while (q.size() < k) {
        std::vector<double> v = rng.normals(k);
        for (const auto& b : q) {
            double dot = 0.0;
            for (std::size_t i = 0; i < k; ++i) dot += v[i] * b[i];
            for (std::size_t i = 0; i < k; ++i) v[i] -= dot * b[i];
        }
        double n = 0.0;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
        if (n < 1e-6) continue;
        for (double& x : v) x /= n;
        q.push_back(v);
    }
    return q;
}

/// Applies rotation r and then translation t to the horizontal part of p.
inline cone::HalfSpacePoint move_horizontal(const cone::HalfSpacePoint& p,
                                            const std::vector<std::vector<double>>& r,
                                            const std::vector<double>& t) {
    const auto h = p.horizontal();
    std::vector<double> out(h.size(), 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (std::size_t j = 0; j < h.size(); ++j) out[i] += r[i][j] * h[j];
        out[i] += t[i];
    }
    return cone::HalfSpacePoint(std::move(out), p.height());
}

inline double max_abs_diff(const cone::Matrix& a, const cone::Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

}  // namespace testing
