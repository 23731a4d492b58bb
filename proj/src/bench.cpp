#include "cone/bench.hpp"

#include "cone/attention.hpp"
#include "cone/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace cone {

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    Matrix out(rows, cols);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : out.data()) x = normal(rng);
    return out;
}

}  // namespace

Throughput measure_throughput(std::size_t n, std::size_t m, std::size_t d, const KernelConfig& config,
                              std::size_t repetitions, std::uint64_t seed, std::size_t threads) {
    if (repetitions < 3) fail(ErrorCode::domain, "measure_throughput needs at least 3 repetitions");
    if (n == 0 || m == 0 || d == 0) fail(ErrorCode::domain, "benchmark sizes must be positive");
    std::mt19937_64 rng(seed);
    AttentionBatch batch;
    batch.queries = random_matrix(n, d, rng);
    batch.keys = random_matrix(m, d, rng);
    batch.values = random_matrix(m, d, rng);

    volatile double sink = attend(batch, config, threads)(0, 0);
    std::vector<double> times;
    times.reserve(repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const Matrix out = attend(batch, config, threads);
        const auto stop = std::chrono::steady_clock::now();
        sink = out(0, 0);
        times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    (void)sink;
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    double median = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    // A clock tick can round a tiny run down to zero.
    median = std::max(median, 1e-9);
    return {median, static_cast<double>(n) / median};
}

double scaling_exponent(std::span<const double> times, std::span<const double> sizes) {
    if (times.size() != sizes.size()) fail(ErrorCode::dimension, "times and sizes differ in length");
    if (times.size() < 3) fail(ErrorCode::domain, "scaling exponent needs at least 3 points");
    const double k = static_cast<double>(times.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) fail(ErrorCode::domain, "times must be positive");
        if (!(sizes[i] > 0.0)) fail(ErrorCode::domain, "sizes must be positive");
        lx.push_back(std::log(sizes[i]));
        ly.push_back(std::log(times[i]));
        sx += lx.back();
        sy += ly.back();
    }
    const double mx = sx / k, my = sy / k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) fail(ErrorCode::domain, "sizes must not all be equal");
    return sxy / sxx;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "kernel,n,m,d,threads,median_seconds,tokens_per_second\n";
    const auto old = out.precision(17);
    for (const BenchRow& r : rows)
        out << r.kernel << ',' << r.n << ',' << r.m << ',' << r.d << ',' << r.threads << ',' << r.median_seconds
            << ',' << r.tokens_per_second << '\n';
    out.precision(old);
}

}  // namespace cone
