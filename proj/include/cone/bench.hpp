#pragma once

// Wall-clock measurements of attend().

#include "cone/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace cone {

struct Throughput {
    double median_seconds;
    double tokens_per_second;  // query rows per second
};

/// Times attend() on a seeded standard-normal batch (values are m x d)
/// after one untimed warmup run. Needs at least 3 repetitions.
Throughput measure_throughput(std::size_t n, std::size_t m, std::size_t d, const KernelConfig& config,
                              std::size_t repetitions, std::uint64_t seed, std::size_t threads = 1);

/// Least-squares slope of log(time) against log(size).
double scaling_exponent(std::span<const double> times, std::span<const double> sizes);

struct BenchRow {
    std::string kernel;
    std::size_t n, m, d, threads;
    double median_seconds;
    double tokens_per_second;
};

/// Header kernel,n,m,d,threads,median_seconds,tokens_per_second.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace cone
