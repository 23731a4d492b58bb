#include "cone/bench.hpp"
#include "cone/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace cone;

TEST_SUITE("bench") {

TEST_CASE("scaling_exponent on synthetic power laws") {
    const std::vector<double> sizes{128, 256, 512, 1024};
    std::vector<double> quad, lin;
    for (double n : sizes) {
        quad.push_back(3e-9 * n * n);
        lin.push_back(0.5 * n);
    }
    CHECK(scaling_exponent(quad, sizes) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(scaling_exponent(lin, sizes) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> bad{1.0, 0.0, 2.0, 3.0};
    CHECK_THROWS_AS(scaling_exponent(bad, sizes), Error);
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(scaling_exponent(two, std::vector<double>{1.0, 2.0}), Error);
    CHECK_THROWS_AS(scaling_exponent(quad, two), Error);
}

TEST_CASE("measure_throughput") {
    KernelConfig c;
    const auto t = measure_throughput(1, 1, 2, c, 3, 0);
    CHECK(t.median_seconds > 0.0);
    CHECK(std::isfinite(t.tokens_per_second));
    CHECK(t.tokens_per_second > 0.0);
    CHECK_THROWS_AS(measure_throughput(4, 4, 2, c, 2, 0), Error);
    const auto threaded = measure_throughput(32, 32, 8, c, 3, 1, 4);
    CHECK(threaded.median_seconds > 0.0);
}

TEST_CASE("bench CSV layout") {
    std::ostringstream out;
    write_bench_csv(out, {{"penumbral", 128, 128, 64, 1, 0.25, 512.0}});
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "kernel,n,m,d,threads,median_seconds,tokens_per_second");
    CHECK(row.rfind("penumbral,128,128,64,1,", 0) == 0);
}

}  // TEST_SUITE
