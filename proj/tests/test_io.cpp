#include "cone/errors.hpp"
#include "cone/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace cone;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::io;
}

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config parsing") {
    const auto d = parse_config("{}");
    CHECK(d.kernel.kind == KernelKind::penumbral);
    CHECK(d.kernel.gamma == 1.0);
    CHECK(d.kernel.light_height == 1.0);
    CHECK(d.kernel.ball_radius == 0.1);
    CHECK_FALSE(d.kernel.projection.has_value());
    CHECK(d.heads == 1);

    const auto c = parse_config(R"({"kernel": "umbral", "gamma": 2.5, "ball_radius": 0.3, "projection": "xi", "heads": 4})");
    CHECK(c.kernel.kind == KernelKind::umbral);
    CHECK(c.kernel.gamma == 2.5);
    CHECK(c.kernel.ball_radius == 0.3);
    CHECK(c.kernel.projection == ProjectionKind::xi);
    CHECK(c.heads == 4);
    CHECK_FALSE(parse_config(R"({"projection": "default"})").kernel.projection.has_value());

    for (const char* bad : {"{", "[1]", R"({"kernal": "dot"})", R"({"kernel": "cosine"})", R"({"gamma": "x"})",
                            R"({"gamma": -1})", R"({"heads": 0})", R"({"heads": 1.5})", R"({"projection": "poincare"})",
                            R"({"kernel": "dist_hyperboloid", "projection": "psi"})"})
        CHECK(code_of([&] { parse_config(bad); }) == ErrorCode::format);
    CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == ErrorCode::io);
}

TEST_CASE("embeddings round-trip bit for bit") {
    testing::Rng rng(90);
    Matrix m = rng.matrix(5, 3, 10.0);
    m(0, 0) = 0.1;
    m(1, 1) = 1e-300;
    m(2, 2) = -std::numeric_limits<double>::denorm_min();
    m(3, 0) = std::numeric_limits<double>::max();
    std::ostringstream out;
    write_embeddings(out, m);
    std::istringstream in(out.str());
    CHECK(read_embeddings(in) == m);
    CHECK(out.str().rfind("3 5\n", 0) == 0);
}

TEST_CASE("embedding format errors carry line numbers") {
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_embeddings(in, "emb.txt");
    };
    CHECK(read("2 0\n").rows() == 0);
    CHECK(read("\n2 1\n\n1 2\n\n").rows() == 1);
    CHECK(message_of([&] { read("2 2\n1 2\n3\n"); }).find("emb.txt:3") != std::string::npos);
    CHECK(message_of([&] { read("2 1\n1 x\n"); }).find("emb.txt:2") != std::string::npos);
    CHECK(message_of([&] { read("2 1\n1 nan\n"); }).find("emb.txt:2") != std::string::npos);
    CHECK(message_of([&] { read("2\n"); }).find("emb.txt:1") != std::string::npos);
    CHECK(message_of([&] { read("2 2\n1 2\n"); }).find("emb.txt:3") != std::string::npos);
    CHECK(message_of([&] { read("1 1\n1\n2\n"); }).find("emb.txt:3") != std::string::npos);
    CHECK(code_of([&] { read(""); }) == ErrorCode::format);
    CHECK(code_of([] { load_embeddings("/nonexistent/emb.txt"); }) == ErrorCode::io);
}

TEST_CASE("CSV output") {
    std::ostringstream out;
    write_csv(out, Matrix{{1.0, -std::numeric_limits<double>::infinity()}, {0.5, 0.25}});
    CHECK(out.str() == "1,-inf\n0.5,0.25\n");
}

TEST_CASE("tree files") {
    std::istringstream ok("0 -1\n1 0\n2 0\n\n3 1\n");
    const auto t = read_tree(ok);
    CHECK(t.size() == 4);
    CHECK(t.depth(3) == 2);

    std::istringstream shuffled("2 0\n0 -1\n1 0\n");
    CHECK(read_tree(shuffled).parent(2) == 0);

    for (const char* bad : {"", "0 -1\n0 -1\n", "0 -1\n2 0\n", "0 -1\n1 5\n", "0 -1\n1\n", "0 1\n1 0\n", "0 -1\n1 -1\n"}) {
        std::istringstream in(bad);
        CHECK(code_of([&] { read_tree(in, "t.txt"); }) == ErrorCode::format);
    }
    std::istringstream line3("0 -1\n1 0\n1 0 7\n");
    CHECK(message_of([&] { read_tree(line3, "t.txt"); }).find("t.txt:3") != std::string::npos);
}

}  // TEST_SUITE
