#include "cone/io.hpp"

#include "cone/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <limits>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace cone {

namespace {

[[noreturn]] void format_error(const std::string& source, std::size_t line, const std::string& what) {
    fail(ErrorCode::format, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_long(const std::string& s, long long& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::string format_double(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double number_field(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) fail(ErrorCode::format, std::string("config: \"") + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::format, std::string("config: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::format, "config: top level must be a JSON object");
    static const std::set<std::string> known{"kernel", "gamma", "light_height", "ball_radius",
                                             "beta",   "c",     "projection",   "heads"};
    for (const auto& item : j.items())
        if (!known.count(item.key())) fail(ErrorCode::format, "config: unknown key \"" + item.key() + "\"");

    RunConfig rc;
    KernelConfig& k = rc.kernel;
    if (j.contains("kernel")) {
        if (!j["kernel"].is_string()) fail(ErrorCode::format, "config: \"kernel\" must be a string");
        const auto name = j["kernel"].get<std::string>();
        const auto kind = parse_kernel_kind(name);
        if (!kind) fail(ErrorCode::format, "config: unknown kernel \"" + name + "\"");
        k.kind = *kind;
    }
    if (j.contains("gamma")) k.gamma = number_field(j, "gamma");
    if (j.contains("light_height")) k.light_height = number_field(j, "light_height");
    if (j.contains("ball_radius")) k.ball_radius = number_field(j, "ball_radius");
    if (j.contains("beta")) k.beta = number_field(j, "beta");
    if (j.contains("c")) k.c = number_field(j, "c");
    if (j.contains("projection")) {
        if (!j["projection"].is_string()) fail(ErrorCode::format, "config: \"projection\" must be a string");
        const auto name = j["projection"].get<std::string>();
        if (name != "default") {
            const auto p = parse_projection_kind(name);
            if (!p) fail(ErrorCode::format, "config: unknown projection \"" + name + "\"");
            k.projection = *p;
        }
    }
    if (j.contains("heads")) {
        if (!j["heads"].is_number_integer() || j["heads"].get<long long>() < 1)
            fail(ErrorCode::format, "config: \"heads\" must be a positive integer");
        rc.heads = j["heads"].get<std::size_t>();
    }
    try {
        k.validate();
    } catch (const Error& e) {
        fail(ErrorCode::format, std::string("config: ") + e.what());
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_config(text);
    } catch (const Error& e) {
        fail(e.code(), path + ": " + e.what());
    }
}

Matrix read_embeddings(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (header.empty()) {
        if (!std::getline(in, line)) format_error(source, lineno + 1, "missing \"d n\" header");
        ++lineno;
        if (!blank(line)) header = tokens(line);
    }
    long long d = 0, n = 0;
    if (header.size() != 2 || !parse_long(header[0], d) || !parse_long(header[1], n) || d < 1 || n < 0)
        format_error(source, lineno, "header must be two integers \"d n\" with d >= 1 and n >= 0");
    Matrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    long long row = 0;
    while (row < n) {
        if (!std::getline(in, line))
            format_error(source, lineno + 1, "expected " + std::to_string(n) + " rows, found " + std::to_string(row));
        ++lineno;
        if (blank(line)) continue;
        const auto t = tokens(line);
        if (static_cast<long long>(t.size()) != d)
            format_error(source, lineno, "expected " + std::to_string(d) + " values, found " + std::to_string(t.size()));
        for (long long c = 0; c < d; ++c) {
            double x;
            if (!parse_double(t[c], x) || !std::isfinite(x))
                format_error(source, lineno, "\"" + t[c] + "\" is not a finite number");
            out(row, c) = x;
        }
        ++row;
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!blank(line)) format_error(source, lineno, "unexpected data after " + std::to_string(n) + " rows");
    }
    return out;
}

Matrix load_embeddings(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_embeddings(in, path);
}

void write_embeddings(std::ostream& out, const Matrix& m) {
    out << m.cols() << ' ' << m.rows() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
        out << '\n';
    }
}

void write_csv(std::ostream& out, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
        out << '\n';
    }
}

TreeSpec read_tree(std::istream& in, const std::string& source) {
    std::map<long long, long long> parent_of;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto t = tokens(line);
        long long id, parent;
        if (t.size() != 2 || !parse_long(t[0], id) || !parse_long(t[1], parent))
            format_error(source, lineno, "expected \"node_id parent_id\"");
        if (id < 0) format_error(source, lineno, "node ids must be nonnegative");
        if (!parent_of.emplace(id, parent).second)
            format_error(source, lineno, "node " + std::to_string(id) + " listed twice");
    }
    if (parent_of.empty()) fail(ErrorCode::format, source + ": tree file has no nodes");
    const long long n = static_cast<long long>(parent_of.size());
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (const auto& [id, p] : parent_of) {
        if (id >= n) fail(ErrorCode::format, source + ": node ids must be 0.." + std::to_string(n - 1));
        if (p < -1 || p >= n)
            fail(ErrorCode::format, source + ": node " + std::to_string(id) + " has unknown parent " + std::to_string(p));
        parent[static_cast<std::size_t>(id)] = static_cast<int>(p);
    }
    try {
        return TreeSpec(std::move(parent));
    } catch (const Error& e) {
        fail(ErrorCode::format, source + ": " + e.what());
    }
}

TreeSpec load_tree(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_tree(in, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write " + path);
    out << contents;
    if (!out) fail(ErrorCode::io, "write to " + path + " failed");
}

}  // namespace cone
