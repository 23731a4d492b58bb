#pragma once

// File formats used by the command-line tool.
//
// Config: one JSON object, every key optional:
//   {"kernel": "penumbral", "gamma": 1.0, "light_height": 1.0,
//    "ball_radius": 0.1, "beta": 1.0, "c": 0.0, "projection": "default",
//    "heads": 1}
// Embeddings: first line "d n", then n lines of d numbers.
// Trees: one "node_id parent_id" line per node, parent -1 for the root.

#include "cone/kernels.hpp"
#include "cone/matrix.hpp"
#include "cone/tree.hpp"

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>

namespace cone {

struct RunConfig {
    KernelConfig kernel;
    std::size_t heads = 1;
};

/// Throws ErrorCode::format on malformed JSON, unknown keys or bad values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// `source` names the input in error messages, which carry line numbers.
Matrix read_embeddings(std::istream& in, const std::string& source = "<input>");
Matrix load_embeddings(const std::string& path);
/// 17 significant digits, so values read back bit for bit.
void write_embeddings(std::ostream& out, const Matrix& m);

/// Comma separated rows, 17 significant digits; -inf is written as "-inf".
void write_csv(std::ostream& out, const Matrix& m);

TreeSpec read_tree(std::istream& in, const std::string& source = "<input>");
TreeSpec load_tree(const std::string& path);

/// Throws ErrorCode::io when the file cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace cone
