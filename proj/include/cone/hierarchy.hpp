#pragma once

// Tree generators, a constructive cone-consistent embedding, LCA ranking
// metrics and a small gradient-descent training loop.

#include "cone/geometry.hpp"
#include "cone/kernels.hpp"
#include "cone/matrix.hpp"
#include "cone/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace cone {

enum class TreeKind { complete_binary, random_attachment };

std::string_view to_string(TreeKind kind) noexcept;
std::optional<TreeKind> parse_tree_kind(std::string_view name) noexcept;

/// `size` is the node count. complete_binary uses heap order (parent of i is
/// (i-1)/2); random_attachment hangs node i under a uniformly drawn j < i.
TreeSpec generate_tree(TreeKind kind, std::size_t size, std::uint64_t seed);

/// Complete binary tree with leaves at `depth` (2^(depth+1) - 1 nodes).
TreeSpec complete_binary_tree(int depth);

/// Height ratio between a child and its parent in the constructive embedding.
inline constexpr double kEmbedHeightRatio = 0.7;
/// Every edge of the constructive embedding passes the membership test with
/// the defining inequality tightened by this much.
inline constexpr double kEmbedMargin = 1e-6;

/// One half-space point per node, in dimension `dim` (horizontal layout uses
/// the first coordinate, the rest are zero). Children sit at 0.7 times their
/// parent's height, spread across disjoint slots of the parent's interval.
std::vector<HalfSpacePoint> embed_tree_cone_consistent(const TreeSpec& tree, const KernelConfig& config,
                                                       std::size_t dim = 2);

struct RankOptions {
    std::size_t max_triples = 100000;  // exhaustive below this many, sampled above
    std::uint64_t seed = 0;
};

struct RankScore {
    double triple_agreement = 1.0;  // ties count one half
    double spearman = 0.0;          // logit vs LCA depth over leaf pairs
    std::size_t triples = 0;        // comparisons behind triple_agreement
    bool exhaustive = true;
    bool vacuous = false;           // no comparable triple exists
};

/// Leaf triples (a, b, c) with lca_depth(a, b) > lca_depth(a, c) are counted
/// as agreeing when score(a, b) > score(a, c).
using PairScore = std::function<double(int, int)>;
RankScore lca_rank_score(const PairScore& score, const TreeSpec& tree, const RankOptions& options = {});

/// Scores with cone_logit (or pair_logit for other kernels) of the points.
RankScore lca_rank_score(const std::vector<HalfSpacePoint>& embeddings, const TreeSpec& tree,
                         const KernelConfig& config, const RankOptions& options = {});

/// Scores Euclidean parameters (one row per node) with raw_logit.
RankScore lca_rank_score(const Matrix& params, const TreeSpec& tree, const KernelConfig& config,
                         const RankOptions& options = {});

/// Randomly permutes the embeddings of the leaves among themselves.
std::vector<HalfSpacePoint> shuffle_leaf_embeddings(const std::vector<HalfSpacePoint>& embeddings,
                                                    const TreeSpec& tree, std::uint64_t seed);

struct TrainOptions {
    std::size_t steps = 2000;
    double learning_rate = 0.2;
    std::size_t dim = 3;
    std::uint64_t seed = 0;
    double margin = 0.1;
    std::size_t max_triples = 4096;  // fixed training set drawn once from the seed
    double init_scale = 0.5;
};

struct TrainResult {
    Matrix params;                   // one Euclidean row per node
    std::vector<double> loss_curve;  // steps + 1 entries, the last after the final update
    RankScore final_scores;
};

/// Full-batch gradient descent on mean(max(0, margin + L(a,c) - L(a,b))) over
/// node triples whose (a, b) share a deeper ancestor than (a, c).
TrainResult train_toy(const TreeSpec& tree, const KernelConfig& config, const TrainOptions& options);

}  // namespace cone
