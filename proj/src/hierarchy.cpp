#include "cone/hierarchy.hpp"

#include "cone/errors.hpp"
#include "cone/gradients.hpp"
#include "cone/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace cone {

namespace {

// Layout state for one node: horizontal centre and half-width of the
// interval its subtree may occupy.
struct Slot {
    double x;
    double half_width;
};

// Largest horizontal offset at which a child at height hc stays in the cone
// of a parent at height hp.
double allowed_offset(double hp, double hc, const KernelConfig& config) {
    if (config.kind == KernelKind::umbral) return (hp - hc) * std::sinh(config.ball_radius);
    const double h = config.light_height;
    return tangent_offset(hc, h) - tangent_offset(hp, h);
}

bool edge_ok(const HalfSpacePoint& parent, const HalfSpacePoint& child, const KernelConfig& config) {
    if (config.kind == KernelKind::umbral)
        return umbral_member(parent, child, config.ball_radius, -kEmbedMargin);
    return penumbral_member(parent, child, config.light_height, -kEmbedMargin);
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    if (a.size() < 2) return 0.0;
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

struct Triple {
    int a, b, c;
};

}  // namespace

std::string_view to_string(TreeKind kind) noexcept {
    switch (kind) {
    case TreeKind::complete_binary: return "complete_binary";
    case TreeKind::random_attachment: return "random_attachment";
    }
    return "?";
}

std::optional<TreeKind> parse_tree_kind(std::string_view name) noexcept {
    for (auto k : {TreeKind::complete_binary, TreeKind::random_attachment})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

TreeSpec generate_tree(TreeKind kind, std::size_t size, std::uint64_t seed) {
    if (size == 0) fail(ErrorCode::domain, "tree size must be at least 1");
    std::vector<int> parent(size, -1);
    if (kind == TreeKind::complete_binary) {
        for (std::size_t i = 1; i < size; ++i) parent[i] = static_cast<int>((i - 1) / 2);
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 1; i < size; ++i)
            parent[i] = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
    }
    return TreeSpec(std::move(parent));
}

TreeSpec complete_binary_tree(int depth) {
    if (depth < 0 || depth > 24) fail(ErrorCode::domain, "complete binary depth must be in [0, 24]");
    return generate_tree(TreeKind::complete_binary, (std::size_t{1} << (depth + 1)) - 1, 0);
}

std::vector<HalfSpacePoint> embed_tree_cone_consistent(const TreeSpec& tree, const KernelConfig& config,
                                                       std::size_t dim) {
    if (!is_cone(config.kind)) fail(ErrorCode::domain, "constructive embedding needs a cone kernel");
    config.validate();
    if (dim < 2) fail(ErrorCode::dimension, "embedding dimension must be at least 2");
    const int n = static_cast<int>(tree.size());
    const double root_height = config.kind == KernelKind::penumbral ? 0.9 * config.light_height : 1.0;

    std::vector<double> height(n);
    std::vector<int> order{tree.root()};
    height[tree.root()] = root_height;
    for (std::size_t k = 0; k < order.size(); ++k)
        for (int c : tree.children(order[k])) {
            height[c] = kEmbedHeightRatio * height[order[k]];
            order.push_back(c);
        }

    // A node's interval must keep every child inside its cone.
    auto width_limit = [&](int node) {
        const double hp = height[node];
        return 0.9 * allowed_offset(hp, kEmbedHeightRatio * hp, config);
    };

    std::vector<Slot> slot(n);
    slot[tree.root()] = {0.0, width_limit(tree.root())};
    for (int node : order) {
        const auto kids = tree.children(node);
        const double k = static_cast<double>(kids.size());
        const Slot s = slot[node];
        for (std::size_t i = 0; i < kids.size(); ++i) {
            const double centre = s.x - s.half_width + (2.0 * static_cast<double>(i) + 1.0) * s.half_width / k;
            slot[kids[i]] = {centre, std::min(s.half_width / (3.0 * k), width_limit(kids[i]))};
        }
    }

    std::vector<HalfSpacePoint> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> horizontal(dim - 1, 0.0);
        horizontal[0] = slot[i].x;
        if (!(height[i] >= std::numeric_limits<double>::min()))
            fail(ErrorCode::numeric_range, "node " + std::to_string(i) + " is too deep to embed (height underflows)");
        points.emplace_back(std::move(horizontal), height[i]);
    }
    for (int i = 0; i < n; ++i) {
        const int p = tree.parent(i);
        if (p >= 0 && !edge_ok(points[p], points[i], config))
            fail(ErrorCode::domain, "cannot place node " + std::to_string(i) + " inside the cone of node " +
                                        std::to_string(p) + " with the required margin");
    }
    return points;
}

RankScore lca_rank_score(const PairScore& score, const TreeSpec& tree, const RankOptions& options) {
    const std::vector<int> leaves = tree.leaves();
    const std::size_t L = leaves.size();
    RankScore out;
    if (L < 3) {
        out.vacuous = true;
        if (L == 2) out.spearman = 0.0;
        return out;
    }

    const bool dense = L <= 2048;
    std::vector<double> sc, depth;
    if (dense) {
        sc.assign(L * L, 0.0);
        depth.assign(L * L, 0.0);
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j)
                if (i != j) {
                    sc[i * L + j] = score(leaves[i], leaves[j]);
                    depth[i * L + j] = lca_depth(tree, leaves[i], leaves[j]);
                }
    }
    auto S = [&](std::size_t i, std::size_t j) { return dense ? sc[i * L + j] : score(leaves[i], leaves[j]); };
    auto D = [&](std::size_t i, std::size_t j) {
        return dense ? depth[i * L + j] : static_cast<double>(lca_depth(tree, leaves[i], leaves[j]));
    };

    double agree = 0.0;
    std::size_t count = 0;
    auto visit = [&](std::size_t a, std::size_t b, std::size_t c) {
        if (!(D(a, b) > D(a, c))) return false;
        const double sb = S(a, b), scv = S(a, c);
        agree += sb > scv ? 1.0 : (sb == scv ? 0.5 : 0.0);
        ++count;
        return true;
    };

    std::mt19937_64 rng(options.seed);
    const std::size_t ordered = L * (L - 1) * (L - 2);
    if (ordered <= options.max_triples) {
        for (std::size_t a = 0; a < L; ++a)
            for (std::size_t b = 0; b < L; ++b)
                for (std::size_t c = 0; c < L; ++c)
                    if (a != b && a != c && b != c) visit(a, b, c);
    } else {
        out.exhaustive = false;
        std::uniform_int_distribution<std::size_t> pick(0, L - 1);
        const std::size_t budget = 50 * options.max_triples;
        for (std::size_t tries = 0; tries < budget && count < options.max_triples; ++tries) {
            const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
            if (a != b && a != c && b != c) visit(a, b, c);
        }
    }
    out.triples = count;
    out.vacuous = count == 0;
    out.triple_agreement = count == 0 ? 1.0 : agree / static_cast<double>(count);

    std::vector<double> xs, ys;
    const std::size_t pairs = L * (L - 1) / 2;
    if (pairs <= options.max_triples) {
        for (std::size_t a = 0; a < L; ++a)
            for (std::size_t b = a + 1; b < L; ++b) {
                xs.push_back(S(a, b));
                ys.push_back(D(a, b));
            }
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, L - 1);
        while (xs.size() < options.max_triples) {
            const std::size_t a = pick(rng), b = pick(rng);
            if (a == b) continue;
            xs.push_back(S(a, b));
            ys.push_back(D(a, b));
        }
    }
    out.spearman = pearson(average_ranks(xs), average_ranks(ys));
    return out;
}

RankScore lca_rank_score(const std::vector<HalfSpacePoint>& embeddings, const TreeSpec& tree,
                         const KernelConfig& config, const RankOptions& options) {
    if (embeddings.size() != tree.size())
        fail(ErrorCode::dimension, "one embedding per tree node is required");
    return lca_rank_score(
        [&](int a, int b) { return pair_logit(embeddings[a].coords(), embeddings[b].coords(), config); }, tree,
        options);
}

RankScore lca_rank_score(const Matrix& params, const TreeSpec& tree, const KernelConfig& config,
                         const RankOptions& options) {
    if (params.rows() != tree.size()) fail(ErrorCode::dimension, "one parameter row per tree node is required");
    return lca_rank_score([&](int a, int b) { return raw_logit(params.row(a), params.row(b), config); }, tree,
                          options);
}

std::vector<HalfSpacePoint> shuffle_leaf_embeddings(const std::vector<HalfSpacePoint>& embeddings,
                                                    const TreeSpec& tree, std::uint64_t seed) {
    if (embeddings.size() != tree.size())
        fail(ErrorCode::dimension, "one embedding per tree node is required");
    const std::vector<int> leaves = tree.leaves();
    std::vector<int> perm = leaves;
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<HalfSpacePoint> out = embeddings;
    for (std::size_t i = 0; i < leaves.size(); ++i) out[leaves[i]] = embeddings[perm[i]];
    return out;
}

TrainResult train_toy(const TreeSpec& tree, const KernelConfig& config, const TrainOptions& options) {
    config.validate();
    if (options.dim < 2 && resolve_projection(config) != ProjectionKind::identity)
        fail(ErrorCode::dimension, "training dimension must be at least 2 for projected kernels");
    if (!(options.learning_rate > 0.0)) fail(ErrorCode::domain, "learning rate must be positive");
    const int n = static_cast<int>(tree.size());
    std::mt19937_64 rng(options.seed);

    std::vector<Triple> triples;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (a != b && a != c && b != c && lca_depth(tree, a, b) > lca_depth(tree, a, c))
                    triples.push_back({a, b, c});
    if (triples.size() > options.max_triples) {
        for (std::size_t i = 0; i < options.max_triples; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, triples.size() - 1);
            std::swap(triples[i], triples[pick(rng)]);
        }
        triples.resize(options.max_triples);
    }

    Matrix params(tree.size(), options.dim);
    std::normal_distribution<double> normal(0.0, options.init_scale);
    for (double& x : params.data()) x = normal(rng);

    TrainResult result;
    result.loss_curve.reserve(options.steps + 1);
    Matrix grad(tree.size(), options.dim);
    const double inv = triples.empty() ? 0.0 : 1.0 / static_cast<double>(triples.size());
    for (std::size_t step = 0; step <= options.steps; ++step) {
        const bool last = step == options.steps;
        std::fill(grad.data().begin(), grad.data().end(), 0.0);
        double loss = 0.0;
        try {
            for (const Triple& t : triples) {
                const double lb = raw_logit(params.row(t.a), params.row(t.b), config);
                const double lc = raw_logit(params.row(t.a), params.row(t.c), config);
                const double hinge = options.margin + lc - lb;
                if (hinge <= 0.0) continue;
                loss += hinge * inv;
                if (last) continue;
                const PairGradient gc = raw_logit_grad(params.row(t.a), params.row(t.c), config);
                const PairGradient gb = raw_logit_grad(params.row(t.a), params.row(t.b), config);
                for (std::size_t j = 0; j < options.dim; ++j) {
                    grad(t.a, j) += inv * (gc.grad_u[j] - gb.grad_u[j]);
                    grad(t.c, j) += inv * gc.grad_v[j];
                    grad(t.b, j) -= inv * gb.grad_v[j];
                }
            }
        } catch (const Error& e) {
            fail(e.code(), "training step " + std::to_string(step) + ": " + e.what());
        }
        if (!std::isfinite(loss)) fail(ErrorCode::numeric_range, "training diverged at step " + std::to_string(step));
        result.loss_curve.push_back(loss);
        if (last) break;
        for (std::size_t i = 0; i < params.data().size(); ++i)
            params.data()[i] -= options.learning_rate * grad.data()[i];
    }
    result.final_scores = lca_rank_score(params, tree, config);
    result.params = std::move(params);
    return result;
}

}  // namespace cone
