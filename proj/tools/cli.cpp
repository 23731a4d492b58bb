#include "cli.hpp"

#include "cone/attention.hpp"
#include "cone/bench.hpp"
#include "cone/errors.hpp"
#include "cone/gradients.hpp"
#include "cone/hierarchy.hpp"
#include "cone/io.hpp"
#include "cone/kernels.hpp"
#include "cone/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

namespace conectl {

namespace {

using cone::Error;
using cone::ErrorCode;
using nlohmann::json;

constexpr double kOracleTolerance = 1e-5;
constexpr double kGradTolerance = 1e-5;
constexpr double kGradMargin = 1e-3;

const char* kFormats = R"(File formats:
  config      JSON object; keys (all optional): kernel (penumbral, umbral,
              dist_halfspace, dist_hyperboloid, laplacian, dot), gamma,
              light_height, ball_radius, beta, c, projection (default,
              identity, psi, xi, exp_origin, pseudopolar), heads.
  embeddings  first line "d n", then n lines of d numbers.
  tree        one "node_id parent_id" line per node; the root's parent is -1.
  matrices    CSV, one row per line, 17 significant digits.
Exit codes: 0 success, 1 check failed, 2 input/format error, 3 numeric range.)";

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::numeric_range: return kNumericRange;
    case ErrorCode::inconsistency: return kCheckFailed;
    default: return kInputError;
    }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        cone::write_file(path, text);
}

json score_json(const cone::RankScore& s) {
    return {{"triple_agreement", s.triple_agreement},
            {"spearman", s.spearman},
            {"triples", s.triples},
            {"exhaustive", s.exhaustive},
            {"vacuous", s.vacuous}};
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

// Random pairs in the two-dimensional half-space below the light source.
cone::HalfSpacePoint sample_point(const cone::KernelConfig& k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> horizontal(-1.0, 1.0);
    const double top = k.kind == cone::KernelKind::penumbral ? k.light_height : 2.0;
    std::uniform_real_distribution<double> height(0.02 * top, 0.98 * top);
    return cone::HalfSpacePoint({horizontal(rng)}, height(rng));
}

struct Shared {
    std::string config_path;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

int cmd_kernel(const Shared& s, const std::string& input, std::ostream& out) {
    const cone::RunConfig rc = cone::load_config(s.config_path);
    const cone::Matrix x = cone::load_embeddings(input);
    cone::AttentionBatch batch{x, x, x, std::nullopt};
    if (x.rows() == 0) throw Error(ErrorCode::format, input + ": no embeddings");
    std::ostringstream csv;
    cone::write_csv(csv, cone::pairwise_logits(batch, rc.kernel, s.threads));
    emit(s.output, csv.str(), out);
    return kSuccess;
}

int cmd_attend(const Shared& s, const std::string& q, const std::string& k, const std::string& v,
               std::ostream& out) {
    const cone::RunConfig rc = cone::load_config(s.config_path);
    cone::AttentionBatch batch{cone::load_embeddings(q), cone::load_embeddings(k), cone::load_embeddings(v),
                               std::nullopt};
    std::ostringstream csv;
    cone::write_csv(csv, cone::multi_head(batch, rc.kernel, rc.heads, s.threads));
    emit(s.output, csv.str(), out);
    return kSuccess;
}

int cmd_oracle_check(const Shared& s, std::size_t samples, std::size_t grid, std::ostream& out) {
    const cone::RunConfig rc = cone::load_config(s.config_path);
    const cone::KernelConfig& k = rc.kernel;
    if (!cone::is_cone(k.kind)) throw Error(ErrorCode::domain, "oracle-check needs a cone kernel");
    std::mt19937_64 rng(*s.seed);
    double worst = 0.0;
    std::string worst_case = "none";
    for (std::size_t i = 0; i < samples; ++i) {
        const auto u = sample_point(k, rng);
        const auto v = sample_point(k, rng);
        const cone::PlaneCoords p = cone::reduce_to_plane(u, v);
        const bool penumbral = k.kind == cone::KernelKind::penumbral;
        const double closed = penumbral ? cone::penumbral_height(p, k.light_height)
                                        : cone::umbral_height(p, k.ball_radius);
        std::vector<std::pair<std::string, double>> refs;
        refs.emplace_back("brute_force", cone::oracle_bruteforce_height(u, v, k, grid));
        if (!penumbral)
            refs.emplace_back("line_intersection", cone::oracle_sup2_umbral(u, v, k.ball_radius).height);
        else if (cone::penumbral_exists(p, k.light_height))
            refs.emplace_back("arc_intersection", cone::oracle_sup2_penumbral(u, v, k.light_height).height);
        else
            refs.emplace_back("min_light_source", cone::oracle_min_lightsource(u, v));
        for (const auto& [name, ref] : refs) {
            const double err = std::abs(closed - ref);
            if (err >= worst) {
                worst = err;
                worst_case = "delta=" + fmt(p.delta) + " hu=" + fmt(p.hu) + " hv=" + fmt(p.hv) +
                             " closed=" + fmt(closed) + " " + name + "=" + fmt(ref);
            }
        }
    }
    const bool ok = worst <= kOracleTolerance;
    out << "kernel " << cone::to_string(k.kind) << ", samples " << samples << ", seed " << *s.seed
        << ", threads " << s.threads << "\n"
        << "max |closed - oracle| = " << fmt(worst) << (ok ? " (ok)" : " (FAILED)") << "\n"
        << "worst case: " << worst_case << "\n";
    return ok ? kSuccess : kCheckFailed;
}

int cmd_grad_check(const Shared& s, std::size_t samples, std::size_t dim, std::ostream& out) {
    const cone::RunConfig rc = cone::load_config(s.config_path);
    const cone::KernelConfig& k = rc.kernel;
    if (dim < 2) throw Error(ErrorCode::domain, "grad-check needs --dim >= 2");
    std::mt19937_64 rng(*s.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    std::size_t checked = 0, rejected = 0;
    while (checked < samples) {
        if (rejected > 1000 * (samples + 1))
            throw Error(ErrorCode::domain, "could not find enough smooth sample points");
        std::vector<double> q(dim), kk(dim);
        for (double& x : q) x = normal(rng);
        for (double& x : kk) x = normal(rng);
        double margin;
        try {
            margin = cone::raw_smoothness_margin(q, kk, k);
        } catch (const Error&) {
            ++rejected;
            continue;
        }
        if (!(margin >= kGradMargin)) {
            ++rejected;
            continue;
        }
        const cone::PairGradient g = cone::raw_logit_grad(q, kk, k);
        std::vector<double> joint(q);
        joint.insert(joint.end(), kk.begin(), kk.end());
        std::vector<double> analytic(g.grad_u);
        analytic.insert(analytic.end(), g.grad_v.begin(), g.grad_v.end());
        const auto fn = [&](std::span<const double> z) {
            return cone::raw_logit(z.subspan(0, dim), z.subspan(dim, dim), k);
        };
        worst = std::max(worst, cone::finite_diff_check(fn, joint, analytic));
        ++checked;
    }
    const bool ok = worst <= kGradTolerance;
    out << "kernel " << cone::to_string(k.kind) << ", projection " << cone::to_string(cone::resolve_projection(k))
        << ", samples " << samples << ", seed " << *s.seed << ", threads " << s.threads << "\n"
        << "max relative error = " << fmt(worst) << (ok ? " (ok)" : " (FAILED)") << "\n";
    return ok ? kSuccess : kCheckFailed;
}

struct TreeArgs {
    std::string tree_file;
    std::string generate;
    std::size_t size = 0;
    bool train = false;
    std::size_t steps = 2000;
    double lr = 0.2;
    std::size_t dim = 3;
};

int cmd_tree_bench(const Shared& s, const TreeArgs& t, std::ostream& out) {
    const cone::RunConfig rc = cone::load_config(s.config_path);
    if (!cone::is_cone(rc.kernel.kind)) throw Error(ErrorCode::domain, "tree-bench needs a cone kernel");
    std::optional<cone::TreeSpec> tree;
    json report;
    if (!t.tree_file.empty()) {
        tree = cone::load_tree(t.tree_file);
        report["tree"] = {{"file", t.tree_file}};
    } else {
        const auto kind = cone::parse_tree_kind(t.generate);
        if (!kind) throw Error(ErrorCode::format, "unknown tree kind \"" + t.generate + "\"");
        tree = cone::generate_tree(*kind, t.size, *s.seed);
        report["tree"] = {{"generator", t.generate}, {"size", t.size}};
    }
    report["tree"]["nodes"] = tree->size();
    report["tree"]["leaves"] = tree->leaves().size();
    report["tree"]["max_depth"] = tree->max_depth();
    report["kernel"] = cone::to_string(rc.kernel.kind);
    report["seed"] = *s.seed;
    report["threads"] = s.threads;

    const auto points = cone::embed_tree_cone_consistent(*tree, rc.kernel);
    cone::RankOptions opts;
    opts.seed = *s.seed;
    report["constructive"] = score_json(cone::lca_rank_score(points, *tree, rc.kernel, opts));
    cone::RankOptions null_opts;
    null_opts.seed = *s.seed;
    null_opts.max_triples = 10000;
    const auto shuffled = cone::shuffle_leaf_embeddings(points, *tree, *s.seed);
    report["shuffled_null"] = score_json(cone::lca_rank_score(shuffled, *tree, rc.kernel, null_opts));

    if (t.train) {
        cone::TrainOptions to;
        to.steps = t.steps;
        to.learning_rate = t.lr;
        to.dim = t.dim;
        to.seed = *s.seed;
        const cone::TrainResult r = cone::train_toy(*tree, rc.kernel, to);
        report["train"] = {{"steps", t.steps},
                           {"learning_rate", t.lr},
                           {"dim", t.dim},
                           {"initial_loss", r.loss_curve.front()},
                           {"final_loss", r.loss_curve.back()},
                           {"loss_curve", r.loss_curve},
                           {"scores", score_json(r.final_scores)}};
    }
    emit(s.output, report.dump(2) + "\n", out);
    return kSuccess;
}

int cmd_perf(const Shared& s, const std::string& sizes_text, std::size_t d, std::size_t reps, bool all_kernels,
             std::ostream& out, std::ostream& err) {
    const cone::RunConfig rc = cone::load_config(s.config_path);
    std::vector<double> sizes;
    {
        std::stringstream ss(sizes_text);
        for (std::string item; std::getline(ss, item, ',');) {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(item, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != item.size() || v < 1) throw Error(ErrorCode::format, "bad size \"" + item + "\" in --sizes");
            sizes.push_back(static_cast<double>(v));
        }
    }
    if (sizes.empty()) throw Error(ErrorCode::format, "--sizes is empty");

    std::vector<cone::KernelConfig> configs;
    if (all_kernels) {
        for (auto kind : {cone::KernelKind::penumbral, cone::KernelKind::umbral, cone::KernelKind::dist_halfspace,
                          cone::KernelKind::dist_hyperboloid, cone::KernelKind::laplacian, cone::KernelKind::dot}) {
            cone::KernelConfig c = rc.kernel;
            c.kind = kind;
            c.projection.reset();
            configs.push_back(c);
        }
    } else {
        configs.push_back(rc.kernel);
    }

    std::vector<cone::BenchRow> rows;
    std::ostringstream summary;
    std::optional<double> dot_time, cone_time;
    for (const auto& c : configs) {
        std::vector<double> times;
        for (double n : sizes) {
            const auto nn = static_cast<std::size_t>(n);
            const cone::Throughput tp = cone::measure_throughput(nn, nn, d, c, reps, *s.seed, s.threads);
            rows.push_back({std::string(cone::to_string(c.kind)), nn, nn, d, s.threads, tp.median_seconds,
                            tp.tokens_per_second});
            times.push_back(tp.median_seconds);
        }
        if (c.kind == cone::KernelKind::dot) dot_time = times.back();
        if (cone::is_cone(c.kind)) cone_time = std::max(cone_time.value_or(0.0), times.back());
        summary << cone::to_string(c.kind) << ": scaling exponent ";
        if (sizes.size() >= 3)
            summary << fmt(cone::scaling_exponent(times, sizes)) << "\n";
        else
            summary << "n/a (needs 3 sizes)\n";
    }
    if (dot_time && cone_time)
        summary << "slowest cone / dot time at n=" << sizes.back() << ": " << fmt(*cone_time / *dot_time) << "\n";

    std::ostringstream csv;
    cone::write_bench_csv(csv, rows);
    emit(s.output, csv.str(), out);
    (s.output.empty() || s.output == "-" ? err : out) << summary.str();
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cone attention kernels, oracles and benchmarks", "conectl"};
    app.footer(kFormats);
    app.require_subcommand(1);

    Shared s;
    auto add_common = [&](CLI::App* sub, bool seeded, bool output = true) {
        sub->add_option("-c,--config", s.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        if (output) sub->add_option("-o,--output", s.output, "output file ('-' or omitted: stdout)");
        sub->add_option("--threads", s.threads, "worker threads (recorded in outputs)")->check(CLI::PositiveNumber);
        if (seeded) sub->add_option("--seed", s.seed, "random seed")->required();
    };

    std::string input, qf, kf, vf, sizes = "128,256,512,1024";
    std::size_t samples = 1000, grid = 2000, dim = 3, d = 64, reps = 5;
    bool all_kernels = false;
    TreeArgs t;

    auto* kernel = app.add_subcommand("kernel", "write the logit matrix of a set of embeddings against itself");
    add_common(kernel, false);
    kernel->add_option("-i,--input", input, "embedding file")->required()->check(CLI::ExistingFile);

    auto* attend = app.add_subcommand("attend", "run (multi-head) attention and write the n x dv output");
    add_common(attend, false);
    attend->add_option("--queries", qf, "query embeddings")->required()->check(CLI::ExistingFile);
    attend->add_option("--keys", kf, "key embeddings")->required()->check(CLI::ExistingFile);
    attend->add_option("--values", vf, "value embeddings")->required()->check(CLI::ExistingFile);

    auto* oracle = app.add_subcommand("oracle-check", "compare closed-form heights with the oracles");
    add_common(oracle, true, false);
    oracle->add_option("--samples", samples, "random pairs")->check(CLI::PositiveNumber);
    oracle->add_option("--grid", grid, "brute-force grid columns")->check(CLI::Range(2, 1000000));

    auto* grad = app.add_subcommand("grad-check", "compare analytic gradients with central differences");
    add_common(grad, true, false);
    grad->add_option("--samples", samples, "random smooth points")->check(CLI::PositiveNumber);
    grad->add_option("--dim", dim, "Euclidean input dimension");

    auto* tree = app.add_subcommand("tree-bench", "embed a tree and score LCA ranking (JSON report)");
    add_common(tree, true);
    auto* tree_file = tree->add_option("--tree", t.tree_file, "tree file")->check(CLI::ExistingFile);
    auto* gen = tree->add_option("--generate", t.generate, "complete_binary or random_attachment");
    tree->add_option("--size", t.size, "node count for --generate")->needs(gen);
    tree_file->excludes(gen);
    tree->add_flag("--train", t.train, "also run the toy training loop");
    tree->add_option("--steps", t.steps, "training steps");
    tree->add_option("--lr", t.lr, "learning rate");
    tree->add_option("--dim", t.dim, "training dimension");

    auto* perf = app.add_subcommand("perf", "time attention and fit the scaling exponent (CSV)");
    add_common(perf, true);
    perf->add_option("--sizes", sizes, "comma separated n = m values");
    perf->add_option("--d", d, "embedding dimension")->check(CLI::PositiveNumber);
    perf->add_option("--reps", reps, "timed repetitions (>= 3)")->check(CLI::Range(3, 1000));
    perf->add_flag("--all-kernels", all_kernels, "benchmark every kernel with its default projection");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        if (*kernel) return cmd_kernel(s, input, out);
        if (*attend) return cmd_attend(s, qf, kf, vf, out);
        if (*oracle) return cmd_oracle_check(s, samples, grid, out);
        if (*grad) return cmd_grad_check(s, samples, dim, out);
        if (*tree) {
            if (t.tree_file.empty() && t.generate.empty()) {
                err << "tree-bench: one of --tree or --generate is required\n";
                return kInputError;
            }
            if (!t.generate.empty() && t.size == 0) {
                err << "tree-bench: --generate needs --size >= 1\n";
                return kInputError;
            }
            return cmd_tree_bench(s, t, out);
        }
        if (*perf) return cmd_perf(s, sizes, d, reps, all_kernels, out, err);
    } catch (const Error& e) {
        err << "error (" << cone::to_string(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace conectl
