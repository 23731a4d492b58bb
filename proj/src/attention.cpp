#include "cone/attention.hpp"

#include "cone/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace cone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Runs body(begin, end) over contiguous chunks of [0, rows). The first
// exception in chunk order is rethrown after all workers finish.
void for_row_chunks(std::size_t rows, std::size_t threads,
                    const std::function<void(std::size_t, std::size_t)>& body) {
    threads = std::max<std::size_t>(1, std::min(threads, rows));
    if (threads == 1) {
        body(0, rows);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (rows + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(rows, t * chunk);
        const std::size_t end = std::min(rows, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void AttentionBatch::validate() const {
    if (queries.cols() != keys.cols())
        fail(ErrorCode::dimension, "queries " + shape(queries) + " and keys " + shape(keys) +
                                       " have different widths");
    if (values.rows() != keys.rows())
        fail(ErrorCode::dimension, "values " + shape(values) + " must have one row per key (" +
                                       std::to_string(keys.rows()) + ")");
    if (queries.cols() == 0) fail(ErrorCode::dimension, "embeddings must have at least one column");
    if (keys.rows() == 0) fail(ErrorCode::dimension, "at least one key is required");
    if (mask) {
        if (mask->rows() != queries.rows() || mask->cols() != keys.rows())
            fail(ErrorCode::dimension, "mask shape does not match queries x keys");
        for (std::size_t i = 0; i < mask->rows(); ++i) {
            bool any = false;
            for (std::size_t j = 0; j < mask->cols() && !any; ++j) any = (*mask)(i, j);
            if (!any) fail(ErrorCode::domain, "mask row " + std::to_string(i) + " attends to nothing");
        }
    }
}

Matrix project_rows(const Matrix& x, const KernelConfig& config) {
    const ProjectionKind kind = resolve_projection(config);
    if (kind != ProjectionKind::identity && x.cols() < 2)
        fail(ErrorCode::dimension, "projection '" + std::string(to_string(kind)) +
                                       "' needs at least 2 columns");
    if (kind == ProjectionKind::identity) return x;
    const double h = projection_height(config);
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        try {
            const auto p = project(x.row(i), kind, h);
            std::copy(p.begin(), p.end(), out.row(i).begin());
        } catch (const Error& e) {
            fail(e.code(), "row " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

Matrix pairwise_logits(const AttentionBatch& batch, const KernelConfig& config, std::size_t threads) {
    config.validate();
    batch.validate();
    Matrix q, k;
    try {
        q = project_rows(batch.queries, config);
    } catch (const Error& e) {
        fail(e.code(), std::string("query ") + e.what());
    }
    try {
        k = project_rows(batch.keys, config);
    } catch (const Error& e) {
        fail(e.code(), std::string("key ") + e.what());
    }
    const std::size_t n = q.rows();
    const std::size_t m = k.rows();
    Matrix logits(n, m);
    for_row_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (batch.mask && !(*batch.mask)(i, j)) {
                    logits(i, j) = kNegInf;
                    continue;
                }
                try {
                    logits(i, j) = pair_logit(q.row(i), k.row(j), config);
                } catch (const Error& e) {
                    fail(e.code(), "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                       "): " + e.what());
                }
            }
        }
    });
    return logits;
}

Matrix softmax_rows(const Matrix& logits, std::size_t threads) {
    const std::size_t m = logits.cols();
    Matrix out(logits.rows(), m);
    for_row_chunks(logits.rows(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> sorted(m);
        for (std::size_t i = begin; i < end; ++i) {
            const auto row = logits.row(i);
            double top = kNegInf;
            for (double x : row) {
                if (std::isnan(x) || x == std::numeric_limits<double>::infinity())
                    fail(ErrorCode::numeric_range, "logit row " + std::to_string(i) + " is not finite");
                top = std::max(top, x);
            }
            if (top == kNegInf)
                fail(ErrorCode::domain, "logit row " + std::to_string(i) + " has no finite entry");
            auto w = out.row(i);
            for (std::size_t j = 0; j < m; ++j) w[j] = row[j] == kNegInf ? 0.0 : std::exp(row[j] - top);
            std::copy(w.begin(), w.end(), sorted.begin());
            std::sort(sorted.begin(), sorted.end());
            double total = 0.0;
            for (double x : sorted) total += x;
            for (double& x : w) x /= total;
        }
    });
    return out;
}

Matrix aggregate(const Matrix& weights, const Matrix& values, std::size_t threads) {
    if (weights.cols() != values.rows())
        fail(ErrorCode::dimension, "weights " + shape(weights) + " cannot multiply values " + shape(values));
    const std::size_t dv = values.cols();
    Matrix out(weights.rows(), dv);
    for_row_chunks(weights.rows(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto o = out.row(i);
            for (std::size_t j = 0; j < weights.cols(); ++j) {
                const double w = weights(i, j);
                if (w == 0.0) continue;
                const auto v = values.row(j);
                for (std::size_t c = 0; c < dv; ++c) o[c] += w * v[c];
            }
        }
    });
    return out;
}

Matrix attend(const AttentionBatch& batch, const KernelConfig& config, std::size_t threads) {
    const Matrix logits = pairwise_logits(batch, config, threads);
    return aggregate(softmax_rows(logits, threads), batch.values, threads);
}

Matrix multi_head(const AttentionBatch& batch, const KernelConfig& config, std::size_t heads,
                  std::size_t threads) {
    if (heads == 0) fail(ErrorCode::domain, "heads must be positive");
    batch.validate();
    const std::size_t d = batch.queries.cols();
    const std::size_t dv = batch.values.cols();
    if (d % heads != 0 || dv % heads != 0)
        fail(ErrorCode::domain, "d = " + std::to_string(d) + " and dv = " + std::to_string(dv) +
                                    " must both be divisible by heads = " + std::to_string(heads));
    if (heads == 1) return attend(batch, config, threads);
    const std::size_t dh = d / heads;
    const std::size_t dvh = dv / heads;
    Matrix out(batch.queries.rows(), dv);
    for (std::size_t hd = 0; hd < heads; ++hd) {
        AttentionBatch part{batch.queries.col_slice(hd * dh, dh), batch.keys.col_slice(hd * dh, dh),
                            batch.values.col_slice(hd * dvh, dvh), batch.mask};
        const Matrix res = attend(part, config, threads);
        for (std::size_t i = 0; i < res.rows(); ++i)
            for (std::size_t c = 0; c < dvh; ++c) out(i, hd * dvh + c) = res(i, c);
    }
    return out;
}

}  // namespace cone
