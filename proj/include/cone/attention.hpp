#pragma once

// Batched attention: project, score every query/key pair, softmax each row,
// then average the value rows.
//
// Work is split across query rows only. Each row is always reduced in the
// same order, so results are bit-identical for any thread count.

#include "cone/kernels.hpp"
#include "cone/matrix.hpp"

#include <cstddef>
#include <optional>

namespace cone {

struct AttentionBatch {
    Matrix queries;             // n x d
    Matrix keys;                // m x d
    Matrix values;              // m x dv
    std::optional<Mask> mask;   // n x m, true = attend

    void validate() const;
};

/// Applies the config's projection to every row. Cone and distance kernels
/// need at least two columns, since the last one becomes the height.
Matrix project_rows(const Matrix& x, const KernelConfig& config);

/// n x m logits; masked entries are -infinity.
Matrix pairwise_logits(const AttentionBatch& batch, const KernelConfig& config,
                       std::size_t threads = 1);

/// Row softmax with the row maximum subtracted first. -infinity maps to an
/// exact 0. The normalizer adds the terms in ascending order, so permuting
/// a row permutes its weights bit for bit.
Matrix softmax_rows(const Matrix& logits, std::size_t threads = 1);

/// weights (n x m) times values (m x dv), summed left to right.
Matrix aggregate(const Matrix& weights, const Matrix& values, std::size_t threads = 1);

Matrix attend(const AttentionBatch& batch, const KernelConfig& config, std::size_t threads = 1);

/// Splits d and dv into `heads` contiguous blocks, attends per block and
/// concatenates the outputs.
Matrix multi_head(const AttentionBatch& batch, const KernelConfig& config, std::size_t heads,
                  std::size_t threads = 1);

}  // namespace cone
