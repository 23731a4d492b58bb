#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cone {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    /// Columns [first, first + count) as a new matrix.
    Matrix col_slice(std::size_t first, std::size_t count) const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Row-major boolean mask; true means "attend".
class Mask {
public:
    Mask() = default;
    Mask(std::size_t rows, std::size_t cols, bool fill = true)
        : rows_(rows), cols_(cols), data_(rows * cols, fill ? 1 : 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value) noexcept { data_[i * cols_ + j] = value ? 1 : 0; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<unsigned char> data_;
};

}  // namespace cone
