#include "cone/matrix.hpp"

#include "cone/errors.hpp"

#include <string>

namespace cone {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) fail(ErrorCode::dimension, "ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) {
            fail(ErrorCode::dimension, "row " + std::to_string(i) + " has " +
                                           std::to_string(rows[i].size()) + " entries, expected " +
                                           std::to_string(m.cols_));
        }
        for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix Matrix::col_slice(std::size_t first, std::size_t count) const {
    if (first + count > cols_) fail(ErrorCode::dimension, "column slice out of range");
    Matrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
    return out;
}

}  // namespace cone
