#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "isnet/error.hpp"

namespace isnet {

/// Dense row-major matrix of doubles. The single numeric carrier for
/// batches, weights and gradients. Values handed out by library
/// operations are meant to be treated as immutable; share freely across
/// threads for reading.
class Matrix2D {
public:
    Matrix2D() = default;

    Matrix2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix2D from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix2D m;
        m.rows_ = rows.size();
        m.cols_ = rows.size() ? rows.begin()->size() : 0;
        m.data_.reserve(m.rows_ * m.cols_);
        for (const auto& r : rows) {
            if (r.size() != m.cols_)
                throw ShapeError("from_rows: ragged initializer");
            m.data_.insert(m.data_.end(), r.begin(), r.end());
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline bool all_finite(const Matrix2D& m) {
    for (double v : m.data())
        if (!std::isfinite(v)) return false;
    return true;
}

/// Public operations reject non-finite inputs explicitly instead of
/// propagating NaNs.
inline void ensure_finite(const Matrix2D& m, const char* what) {
    if (!all_finite(m))
        throw NumericError(std::string(what) + ": non-finite entry");
}

inline void ensure_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw NumericError(std::string(what) + ": non-finite entry");
}

/// Standard matrix product. The reduction over k runs left to right for
/// every output cell, so results are bit-reproducible across runs and
/// platforms.
inline Matrix2D matmul(const Matrix2D& a, const Matrix2D& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + ")");
    ensure_finite(a, "matmul lhs");
    ensure_finite(b, "matmul rhs");
    Matrix2D out(a.rows(), b.cols(), 0.0);
    const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < k_dim; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j)
                out(i, j) += aik * b(k, j);
        }
    }
    ensure_finite(out, "matmul result");
    return out;
}

inline Matrix2D transpose(const Matrix2D& a) {
    Matrix2D out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(j, i) = a(i, j);
    return out;
}

inline Matrix2D hadamard(const Matrix2D& a, const Matrix2D& b) {
    if (!a.same_shape(b))
        throw ShapeError("hadamard: shapes differ");
    Matrix2D out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] *= b.data()[i];
    return out;
}

inline Matrix2D add(const Matrix2D& a, const Matrix2D& b) {
    if (!a.same_shape(b))
        throw ShapeError("add: shapes differ");
    Matrix2D out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] += b.data()[i];
    return out;
}

inline Matrix2D scale(const Matrix2D& a, double s) {
    Matrix2D out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

/// Adds `row` to every row of `m` (bias broadcast).
inline Matrix2D add_row_broadcast(const Matrix2D& m, const std::vector<double>& row) {
    if (row.size() != m.cols())
        throw ShapeError("add_row_broadcast: row length differs from cols");
    Matrix2D out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) += row[j];
    return out;
}

inline std::vector<double> column_sums(const Matrix2D& m) {
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out[j] += m(i, j);
    return out;
}

} // namespace isnet
