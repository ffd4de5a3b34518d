#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mfcl {

// Dense row-major matrix of doubles. Every constructor rejects non-finite
// entries; mutable element access is unchecked and callers that write through
// it are responsible for keeping values finite (see check_finite).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix row_vector(std::span<const double> values);
    static Matrix column_vector(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

    bool all_finite() const;
    // Throws NumericError naming `what` when any entry is NaN or infinite.
    void check_finite(const std::string& what) const;

    std::string shape_string() const;

    friend bool operator==(const Matrix& a, const Matrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T without materialising the transpose.
Matrix matmul_bt(const Matrix& a, const Matrix& b);
// a^T * b without materialising the transpose.
Matrix matmul_at(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);

// Adds a 1 x cols row to every row of a.
Matrix add_row(const Matrix& a, const Matrix& row);
// 1 x cols matrix of column sums.
Matrix column_sums(const Matrix& a);

// Rows [begin, begin + count) of a, or the rows listed in idx.
Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t count);
Matrix gather_rows(const Matrix& a, std::span<const std::size_t> idx);
// Horizontal concatenation; row counts must match.
Matrix hconcat(const Matrix& a, const Matrix& b);
// Vertical concatenation; column counts must match.
Matrix vconcat(const Matrix& a, const Matrix& b);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace mfcl
