#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mtc {

/// Dense row-major matrix of doubles. Rows are contiguous so that the
/// per-row kernels (dot, axpy, trajectory differences) can stream them.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    /// Copy of columns [first, first + count).
    Matrix columns(std::size_t first, std::size_t count) const;
    /// Copy of rows [first, first + count).
    Matrix rows_slice(std::size_t first, std::size_t count) const;

    Matrix transpose() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// a * b
Matrix multiply(const Matrix& a, const Matrix& b);
/// transpose(a) * b
Matrix multiply_at_b(const Matrix& a, const Matrix& b);
/// a * transpose(b)
Matrix multiply_a_bt(const Matrix& a, const Matrix& b);

/// sum of squared entries
double frobenius_sq(const Matrix& a);
/// sum of the diagonal
double trace(const Matrix& a);
/// max |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

/// max |a - a^T|
double asymmetry(const Matrix& a);

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMatrix to_eigen(const Matrix& m);
Matrix from_eigen(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace mtc
