#include "mtc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtc/error.hpp"
#include "mtc/kernels.hpp"

namespace mtc {
namespace {

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": " + dims(a) + " vs " + dims(b));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix value count " + std::to_string(data_.size()) + " does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::columns(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw ShapeError("column range out of bounds");
    Matrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::copy_n(data_.data() + r * cols_ + first, count, out.data_.data() + r * count);
    }
    return out;
}

Matrix Matrix::rows_slice(std::size_t first, std::size_t count) const {
    if (first + count > rows_) throw ShapeError("row range out of bounds");
    Matrix out(count, cols_);
    std::copy_n(data_.data() + first * cols_, count * cols_, out.data_.data());
    return out;
}

Matrix Matrix::transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out = a;
    kernels::active().axpy(1.0, b.values().data(), out.values().data(), out.size());
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix out = a;
    kernels::active().axpy(-1.0, b.values().data(), out.values().data(), out.size());
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (double& v : out.values()) v *= s;
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("multiply: " + dims(a) + " * " + dims(b));
    const auto& k = kernels::active();
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row(i).data();
        for (std::size_t p = 0; p < a.cols(); ++p) {
            k.axpy(a(i, p), b.row(p).data(), dst, b.cols());
        }
    }
    return out;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("multiply_at_b: " + dims(a) + "^T * " + dims(b));
    const auto& k = kernels::active();
    Matrix out(a.cols(), b.cols());
    for (std::size_t p = 0; p < a.rows(); ++p) {
        const double* src = b.row(p).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            k.axpy(a(p, i), src, out.row(i).data(), b.cols());
        }
    }
    return out;
}

Matrix multiply_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("multiply_a_bt: " + dims(a) + " * " + dims(b) + "^T");
    const auto& k = kernels::active();
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = k.dot(a.row(i).data(), b.row(j).data(), a.cols());
    return out;
}

double frobenius_sq(const Matrix& a) {
    const double* p = a.values().data();
    return kernels::active().dot(p, p, a.size());
}

double trace(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
    return m;
}

double asymmetry(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("asymmetry: matrix is not square");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j) - a(j, i)));
    return m;
}

EigenMatrix to_eigen(const Matrix& m) {
    EigenMatrix out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    std::copy(m.values().begin(), m.values().end(), out.data());
    return out;
}

Matrix from_eigen(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

}  // namespace mtc
