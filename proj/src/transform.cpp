#include "mtc/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mtc/error.hpp"

namespace mtc::transform {
namespace {

void require_pairs(std::span<const Clip> clips, std::span<const TruncatedDct> dcts) {
    if (clips.size() != dcts.size()) {
        throw ShapeError("clip count " + std::to_string(clips.size()) + " does not match DCT count " +
                         std::to_string(dcts.size()));
    }
    for (std::size_t i = 0; i < clips.size(); ++i) {
        if (clips[i].length() != dcts[i].length) {
            throw ShapeError("clip " + std::to_string(i) + " has length " + std::to_string(clips[i].length()) +
                             " but its DCT has length " + std::to_string(dcts[i].length));
        }
        if (i > 0 && clips[i].data.rows() != clips[0].data.rows()) {
            throw ShapeError("clip " + std::to_string(i) + " has a different row count");
        }
    }
}

}  // namespace

DctBasis dct_basis(std::size_t length) {
    if (length == 0) throw InvalidArgument("DCT length must be positive");
    return {length, truncated_dct(length, length).matrix};
}

TruncatedDct truncated_dct(std::size_t length, std::size_t retained) {
    if (length == 0) throw InvalidArgument("DCT length must be positive");
    if (retained == 0 || retained > length) {
        throw InvalidArgument("retained DCT columns l = " + std::to_string(retained) + " must lie in [1, " +
                              std::to_string(length) + "]");
    }
    const double L = static_cast<double>(length);
    Matrix d(length, retained);
    const double c0 = std::sqrt(1.0 / L);
    const double cm = std::sqrt(2.0 / L);
    for (std::size_t j = 0; j < length; ++j) {
        d(j, 0) = c0;
        for (std::size_t m = 1; m < retained; ++m) {
            // Reduce the angle modulo the period so large L keeps full precision.
            const std::size_t phase = ((2 * j + 1) * m) % (4 * length);
            d(j, m) = cm * std::cos(std::numbers::pi * static_cast<double>(phase) / (2.0 * L));
        }
    }
    return {length, retained, std::move(d)};
}

Matrix right_transform(const Clip& clip, const TruncatedDct& dct) {
    if (clip.length() != dct.length) throw ShapeError("clip length does not match DCT length");
    return multiply(clip.data, dct.matrix);
}

Matrix accumulate_projected(std::span<const Matrix> projected, std::span<const double> weights) {
    if (weights.size() != projected.size()) throw ShapeError("weight count does not match clip count");
    if (projected.empty()) throw InvalidArgument("accumulate_C needs at least one clip");
    const std::size_t rows = projected.front().rows();
    Matrix c(rows, rows);
    for (std::size_t i = 0; i < projected.size(); ++i) {
        if (projected[i].rows() != rows) throw ShapeError("clip " + std::to_string(i) + " has a different row count");
        if (weights[i] == 0.0) continue;
        const Matrix g = multiply_a_bt(projected[i], projected[i]);
        const double w = weights[i];
        auto dst = c.values();
        const auto src = g.values();
        for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += w * src[e];
    }
    return c;
}

Matrix accumulate_weighted(std::span<const Clip> clips, std::span<const TruncatedDct> dcts,
                           std::span<const double> weights) {
    require_pairs(clips, dcts);
    if (weights.size() != clips.size()) throw ShapeError("weight count does not match clip count");
    std::vector<Matrix> projected;
    projected.reserve(clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) projected.push_back(right_transform(clips[i], dcts[i]));
    return accumulate_projected(projected, weights);
}

Matrix accumulate_C(std::span<const Clip> clips, std::span<const TruncatedDct> dcts) {
    const std::vector<double> ones(clips.size(), 1.0);
    return accumulate_weighted(clips, dcts, ones);
}

TransformBasis top_eigenvectors(const Matrix& c, std::size_t k) {
    if (c.rows() != c.cols()) throw ShapeError("top_eigenvectors: matrix is not square");
    if (k == 0 || k > c.rows()) {
        throw InvalidArgument("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(c.rows()) + "]");
    }
    const Eigen::MatrixXd e = to_eigen(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");

    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    const auto n = static_cast<std::size_t>(values.size());

    // Descending eigenvalue; equal eigenvalues keep the solver's index order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values(a) > values(b); });

    TransformBasis out;
    out.matrix = Matrix(c.rows(), k);
    out.eigenvalues.reserve(k);
    for (std::size_t col = 0; col < k; ++col) {
        const auto src = static_cast<Eigen::Index>(order[col]);
        std::size_t pivot = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < c.rows(); ++r) {
            const double a = std::fabs(vectors(static_cast<Eigen::Index>(r), src));
            if (a > best) {
                best = a;
                pivot = r;
            }
        }
        const double sign = vectors(static_cast<Eigen::Index>(pivot), src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < c.rows(); ++r) {
            out.matrix(r, col) = sign * vectors(static_cast<Eigen::Index>(r), src);
        }
        out.eigenvalues.push_back(values(src));
    }
    return out;
}

double trace_objective(const Matrix& c, const Matrix& basis) {
    if (c.rows() != basis.rows()) throw ShapeError("trace_objective: basis rows do not match C");
    const Matrix cb = multiply(c, basis);
    double s = 0.0;
    for (std::size_t r = 0; r < basis.rows(); ++r)
        for (std::size_t j = 0; j < basis.cols(); ++j) s += basis(r, j) * cb(r, j);
    return s;
}

ClipCoefficients project_clip(const Matrix& basis, const Clip& clip, const TruncatedDct& dct) {
    if (basis.rows() != clip.data.rows()) {
        throw ShapeError("basis has " + std::to_string(basis.rows()) + " rows but clip has " +
                         std::to_string(clip.data.rows()));
    }
    return {multiply_at_b(basis, right_transform(clip, dct))};
}

ClipCoefficients project_clip(const TransformBasis& basis, const Clip& clip, const TruncatedDct& dct) {
    return project_clip(basis.matrix, clip, dct);
}

Matrix reconstruct_clip(const Matrix& basis, const Matrix& coefficients, const TruncatedDct& dct) {
    if (basis.cols() != coefficients.rows() || coefficients.cols() != dct.retained) {
        throw ShapeError("reconstruct_clip: basis " + std::to_string(basis.rows()) + "x" +
                         std::to_string(basis.cols()) + ", coefficients " + std::to_string(coefficients.rows()) +
                         "x" + std::to_string(coefficients.cols()) + ", DCT retains " +
                         std::to_string(dct.retained));
    }
    return multiply_a_bt(multiply(basis, coefficients), dct.matrix);
}

double total_energy(std::span<const Clip> clips) {
    double s = 0.0;
    for (const auto& c : clips) s += frobenius_sq(c.data);
    return s;
}

double objective_value(std::span<const Clip> clips, std::span<const TruncatedDct> dcts, const Matrix& basis) {
    require_pairs(clips, dcts);
    double s = 0.0;
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const auto coeffs = project_clip(basis, clips[i], dcts[i]);
        s += frobenius_sq(clips[i].data - reconstruct_clip(basis, coeffs.matrix, dcts[i]));
    }
    return s;
}

double objective_via_trace(std::span<const Clip> clips, std::span<const TruncatedDct> dcts, const Matrix& basis) {
    if (clips.empty()) return 0.0;
    return total_energy(clips) - trace_objective(accumulate_C(clips, dcts), basis);
}

std::uint64_t storage_cost(std::size_t k, std::size_t markers, std::span<const std::size_t> retained) {
    if (k == 0 || markers == 0) throw InvalidArgument("storage_cost: k and n must be positive");
    std::uint64_t sum = 0;
    for (auto l : retained) {
        if (l == 0) throw InvalidArgument("storage_cost: retained DCT columns must be positive");
        sum += l;
    }
    return static_cast<std::uint64_t>(k) * (3 * static_cast<std::uint64_t>(markers) + sum);
}

std::uint64_t svd_storage_cost(std::size_t markers, std::span<const std::size_t> ranks,
                               std::span<const std::size_t> lengths, std::span<const std::size_t> retained) {
    if (ranks.size() != lengths.size() || ranks.size() != retained.size()) {
        throw ShapeError("svd_storage_cost: per-clip lists differ in length");
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        total += 3 * static_cast<std::uint64_t>(markers) * ranks[i];
        total += static_cast<std::uint64_t>(lengths[i]) * retained[i] + ranks[i];
    }
    return total;
}

SvdCode baseline_svd_code(const Clip& clip, std::size_t rank) {
    const std::size_t rows = clip.data.rows();
    const std::size_t cols = clip.data.cols();
    if (rank == 0 || rank > std::min(rows, cols)) {
        throw InvalidArgument("SVD rank " + std::to_string(rank) + " must lie in [1, " +
                              std::to_string(std::min(rows, cols)) + "]");
    }
    const Eigen::MatrixXd m = to_eigen(clip.data);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const auto k = static_cast<Eigen::Index>(rank);

    SvdCode out;
    out.u = from_eigen(svd.matrixU().leftCols(k));
    out.v = from_eigen(svd.matrixV().leftCols(k));
    out.singular.assign(s.data(), s.data() + k);
    for (Eigen::Index i = k; i < s.size(); ++i) out.discarded_energy += s(i) * s(i);

    Matrix us = out.u;
    for (std::size_t r = 0; r < us.rows(); ++r)
        for (std::size_t j = 0; j < rank; ++j) us(r, j) *= out.singular[j];
    out.reconstruction = multiply_a_bt(us, out.v);
    return out;
}

Dct2dCode baseline_dct2d_code(const Clip& clip, std::size_t keep) {
    const std::size_t rows = clip.data.rows();
    const std::size_t cols = clip.data.cols();
    if (keep == 0 || keep > rows * cols) {
        throw InvalidArgument("coefficient count " + std::to_string(keep) + " must lie in [1, " +
                              std::to_string(rows * cols) + "]");
    }
    const Matrix left = dct_basis(rows).matrix;
    const Matrix right = dct_basis(cols).matrix;
    Matrix coeffs = multiply(multiply_at_b(left, clip.data), right);

    std::vector<std::size_t> order(coeffs.size());
    std::iota(order.begin(), order.end(), 0);
    const auto v = coeffs.values();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(v[a]) > std::fabs(v[b]); });

    Dct2dCode out;
    for (std::size_t i = keep; i < order.size(); ++i) {
        double& c = coeffs.values()[order[i]];
        out.discarded_energy += c * c;
        c = 0.0;
    }
    out.reconstruction = multiply_a_bt(multiply(left, coeffs), right);
    out.coefficients = std::move(coeffs);
    return out;
}

}  // namespace mtc::transform
