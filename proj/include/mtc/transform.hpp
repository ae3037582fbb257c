#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mtc/matrix.hpp"
#include "mtc/sequence.hpp"

namespace mtc::transform {

/// Orthonormal DCT-II basis of size L; column m is frequency m, column 0 is constant.
struct DctBasis {
    std::size_t length = 0;
    Matrix matrix;  // L x L
};

/// First `retained` columns of the DCT-II basis of size `length`.
struct TruncatedDct {
    std::size_t length = 0;
    std::size_t retained = 0;
    Matrix matrix;  // L x l
};

/// 3n x k matrix with orthonormal columns shared by all clips.
struct TransformBasis {
    Matrix matrix;
    /// Eigenvalues of C paired with each column (descending), when known.
    std::vector<double> eigenvalues;

    std::size_t rows() const noexcept { return matrix.rows(); }
    std::size_t components() const noexcept { return matrix.cols(); }
};

/// k x l_i coefficient matrix of one clip.
struct ClipCoefficients {
    Matrix matrix;
};

DctBasis dct_basis(std::size_t length);
TruncatedDct truncated_dct(std::size_t length, std::size_t retained);

/// M_i * D~_i for one clip (3n x l_i).
Matrix right_transform(const Clip& clip, const TruncatedDct& dct);

/// C = sum_i M_i D~_i D~_i^T M_i^T, symmetric 3n x 3n.
Matrix accumulate_C(std::span<const Clip> clips, std::span<const TruncatedDct> dcts);

/// Same as accumulate_C with per-clip weights w_i >= 0.
Matrix accumulate_weighted(std::span<const Clip> clips, std::span<const TruncatedDct> dcts,
                           std::span<const double> weights);

/// sum_i w_i P_i P_i^T for precomputed right transforms P_i = M_i D~_i.
Matrix accumulate_projected(std::span<const Matrix> projected, std::span<const double> weights);

/// Unit eigenvectors for the k largest eigenvalues of symmetric C, in
/// descending eigenvalue order (ties keep solver order). Each column's
/// largest-magnitude entry is made positive.
TransformBasis top_eigenvectors(const Matrix& c, std::size_t k);

/// Tr(B^T C B)
double trace_objective(const Matrix& c, const Matrix& basis);

/// S_i = B^T M_i D~_i
ClipCoefficients project_clip(const TransformBasis& basis, const Clip& clip, const TruncatedDct& dct);
ClipCoefficients project_clip(const Matrix& basis, const Clip& clip, const TruncatedDct& dct);

/// B S_i D~_i^T
Matrix reconstruct_clip(const Matrix& basis, const Matrix& coefficients, const TruncatedDct& dct);

/// sum_i ||M_i - B S_i D~_i^T||_F^2 with S_i at its optimum, evaluated explicitly.
double objective_value(std::span<const Clip> clips, std::span<const TruncatedDct> dcts, const Matrix& basis);

/// Same objective through the trace identity sum Tr(M_i M_i^T) - Tr(B^T C B).
double objective_via_trace(std::span<const Clip> clips, std::span<const TruncatedDct> dcts, const Matrix& basis);

/// sum_i Tr(M_i M_i^T)
double total_energy(std::span<const Clip> clips);

/// Scalars stored by the shared-basis coder: k (3n + sum l_i).
std::uint64_t storage_cost(std::size_t k, std::size_t markers, std::span<const std::size_t> retained);

/// Scalars stored by per-clip truncated SVD: 3n sum k_i + sum (L_i l_i + k_i).
std::uint64_t svd_storage_cost(std::size_t markers, std::span<const std::size_t> ranks,
                               std::span<const std::size_t> lengths, std::span<const std::size_t> retained);

/// Rank-k truncated SVD of one clip: M ~ U diag(s) V^T.
struct SvdCode {
    Matrix u;                     // 3n x k
    Matrix v;                     // L x k
    std::vector<double> singular; // k values, descending
    Matrix reconstruction;
    /// Sum of squared discarded singular values.
    double discarded_energy = 0.0;
};

SvdCode baseline_svd_code(const Clip& clip, std::size_t rank);

/// Full 2D DCT of a clip keeping the `keep` largest-magnitude coefficients
/// (earlier row-major position wins ties).
struct Dct2dCode {
    Matrix coefficients;  // 3n x L with all but `keep` entries zeroed
    Matrix reconstruction;
    double discarded_energy = 0.0;
};

Dct2dCode baseline_dct2d_code(const Clip& clip, std::size_t keep);

}  // namespace mtc::transform
