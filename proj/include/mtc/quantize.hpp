#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mtc/matrix.hpp"

namespace mtc::quantize {

/// 16-bit basis entries: q = round(b * 32767).
struct QuantizedBasis {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int16_t> values;  // row-major
};

/// Fixed-point coefficients: v = round(s * 2^Q).
struct QuantizedCoeffs {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int fractional_bits = 0;
    std::vector<std::int64_t> values;  // row-major
};

inline constexpr double kBasisScale = 32767.0;
/// Largest fractional bit count accepted by the quantizer and the stream format.
inline constexpr int kMaxFractionalBits = 62;

QuantizedBasis quantize_basis(const Matrix& basis);
Matrix dequantize_basis(const QuantizedBasis& q);

QuantizedCoeffs quantize_coeffs(const Matrix& coefficients, int fractional_bits);
Matrix dequantize_coeffs(const QuantizedCoeffs& q);

/// 2^-(Q+1), the per-entry dequantization error bound.
double coeff_error_bound(int fractional_bits);
/// 1 / 65534, the per-entry basis error bound.
double basis_error_bound();

}  // namespace mtc::quantize
