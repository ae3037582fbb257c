#include "mtc/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtc/error.hpp"
#include "mtc/kernels.hpp"

namespace mtc::quantize {

QuantizedBasis quantize_basis(const Matrix& basis) {
    QuantizedBasis q{basis.rows(), basis.cols(), std::vector<std::int16_t>(basis.size())};
    std::vector<double> scaled(basis.size());
    kernels::active().scale_round(basis.values().data(), kBasisScale, scaled.data(), scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        const double b = basis.values()[i];
        if (!(std::fabs(b) <= 1.0 + 1e-9)) {
            throw InvalidArgument("basis entry " + std::to_string(b) + " exceeds unit magnitude");
        }
        q.values[i] = static_cast<std::int16_t>(std::clamp(scaled[i], -kBasisScale, kBasisScale));
    }
    return q;
}

Matrix dequantize_basis(const QuantizedBasis& q) {
    Matrix m(q.rows, q.cols);
    for (std::size_t i = 0; i < q.values.size(); ++i) m.values()[i] = static_cast<double>(q.values[i]) / kBasisScale;
    return m;
}

QuantizedCoeffs quantize_coeffs(const Matrix& coefficients, int fractional_bits) {
    if (fractional_bits < 0 || fractional_bits > kMaxFractionalBits) {
        throw InvalidArgument("fractional bits Q = " + std::to_string(fractional_bits) + " must lie in [0, " +
                              std::to_string(kMaxFractionalBits) + "]");
    }
    QuantizedCoeffs q{coefficients.rows(), coefficients.cols(), fractional_bits,
                      std::vector<std::int64_t>(coefficients.size())};
    std::vector<double> scaled(coefficients.size());
    kernels::active().scale_round(coefficients.values().data(), std::ldexp(1.0, fractional_bits), scaled.data(),
                                  scaled.size());
    constexpr double limit = 9223372036854775808.0;  // 2^63
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        if (!(scaled[i] >= -limit && scaled[i] < limit)) {
            throw NumericError("coefficient " + std::to_string(coefficients.values()[i]) +
                               " overflows 63-bit fixed point at Q = " + std::to_string(fractional_bits));
        }
        q.values[i] = static_cast<std::int64_t>(scaled[i]);
    }
    return q;
}

Matrix dequantize_coeffs(const QuantizedCoeffs& q) {
    Matrix m(q.rows, q.cols);
    const double step = std::ldexp(1.0, -q.fractional_bits);
    for (std::size_t i = 0; i < q.values.size(); ++i) m.values()[i] = static_cast<double>(q.values[i]) * step;
    return m;
}

double coeff_error_bound(int fractional_bits) { return std::ldexp(1.0, -fractional_bits - 1); }

double basis_error_bound() { return 1.0 / 65534.0; }

}  // namespace mtc::quantize
