#pragma once

#include <cstddef>

namespace mtc::params {

/// ceil(L / 50), the ratio r = l / k expressed in tenths.
std::size_t ratio_tenths(std::size_t clip_length);

/// r = 0.1 * ceil(L / 50)
double auto_ratio(std::size_t clip_length);

/// Fractional bits for the coefficients: 0 for k <= 30, ceil((k - 30) / 10) above.
/// The upper branch is continued past k = 93 unchanged.
int auto_quant(std::size_t components);

/// l = clamp(round(r * k), 1, L) with r = auto_ratio(L); exact integer arithmetic.
std::size_t derive_l(std::size_t components, std::size_t clip_length);

}  // namespace mtc::params
