#include "mtc/params.hpp"

#include <algorithm>

#include "mtc/error.hpp"

namespace mtc::params {

std::size_t ratio_tenths(std::size_t clip_length) {
    if (clip_length == 0) throw InvalidArgument("clip length must be positive");
    return (clip_length + 49) / 50;
}

double auto_ratio(std::size_t clip_length) {
    return static_cast<double>(ratio_tenths(clip_length)) / 10.0;
}

int auto_quant(std::size_t components) {
    if (components == 0) throw InvalidArgument("k must be positive");
    if (components <= 30) return 0;
    return static_cast<int>((components - 30 + 9) / 10);
}

std::size_t derive_l(std::size_t components, std::size_t clip_length) {
    if (components == 0) throw InvalidArgument("k must be positive");
    // round(tenths * k / 10), half away from zero, on non-negative integers.
    const std::size_t l = (ratio_tenths(clip_length) * components + 5) / 10;
    return std::clamp<std::size_t>(l, 1, clip_length);
}

}  // namespace mtc::params
