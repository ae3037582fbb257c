#include <doctest.h>

#include "mtc/error.hpp"
#include "mtc/params.hpp"

using namespace mtc::params;

TEST_CASE("ratio from clip length") {
    CHECK(auto_ratio(280) == 0.6);
    CHECK(auto_ratio(50) == 0.1);
    CHECK(auto_ratio(51) == 0.2);
    CHECK(auto_ratio(1) == 0.1);
    CHECK(ratio_tenths(270) == 6);
    CHECK_THROWS_AS(auto_ratio(0), mtc::InvalidArgument);
}

TEST_CASE("quantizer bits from k") {
    CHECK(auto_quant(1) == 0);
    CHECK(auto_quant(30) == 0);
    CHECK(auto_quant(31) == 1);
    CHECK(auto_quant(40) == 1);
    CHECK(auto_quant(41) == 2);
    CHECK(auto_quant(65) == 4);
    CHECK(auto_quant(93) == 7);
    CHECK(auto_quant(94) == 7);   // continued past 93
    CHECK(auto_quant(101) == 8);
    CHECK_THROWS_AS(auto_quant(0), mtc::InvalidArgument);
}

TEST_CASE("derived l") {
    CHECK(derive_l(50, 280) == 30);
    CHECK(derive_l(1, 1) == 1);
    CHECK(derive_l(100, 20) == 10);  // r = 0.1, so 10 <= L and no clamp applies
    CHECK(derive_l(100, 5) == 5);    // round(10) clamped to L
    CHECK(derive_l(1, 280) == 1);    // round(0.6) = 1
    CHECK(derive_l(5, 50) == 1);     // round(0.5) = 1, half away from zero
    CHECK(derive_l(25, 130) == 8);   // round(7.5) = 8
    CHECK(derive_l(4, 50) == 1);     // round(0.4) = 0, clamped up
    CHECK_THROWS_AS(derive_l(0, 10), mtc::InvalidArgument);
}

TEST_CASE("property: formulas on the parameter grid") {
    for (std::size_t L : {50, 70, 130, 180, 240, 280, 340}) {
        const std::size_t tenths = L / 50 + (L % 50 != 0 ? 1 : 0);
        CHECK(ratio_tenths(L) == tenths);
        CHECK(auto_ratio(L) == static_cast<double>(tenths) / 10.0);
        for (std::size_t k = 15; k <= 93; ++k) {
            const int q = k <= 30 ? 0 : static_cast<int>((k - 30) / 10 + ((k - 30) % 10 != 0 ? 1 : 0));
            CHECK(auto_quant(k) == q);
            const std::size_t l = derive_l(k, L);
            CHECK(l >= 1);
            CHECK(l <= L);
            // |l - r k| <= 1/2 unless clamped
            const long diff10 = static_cast<long>(10 * l) - static_cast<long>(tenths * k);
            CHECK(diff10 <= 5);
            CHECK(diff10 > -5);
        }
    }
}
