#pragma once

// Data-parallel inner loops used by the matrix layer and the codec.
//
// Every kernel has a portable scalar reference and optional SIMD variants.
// All variants are required to return bit-identical results: reductions use
// four interleaved partial sums combined as (s0 + s2) + (s1 + s3), followed by
// a sequential tail, and no fused multiply-add is used anywhere. This keeps
// encoded streams identical regardless of which path the CPU selects.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mtc::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// out[i] = round_half_away_from_zero(in[i] * scale)
    void (*scale_round)(const double* in, double scale, double* out, std::size_t n);
    /// sum_i |a[i+1] - a[i]| over a row of length n
    double (*abs_diff_sum)(const double* a, std::size_t n);
    /// sum_i sqrt(dx^2 + dy^2 + dz^2) where d = p - q per coordinate row
    double (*point_distance_sum)(const double* px, const double* py, const double* pz,
                                 const double* qx, const double* qy, const double* qz,
                                 std::size_t n);
};

/// Table for a specific ISA. Throws InvalidArgument when the ISA was not compiled in
/// or the running CPU does not support it.
const KernelTable& table(Isa isa);

/// Table currently used by the library. Chosen on first use from the CPU, or
/// from the MTC_ISA environment variable ("scalar" or "avx2") when set.
const KernelTable& active();

/// Forces the active table; used by tests and benchmarks.
void set_active(Isa isa);

/// ISAs that are both compiled in and supported by this CPU; scalar is always first.
std::vector<Isa> available();

std::string_view name(Isa isa);

}  // namespace mtc::kernels
