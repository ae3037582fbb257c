#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mtc/matrix.hpp"
#include "mtc/sequence.hpp"

namespace mtc::analysis {

/// Normalized singular values (divided by the largest), non-increasing.
struct SpectrumReport {
    std::vector<double> normalized_singular_values;
    /// Largest singular value before normalization.
    double largest = 0.0;
    std::string subject;
    /// Set for an all-zero input; the values are then all zero.
    bool degenerate = false;
};

/// Per-row standard deviations summed over the 3n rows, and their mean.
/// Rows use the population estimator (divide by f).
struct DeviationSummary {
    double sum = 0.0;
    double mean = 0.0;
};

/// Mean absolute frame-to-frame difference: ||grad M^T||_1 / (3nf).
double mean_variation(const MocapSequence& seq);

DeviationSummary stddev_summary(const MocapSequence& seq);

/// Sum of per-row population standard deviations.
double stddev_sum(const MocapSequence& seq);

SpectrumReport singular_spectrum(const Matrix& m, std::string subject = {});

/// Spectrum of the J x (3n f_used / J) matrix whose row j is clip j
/// flattened row-major; f_used = J * floor(f / J).
SpectrumReport clip_correlation_spectrum(const MocapSequence& seq, std::size_t clip_count,
                                         std::string subject = {});

/// Explicit unfolded matrix used by clip_correlation_spectrum.
Matrix unfold_clips(const MocapSequence& seq, std::size_t clip_count);

}  // namespace mtc::analysis
