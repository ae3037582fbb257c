#include "mtc/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "mtc/error.hpp"
#include "mtc/kernels.hpp"

namespace mtc::analysis {
namespace {

void require_two_frames(const MocapSequence& seq, const char* op) {
    if (seq.frames() < 2) throw InvalidArgument(std::string(op) + " needs at least 2 frames");
}

}  // namespace

double mean_variation(const MocapSequence& seq) {
    require_two_frames(seq, "mean_variation");
    const auto& k = kernels::active();
    const Matrix& m = seq.data();
    double total = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) total += k.abs_diff_sum(m.row(r).data(), m.cols());
    return total / static_cast<double>(m.rows() * m.cols());
}

DeviationSummary stddev_summary(const MocapSequence& seq) {
    require_two_frames(seq, "stddev_sum");
    const Matrix& m = seq.data();
    const double f = static_cast<double>(m.cols());
    DeviationSummary out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= f;
        double ss = 0.0;
        for (double v : row) ss += (v - mean) * (v - mean);
        out.sum += std::sqrt(ss / f);
    }
    out.mean = out.sum / static_cast<double>(m.rows());
    return out;
}

double stddev_sum(const MocapSequence& seq) { return stddev_summary(seq).sum; }

SpectrumReport singular_spectrum(const Matrix& m, std::string subject) {
    if (m.empty()) throw InvalidArgument("singular_spectrum: empty matrix");
    const EigenMatrix e = to_eigen(m);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(e);
    const Eigen::VectorXd sv = svd.singularValues();

    SpectrumReport report;
    report.subject = std::move(subject);
    report.normalized_singular_values.assign(sv.data(), sv.data() + sv.size());
    report.largest = sv.size() > 0 ? sv(0) : 0.0;
    if (!(report.largest > 0.0)) {
        report.degenerate = true;
        std::fill(report.normalized_singular_values.begin(), report.normalized_singular_values.end(), 0.0);
        return report;
    }
    for (double& v : report.normalized_singular_values) v = std::clamp(v / report.largest, 0.0, 1.0);
    report.normalized_singular_values.front() = 1.0;
    return report;
}

Matrix unfold_clips(const MocapSequence& seq, std::size_t clip_count) {
    if (clip_count == 0) throw InvalidArgument("clip count J must be positive");
    if (clip_count > seq.frames()) {
        throw InvalidArgument("clip count J = " + std::to_string(clip_count) + " exceeds frame count " +
                              std::to_string(seq.frames()));
    }
    const Matrix& m = seq.data();
    const std::size_t len = seq.frames() / clip_count;
    Matrix out(clip_count, m.rows() * len);
    for (std::size_t j = 0; j < clip_count; ++j) {
        double* dst = out.row(j).data();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double* src = m.row(r).data() + j * len;
            std::copy_n(src, len, dst + r * len);
        }
    }
    return out;
}

SpectrumReport clip_correlation_spectrum(const MocapSequence& seq, std::size_t clip_count, std::string subject) {
    return singular_spectrum(unfold_clips(seq, clip_count), std::move(subject));
}

}  // namespace mtc::analysis
