#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "mtc/matrix.hpp"

namespace mtc {

/// Marker trajectories as a 3n x f matrix in centimeters. Row i holds x of
/// marker i, row n+i holds y and row 2n+i holds z; columns are frames.
class MocapSequence {
public:
    MocapSequence(std::size_t markers, Matrix data, double frame_rate = 0.0);

    std::size_t markers() const noexcept { return markers_; }
    std::size_t frames() const noexcept { return data_.cols(); }
    std::size_t coordinate_rows() const noexcept { return data_.rows(); }
    /// 0 when the source did not carry a frame rate.
    double frame_rate() const noexcept { return frame_rate_; }
    const Matrix& data() const noexcept { return data_; }

    friend bool operator==(const MocapSequence&, const MocapSequence&) = default;

private:
    std::size_t markers_;
    Matrix data_;
    double frame_rate_;
};

/// Contiguous column slice [start_frame, start_frame + length) of a sequence.
struct Clip {
    std::size_t start_frame = 0;
    Matrix data;

    std::size_t length() const noexcept { return data.cols(); }
};

/// Partition of [0, frames_used) into consecutive clips; `cuts` holds the
/// exclusive end frame of each clip, so cuts.back() == frames_used.
struct Segmentation {
    std::vector<std::size_t> cuts;
    std::size_t frames_used = 0;
    /// Trailing frames that were discarded.
    std::size_t frames_dropped = 0;

    std::size_t clip_count() const noexcept { return cuts.size(); }
    std::vector<std::size_t> lengths() const;
};

struct SegmentedSequence {
    Segmentation segmentation;
    std::vector<Clip> clips;
};

enum class FileFormat { matrix_text, csv };

FileFormat parse_format(std::string_view tag);
std::string_view format_name(FileFormat format);

MocapSequence load_sequence(const std::filesystem::path& path, FileFormat format);
void save_sequence(const MocapSequence& seq, const std::filesystem::path& path, FileFormat format);

MocapSequence parse_sequence(std::string_view text, FileFormat format);
std::string format_sequence(const MocapSequence& seq, FileFormat format);

/// floor(f / L) clips of length L; the trailing f mod L frames are dropped.
SegmentedSequence segment_equal(const MocapSequence& seq, std::size_t clip_length);

/// Clips ending at each cut; cuts must be strictly increasing and lie in (0, f].
SegmentedSequence segment_by_cuts(const MocapSequence& seq, std::span<const std::size_t> cuts);

/// Reads one frame index per line; blank lines and lines starting with '#' are skipped.
std::vector<std::size_t> load_cuts(const std::filesystem::path& path);

/// Clips for an already-validated segmentation.
std::vector<Clip> extract_clips(const MocapSequence& seq, const Segmentation& seg);

}  // namespace mtc
