#include "mtc/sequence.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mtc/error.hpp"

namespace mtc {
namespace {

// Splits on LF and strips a trailing CR from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, FileFormat format) {
    std::vector<std::string_view> fields;
    if (format == FileFormat::csv) {
        std::size_t pos = 0;
        while (true) {
            const std::size_t end = line.find(',', pos);
            std::string_view f = line.substr(pos, end == std::string_view::npos ? end : end - pos);
            const auto b = f.find_first_not_of(" \t");
            const auto e = f.find_last_not_of(" \t");
            fields.push_back(b == std::string_view::npos ? std::string_view{} : f.substr(b, e - b + 1));
            if (end == std::string_view::npos) break;
            pos = end + 1;
        }
    } else {
        std::size_t pos = 0;
        while (pos < line.size()) {
            pos = line.find_first_not_of(" \t", pos);
            if (pos == std::string_view::npos) break;
            std::size_t end = line.find_first_of(" \t", pos);
            if (end == std::string_view::npos) end = line.size();
            fields.push_back(line.substr(pos, end - pos));
            pos = end;
        }
    }
    return fields;
}

double parse_real(std::string_view cell, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
        throw ParseError(line_no, "non-numeric cell '" + std::string(cell) + "'");
    }
    if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value '" + std::string(cell) + "'");
    return v;
}

long long parse_count(std::string_view cell, std::size_t line_no, const char* what) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
        throw ParseError(line_no, std::string("malformed header: ") + what + " '" + std::string(cell) + "'");
    }
    return v;
}

void append_real(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

MocapSequence::MocapSequence(std::size_t markers, Matrix data, double frame_rate)
    : markers_(markers), data_(std::move(data)), frame_rate_(frame_rate) {
    if (markers_ == 0) throw InvalidArgument("sequence needs at least one marker");
    if (data_.rows() != 3 * markers_) {
        throw ShapeError("sequence data has " + std::to_string(data_.rows()) + " rows, expected 3n = " +
                         std::to_string(3 * markers_));
    }
    if (data_.cols() == 0) throw InvalidArgument("sequence needs at least one frame");
    if (!(frame_rate_ >= 0.0) || !std::isfinite(frame_rate_)) throw InvalidArgument("frame rate must be >= 0");
}

std::vector<std::size_t> Segmentation::lengths() const {
    std::vector<std::size_t> out;
    out.reserve(cuts.size());
    std::size_t prev = 0;
    for (std::size_t c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    return out;
}

FileFormat parse_format(std::string_view tag) {
    if (tag == "txt" || tag == "matrix-text" || tag == "text") return FileFormat::matrix_text;
    if (tag == "csv") return FileFormat::csv;
    throw InvalidArgument("unsupported format '" + std::string(tag) + "' (expected txt or csv)");
}

std::string_view format_name(FileFormat format) {
    return format == FileFormat::csv ? "csv" : "txt";
}

MocapSequence parse_sequence(std::string_view text, FileFormat format) {
    const auto lines = split_lines(text);
    std::size_t first_data_line = 0;
    long long rows = 0;
    long long frames = -1;

    if (format == FileFormat::matrix_text) {
        if (lines.empty()) throw ParseError(1, "malformed header: file is empty");
        const auto header = split_fields(lines[0], format);
        if (header.size() != 2) throw ParseError(1, "malformed header: expected '<3n> <f>'");
        rows = parse_count(header[0], 1, "row count");
        frames = parse_count(header[1], 1, "frame count");
        if (rows <= 0) throw ParseError(1, "row count must be positive");
        if (frames <= 0) throw ParseError(1, "frame count must be positive");
        if (rows % 3 != 0) throw ParseError(1, "row count " + std::to_string(rows) + " is not a multiple of 3");
        const auto data_lines = static_cast<long long>(lines.size()) - 1;
        if (data_lines != rows) {
            throw ParseError(lines.size(), "header/row mismatch: header declares " + std::to_string(rows) +
                                               " rows, found " + std::to_string(data_lines));
        }
        first_data_line = 1;
    } else {
        rows = static_cast<long long>(lines.size());
        if (rows == 0) throw ParseError(1, "csv file is empty");
        if (rows % 3 != 0) {
            throw ParseError(lines.size(), "row count " + std::to_string(rows) + " is not a multiple of 3");
        }
    }

    std::vector<double> values;
    for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) {
        const std::size_t line_no = first_data_line + r + 1;
        const auto fields = split_fields(lines[first_data_line + r], format);
        if (frames < 0) {
            frames = static_cast<long long>(fields.size());
            if (frames == 0) throw ParseError(line_no, "frame count must be positive");
            values.reserve(static_cast<std::size_t>(rows * frames));
        }
        if (static_cast<long long>(fields.size()) != frames) {
            throw ParseError(line_no, "expected " + std::to_string(frames) + " values, found " +
                                          std::to_string(fields.size()));
        }
        for (auto cell : fields) values.push_back(parse_real(cell, line_no));
    }
    const auto n_rows = static_cast<std::size_t>(rows);
    return MocapSequence(n_rows / 3, Matrix(n_rows, static_cast<std::size_t>(frames), std::move(values)));
}

std::string format_sequence(const MocapSequence& seq, FileFormat format) {
    const Matrix& m = seq.data();
    std::string out;
    out.reserve(m.size() * 12);
    if (format == FileFormat::matrix_text) {
        out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    }
    const char sep = format == FileFormat::csv ? ',' : ' ';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c != 0) out.push_back(sep);
            append_real(out, m(r, c));
        }
        out.push_back('\n');
    }
    return out;
}

MocapSequence load_sequence(const std::filesystem::path& path, FileFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sequence(buf.str(), format);
}

void save_sequence(const MocapSequence& seq, const std::filesystem::path& path, FileFormat format) {
    const std::string text = format_sequence(seq, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<Clip> extract_clips(const MocapSequence& seq, const Segmentation& seg) {
    std::vector<Clip> clips;
    clips.reserve(seg.cuts.size());
    std::size_t start = 0;
    for (std::size_t end : seg.cuts) {
        clips.push_back(Clip{start, seq.data().columns(start, end - start)});
        start = end;
    }
    return clips;
}

SegmentedSequence segment_equal(const MocapSequence& seq, std::size_t clip_length) {
    const std::size_t f = seq.frames();
    if (clip_length == 0) throw InvalidArgument("clip length must be positive");
    if (clip_length > f) {
        throw InvalidArgument("clip length " + std::to_string(clip_length) + " exceeds frame count " +
                              std::to_string(f));
    }
    Segmentation seg;
    const std::size_t count = f / clip_length;
    for (std::size_t i = 1; i <= count; ++i) seg.cuts.push_back(i * clip_length);
    seg.frames_used = count * clip_length;
    seg.frames_dropped = f - seg.frames_used;
    auto clips = extract_clips(seq, seg);
    return {std::move(seg), std::move(clips)};
}

SegmentedSequence segment_by_cuts(const MocapSequence& seq, std::span<const std::size_t> cuts) {
    if (cuts.empty()) throw InvalidArgument("at least one cut is required");
    std::size_t prev = 0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] <= prev) {
            throw InvalidArgument("cuts must be strictly increasing and positive (cut #" + std::to_string(i) +
                                  " = " + std::to_string(cuts[i]) + ")");
        }
        if (cuts[i] > seq.frames()) {
            throw InvalidArgument("cut " + std::to_string(cuts[i]) + " exceeds frame count " +
                                  std::to_string(seq.frames()));
        }
        prev = cuts[i];
    }
    Segmentation seg;
    seg.cuts.assign(cuts.begin(), cuts.end());
    seg.frames_used = cuts.back();
    seg.frames_dropped = seq.frames() - seg.frames_used;
    auto clips = extract_clips(seq, seg);
    return {std::move(seg), std::move(clips)};
}

std::vector<std::size_t> load_cuts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cuts file '" + path.string() + "'");
    std::vector<std::size_t> cuts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t");
        const std::string_view cell(line.data() + b, e - b + 1);
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            throw ParseError(line_no, "invalid frame index '" + std::string(cell) + "'");
        }
        cuts.push_back(v);
    }
    return cuts;
}

}  // namespace mtc
