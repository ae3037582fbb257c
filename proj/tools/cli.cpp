#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mtc/analysis.hpp"
#include "mtc/codec.hpp"
#include "mtc/error.hpp"
#include "mtc/kernels.hpp"
#include "mtc/sequence.hpp"

namespace mtc::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double fps(std::size_t frames, double secs) { return secs > 0.0 ? static_cast<double>(frames) / secs : 0.0; }

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw InvalidArgument("not a non-negative integer: '" + std::string(s) + "'");
    }
    return v;
}

FileFormat resolve_format(const std::string& tag, const std::filesystem::path& path) {
    if (!tag.empty()) return parse_format(tag);
    return path.extension() == ".csv" ? FileFormat::csv : FileFormat::matrix_text;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return bytes;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Flags shared by compress and sweep.
struct EncodeFlags {
    std::string format;
    std::size_t clip_length = codec::kDefaultClipLength;
    std::string cuts_path;
    std::size_t bases = 1;
    std::uint64_t seed = 0;
    std::size_t restarts = 4;
    std::string backend = "arithmetic";
    std::optional<std::size_t> retained;
    std::optional<int> quant;
    std::optional<double> frame_rate;

    void add_to(CLI::App& app) {
        app.add_option("--format", format, "Input format: txt or csv (default from extension)");
        app.add_option("--L", clip_length, "Clip length for equal segmentation")->capture_default_str();
        app.add_option("--cuts", cuts_path, "File with one exclusive clip end frame per line");
        app.add_option("--K", bases, "Number of bases; K > 1 selects database mode")->capture_default_str();
        app.add_option("--seed", seed, "Seed for the database-mode initialization")->capture_default_str();
        app.add_option("--restarts", restarts, "Database-mode annealing runs, each starting 4x cooler")
            ->capture_default_str();
        app.add_option("--backend", backend, "Entropy backend: raw or arithmetic")->capture_default_str();
        app.add_option("--l", retained, "Override the retained DCT count per clip");
        app.add_option("--Q", quant, "Override the coefficient fractional bits");
        app.add_option("--fps", frame_rate, "Frame rate recorded in the stream");
    }

    codec::CodecParams params(std::size_t k) const {
        codec::CodecParams p;
        p.components = k;
        p.bases = bases;
        p.mode = bases > 1 ? codec::Mode::database : codec::Mode::single_basis;
        p.clip_length = clip_length;
        if (!cuts_path.empty()) p.cuts = load_cuts(cuts_path);
        p.retained = retained;
        p.fractional_bits = quant;
        p.backend = entropy::parse_backend(backend);
        p.seed = seed;
        p.anneal_restarts = restarts;
        return p;
    }

    MocapSequence load(const std::string& path) const {
        MocapSequence seq = load_sequence(path, resolve_format(format, path));
        if (frame_rate) {
            if (!(*frame_rate >= 0.0)) throw InvalidArgument("--fps must be non-negative");
            seq = MocapSequence(seq.markers(), seq.data(), *frame_rate);
        }
        return seq;
    }
};

int cmd_compress(const std::string& input, const std::string& output, const EncodeFlags& flags, std::size_t k,
                 bool verify, std::ostream& out, std::ostream& err) {
    const MocapSequence seq = flags.load(input);
    const auto params = flags.params(k);

    const auto t0 = Clock::now();
    const auto enc = codec::encode_sequence(seq, params);
    const double enc_secs = seconds_since(t0);
    write_bytes(output, enc.bytes);

    const auto& h = enc.stats.header;
    for (const auto& w : enc.stats.warnings) err << "warning: " << w << '\n';
    out << "clips: " << h.clips.size() << '\n';
    out << "frames_used: " << h.frames_used << '\n';
    out << "frames_dropped: " << enc.stats.frames_dropped << '\n';
    out << "mode: " << codec::mode_name(h.mode) << '\n';
    out << "k: " << h.components << '\n';
    out << "K: " << h.bases << '\n';
    out << "bytes: " << enc.bytes.size() << '\n';
    out << "ratio: " << fmt(codec::compression_ratio(seq, enc.bytes.size())) << '\n';
    out << "encode_seconds: " << fmt(enc_secs) << '\n';
    out << "encode_fps: " << fmt(fps(h.frames_used, enc_secs)) << '\n';
    if (params.mode == codec::Mode::database) {
        out << "anneal_iterations: " << enc.stats.anneal_iterations << '\n';
        out << "anneal_converged: " << (enc.stats.anneal_converged ? "yes" : "no") << '\n';
    }

    if (verify) {
        const auto written = read_bytes(output);
        if (written != enc.bytes) {
            err << "error: verification failed: file contents differ from the encoded stream\n";
            return 1;
        }
        const auto t1 = Clock::now();
        const MocapSequence decoded = codec::decode_sequence(written);
        const double dec_secs = seconds_since(t1);
        if (decoded.markers() != seq.markers() || decoded.frames() != h.frames_used) {
            err << "error: verification failed: decoded shape does not match\n";
            return 1;
        }
        out << "distortion: " << fmt(codec::distortion(seq, decoded)) << '\n';
        out << "decode_fps: " << fmt(fps(decoded.frames(), dec_secs)) << '\n';
    }
    return 0;
}

int cmd_decompress(const std::string& input, const std::string& output, const std::string& format,
                   std::ostream& out) {
    const auto bytes = read_bytes(input);
    const auto t0 = Clock::now();
    const MocapSequence seq = codec::decode_sequence(bytes);
    const double secs = seconds_since(t0);
    save_sequence(seq, output, resolve_format(format, output));
    out << "markers: " << seq.markers() << '\n';
    out << "frames: " << seq.frames() << '\n';
    out << "decode_fps: " << fmt(fps(seq.frames(), secs)) << '\n';
    return 0;
}

std::string spectrum_csv(const analysis::SpectrumReport& report) {
    std::string csv = "index,normalized_value\n";
    for (std::size_t i = 0; i < report.normalized_singular_values.size(); ++i) {
        csv += std::to_string(i + 1) + ',' + fmt(report.normalized_singular_values[i]) + '\n';
    }
    return csv;
}

int cmd_analyze(const std::string& input, const std::string& format, std::optional<std::size_t> clips,
                const std::string& csv_out, const std::string& clip_csv_out, std::ostream& out) {
    const MocapSequence seq = load_sequence(input, resolve_format(format, input));
    const auto dev = analysis::stddev_summary(seq);
    out << "markers: " << seq.markers() << '\n';
    out << "frames: " << seq.frames() << '\n';
    out << "mean_variation: " << fmt(analysis::mean_variation(seq)) << '\n';
    out << "stddev_sum: " << fmt(dev.sum) << '\n';
    out << "stddev_mean: " << fmt(dev.mean) << '\n';

    const auto spectrum = analysis::singular_spectrum(seq.data(), input);
    if (spectrum.degenerate) out << "spectrum: degenerate (all-zero input)\n";
    if (!csv_out.empty()) write_text(csv_out, spectrum_csv(spectrum));

    if (clips) {
        const auto clip_spectrum = analysis::clip_correlation_spectrum(seq, *clips, input);
        out << "clip_spectrum:";
        const std::size_t shown = std::min<std::size_t>(clip_spectrum.normalized_singular_values.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) out << ' ' << fmt(clip_spectrum.normalized_singular_values[i]);
        out << '\n';
        if (!clip_csv_out.empty()) write_text(clip_csv_out, spectrum_csv(clip_spectrum));
    } else if (!clip_csv_out.empty()) {
        throw InvalidArgument("--clip-out requires --J");
    }
    return 0;
}

int cmd_sweep(const std::string& input, const EncodeFlags& flags, const std::string& k_spec,
              const std::string& csv_out, bool no_timing, std::ostream& out, std::ostream& err) {
    const MocapSequence seq = flags.load(input);
    const auto ks = parse_k_list(k_spec);

    std::string csv = "k,l,Q,CR,distortion,encode_fps,decode_fps\n";
    for (std::size_t k : ks) {
        const auto params = flags.params(k);
        const auto t0 = Clock::now();
        const auto enc = codec::encode_sequence(seq, params);
        const double enc_secs = seconds_since(t0);
        const auto t1 = Clock::now();
        const MocapSequence decoded = codec::decode_sequence(enc.bytes);
        const double dec_secs = seconds_since(t1);
        for (const auto& w : enc.stats.warnings) err << "warning: k=" << k << ": " << w << '\n';

        const auto& clips = enc.stats.header.clips;
        double l_mean = 0.0;
        for (const auto& c : clips) l_mean += c.retained;
        l_mean /= static_cast<double>(clips.size());
        const int q = clips.front().quant;
        const std::size_t frames = enc.stats.header.frames_used;

        csv += std::to_string(k) + ',' + fmt(l_mean) + ',' + std::to_string(q) + ',' +
               fmt(codec::compression_ratio(seq, enc.bytes.size())) + ',' + fmt(codec::distortion(seq, decoded)) + ',' +
               (no_timing ? "0" : fmt(fps(frames, enc_secs))) + ',' +
               (no_timing ? "0" : fmt(fps(frames, dec_secs))) + '\n';
    }
    if (csv_out.empty()) {
        out << csv;
    } else {
        write_text(csv_out, csv);
        out << "rows: " << ks.size() << '\n';
    }
    return 0;
}

int cmd_info(const std::string& input, bool show_clips, std::ostream& out) {
    const auto bytes = read_bytes(input);
    const auto stream = codec::parse_stream(bytes);
    const auto& h = stream.header;
    out << "version: " << static_cast<int>(h.version) << '\n';
    out << "mode: " << codec::mode_name(h.mode) << '\n';
    out << "backend: " << entropy::backend_name(h.backend) << '\n';
    out << "markers: " << h.markers << '\n';
    out << "frames: " << h.frames << '\n';
    out << "frames_used: " << h.frames_used << '\n';
    out << "frame_rate: " << fmt(h.frame_rate) << '\n';
    out << "clips: " << h.clips.size() << '\n';
    out << "K: " << h.bases << '\n';
    out << "k: " << h.components << '\n';
    out << "bytes: " << bytes.size() << '\n';
    out << "payload_bytes: " << stream.payload_bytes << '\n';
    if (show_clips) {
        out << "clip,length,l,Q,basis\n";
        for (std::size_t i = 0; i < h.clips.size(); ++i) {
            const auto& c = h.clips[i];
            out << i << ',' << c.length << ',' << c.retained << ',' << static_cast<int>(c.quant) << ','
                << static_cast<int>(c.basis) << '\n';
        }
    }
    return 0;
}

}  // namespace

std::vector<std::size_t> parse_k_list(std::string_view text) {
    std::vector<std::size_t> ks;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, comma - pos);
        if (item.empty()) throw InvalidArgument("empty entry in k list");
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) {
            ks.push_back(parse_size(item));
        } else {
            const std::string_view rest = item.substr(colon + 1);
            const std::size_t colon2 = rest.find(':');
            const std::size_t first = parse_size(item.substr(0, colon));
            const std::size_t last = parse_size(rest.substr(0, colon2));
            const std::size_t step = colon2 == std::string_view::npos ? 1 : parse_size(rest.substr(colon2 + 1));
            if (step == 0) throw InvalidArgument("k range step must be positive");
            if (last < first) throw InvalidArgument("k range end precedes its start");
            for (std::size_t k = first; k <= last; k += step) ks.push_back(k);
        }
        pos = comma + 1;
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.empty()) throw InvalidArgument("k list is empty");
    return ks;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transform codec for motion-capture marker trajectories", "mtc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mtc 1 (kernels: " + std::string(kernels::active().name) + ")");

    std::string input, output, format, k_spec, csv_out, clip_csv_out;
    std::size_t k = 0;
    bool verify = false, no_timing = false, show_clips = false;
    std::optional<std::size_t> clip_count;

    EncodeFlags enc_flags;
    auto* compress = app.add_subcommand("compress", "Encode a sequence into a stream");
    compress->add_option("input", input, "Sequence file")->required();
    compress->add_option("output", output, "Stream file")->required();
    compress->add_option("--k", k, "Retained left-basis components")->required();
    compress->add_flag("--verify", verify, "Decode the written stream and report distortion");
    enc_flags.add_to(*compress);

    auto* decompress = app.add_subcommand("decompress", "Decode a stream into a sequence file");
    decompress->add_option("input", input, "Stream file")->required();
    decompress->add_option("output", output, "Sequence file")->required();
    decompress->add_option("--format", format, "Output format: txt or csv (default from extension)");

    auto* analyze = app.add_subcommand("analyze", "Variation, deviation and singular spectra of a sequence");
    analyze->add_option("input", input, "Sequence file")->required();
    analyze->add_option("--format", format, "Input format: txt or csv (default from extension)");
    analyze->add_option("--J", clip_count, "Clip count for the clip-correlation spectrum");
    analyze->add_option("--out", csv_out, "CSV for the singular spectrum of the whole matrix");
    analyze->add_option("--clip-out", clip_csv_out, "CSV for the clip-correlation spectrum");

    EncodeFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Encode and decode over a list of k values");
    sweep->add_option("input", input, "Sequence file")->required();
    sweep->add_option("--k", k_spec, "k values, e.g. 15:65:5 or 20,40,60")->required();
    sweep->add_option("--out", csv_out, "CSV output (stdout when omitted)");
    sweep->add_flag("--no-timing", no_timing, "Write 0 in the timing columns");
    sweep_flags.add_to(*sweep);

    auto* info = app.add_subcommand("info", "Print the header of a stream");
    info->add_option("input", input, "Stream file")->required();
    info->add_flag("--clips", show_clips, "Also print the per-clip table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (compress->parsed()) return cmd_compress(input, output, enc_flags, k, verify, out, err);
        if (decompress->parsed()) return cmd_decompress(input, output, format, out);
        if (analyze->parsed()) return cmd_analyze(input, format, clip_count, csv_out, clip_csv_out, out);
        if (sweep->parsed()) return cmd_sweep(input, sweep_flags, k_spec, csv_out, no_timing, out, err);
        if (info->parsed()) return cmd_info(input, show_clips, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace mtc::cli
