#include "mtc/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "mtc/annealing.hpp"
#include "mtc/error.hpp"
#include "mtc/kernels.hpp"
#include "mtc/params.hpp"
#include "mtc/quantize.hpp"
#include "mtc/transform.hpp"

namespace mtc::codec {
namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'T', 'C', '1'};
constexpr std::uint8_t kFlagDatabase = 0x01;
constexpr std::uint8_t kFlagArithmetic = 0x02;
constexpr std::size_t kFixedHeaderBytes = 4 + 1 + 1 + 2 + 4 + 4 + 4 + 4 + 2 + 2;
constexpr std::size_t kClipEntryBytes = 4 + 2 + 1 + 1;

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    template <typename T>
    void put(T v) {
        static_assert(std::is_integral_v<T>);
        using U = std::make_unsigned_t<T>;
        const auto u = static_cast<U>(v);
        for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
    void put_f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
    void put_bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    template <typename T>
    T get() {
        static_assert(std::is_integral_v<T>);
        require(sizeof(T));
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            u |= static_cast<std::make_unsigned_t<T>>(static_cast<std::make_unsigned_t<T>>(in_[pos_ + i]) << (8 * i));
        }
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }
    float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
    std::span<const std::uint8_t> take(std::size_t n) {
        require(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }
    void require(std::size_t n) const {
        if (n > remaining()) throw DecodeError("stream truncated");
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

using DctKey = std::pair<std::size_t, std::size_t>;

const transform::TruncatedDct& cached_dct(std::map<DctKey, transform::TruncatedDct>& cache, std::size_t length,
                                          std::size_t retained) {
    auto it = cache.find({length, retained});
    if (it == cache.end()) it = cache.emplace(DctKey{length, retained}, transform::truncated_dct(length, retained)).first;
    return it->second;
}

std::vector<std::size_t> segment_lengths(const MocapSequence& seq, const CodecParams& params,
                                         std::size_t& frames_used) {
    Segmentation seg;
    if (!params.cuts.empty()) {
        // Validation mirrors segment_by_cuts without copying clip data.
        std::size_t prev = 0;
        for (std::size_t c : params.cuts) {
            if (c <= prev) throw InvalidArgument("cuts must be strictly increasing and positive");
            if (c > seq.frames()) throw InvalidArgument("cut " + std::to_string(c) + " exceeds frame count");
            prev = c;
        }
        seg.cuts = params.cuts;
    } else {
        if (params.clip_length == 0) throw InvalidArgument("clip length must be positive");
        if (params.clip_length > seq.frames()) {
            throw InvalidArgument("clip length " + std::to_string(params.clip_length) + " exceeds frame count " +
                                  std::to_string(seq.frames()));
        }
        for (std::size_t end = params.clip_length; end <= seq.frames(); end += params.clip_length) seg.cuts.push_back(end);
    }
    frames_used = seg.cuts.back();
    return seg.lengths();
}

void validate_params(const MocapSequence& seq, const CodecParams& params) {
    const std::size_t rows = seq.coordinate_rows();
    if (seq.markers() > std::numeric_limits<std::uint16_t>::max()) throw InvalidArgument("too many markers for the stream format");
    if (seq.frames() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("too many frames for the stream format");
    if (params.components == 0 || params.components > rows) {
        throw InvalidArgument("k = " + std::to_string(params.components) + " must lie in [1, 3n = " +
                              std::to_string(rows) + "]");
    }
    if (params.bases == 0 || params.bases > kMaxBases) {
        throw InvalidArgument("K = " + std::to_string(params.bases) + " must lie in [1, " + std::to_string(kMaxBases) + "]");
    }
    if (params.mode == Mode::single_basis && params.bases != 1) {
        throw InvalidArgument("single-basis mode requires K = 1");
    }
    if (params.retained && *params.retained == 0) throw InvalidArgument("l must be positive");
    if (params.fractional_bits &&
        (*params.fractional_bits < 0 || *params.fractional_bits > quantize::kMaxFractionalBits)) {
        throw InvalidArgument("Q must lie in [0, " + std::to_string(quantize::kMaxFractionalBits) + "]");
    }
}

}  // namespace

std::string_view mode_name(Mode mode) { return mode == Mode::database ? "database" : "single-basis"; }

std::vector<ClipEntry> plan_clips(const MocapSequence& seq, const CodecParams& params) {
    validate_params(seq, params);
    std::size_t frames_used = 0;
    const auto lengths = segment_lengths(seq, params, frames_used);
    if (lengths.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("too many clips");
    if (params.bases > lengths.size()) {
        throw InvalidArgument("more bases (K = " + std::to_string(params.bases) + ") than clips (N = " +
                              std::to_string(lengths.size()) + ")");
    }
    const int quant = params.fractional_bits.value_or(params::auto_quant(params.components));
    if (quant > quantize::kMaxFractionalBits) throw InvalidArgument("derived Q exceeds the stream limit");

    std::vector<ClipEntry> plan;
    plan.reserve(lengths.size());
    for (std::size_t length : lengths) {
        const std::size_t l = params.retained ? std::min(*params.retained, length)
                                              : params::derive_l(params.components, length);
        if (l > std::numeric_limits<std::uint16_t>::max()) {
            throw InvalidArgument("l = " + std::to_string(l) + " exceeds the stream limit of 65535");
        }
        plan.push_back(ClipEntry{static_cast<std::uint32_t>(length), static_cast<std::uint16_t>(l),
                                 static_cast<std::uint8_t>(quant), 0});
    }
    return plan;
}

EncodeResult encode_sequence(const MocapSequence& seq, const CodecParams& params) {
    std::vector<ClipEntry> plan = plan_clips(seq, params);
    const std::size_t rows = seq.coordinate_rows();
    const std::size_t k = params.components;

    std::map<DctKey, transform::TruncatedDct> dct_cache;
    std::vector<const transform::TruncatedDct*> dcts;
    std::vector<Matrix> projected;
    std::vector<double> energies;
    dcts.reserve(plan.size());
    projected.reserve(plan.size());
    energies.reserve(plan.size());
    std::size_t start = 0;
    for (const auto& entry : plan) {
        const auto& dct = cached_dct(dct_cache, entry.length, entry.retained);
        dcts.push_back(&dct);
        const Clip clip{start, seq.data().columns(start, entry.length)};
        projected.push_back(transform::right_transform(clip, dct));
        energies.push_back(frobenius_sq(clip.data));
        start += entry.length;
    }

    EncodeResult result;
    EncodeStats& stats = result.stats;
    stats.frames_dropped = seq.frames() - start;
    stats.total_energy = std::accumulate(energies.begin(), energies.end(), 0.0);

    std::vector<Matrix> bases;
    if (params.mode == Mode::single_basis) {
        const std::vector<double> ones(projected.size(), 1.0);
        bases.push_back(transform::top_eigenvectors(transform::accumulate_projected(projected, ones), k).matrix);
    } else {
        annealing::AnnealOptions opts;
        opts.bases = params.bases;
        opts.components = k;
        opts.initial_temperature = params.anneal_temperature;
        opts.tolerance = params.anneal_tolerance;
        opts.max_iterations = params.anneal_max_iterations;
        opts.seed = params.seed;
        opts.restarts = params.anneal_restarts;
        annealing::AnnealResult ar;
        try {
            ar = annealing::anneal_projected(projected, energies, opts);
        } catch (const annealing::ConvergenceError& e) {
            ar = e.last_state();
            stats.warnings.emplace_back(e.what());
        }
        stats.anneal_iterations = ar.iterations;
        stats.anneal_converged = ar.converged;
        for (auto& b : ar.bases) bases.push_back(std::move(b.matrix));
        for (std::size_t i = 0; i < plan.size(); ++i) plan[i].basis = static_cast<std::uint8_t>(ar.hard_assignment[i]);
    }

    std::vector<std::int64_t> symbols;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const Matrix s = multiply_at_b(bases[plan[i].basis], projected[i]);
        stats.truncation_error += std::max(0.0, energies[i] - frobenius_sq(s));
        const auto q = quantize::quantize_coeffs(s, plan[i].quant);
        symbols.insert(symbols.end(), q.values.begin(), q.values.end());
    }
    const auto payload = entropy::encode(symbols, params.backend);

    StreamHeader& h = stats.header;
    h.mode = params.mode;
    h.backend = params.backend;
    h.markers = static_cast<std::uint16_t>(seq.markers());
    h.frames = static_cast<std::uint32_t>(seq.frames());
    h.frames_used = static_cast<std::uint32_t>(start);
    h.frame_rate = static_cast<float>(seq.frame_rate());
    h.bases = static_cast<std::uint16_t>(bases.size());
    h.components = static_cast<std::uint16_t>(k);
    h.clips = plan;

    auto& out = result.bytes;
    out.reserve(kFixedHeaderBytes + plan.size() * kClipEntryBytes + bases.size() * rows * k * 2 + payload.size() + 12);
    ByteWriter w(out);
    w.put_bytes(kMagic);
    w.put(h.version);
    std::uint8_t flags = 0;
    if (h.mode == Mode::database) flags |= kFlagDatabase;
    if (h.backend == entropy::Backend::arithmetic) flags |= kFlagArithmetic;
    w.put(flags);
    w.put(h.markers);
    w.put(h.frames);
    w.put(h.frames_used);
    w.put_f32(h.frame_rate);
    w.put(static_cast<std::uint32_t>(plan.size()));
    w.put(h.bases);
    w.put(h.components);
    for (const auto& e : plan) {
        w.put(e.length);
        w.put(e.retained);
        w.put(e.quant);
        w.put(e.basis);
    }
    for (const auto& b : bases) {
        const auto q = quantize::quantize_basis(b);
        for (auto v : q.values) w.put(v);
    }
    w.put(static_cast<std::uint64_t>(payload.size()));
    w.put_bytes(payload);
    w.put(entropy::crc32(out));
    return result;
}

DecodedStream parse_stream(std::span<const std::uint8_t> bytes, const DecodeLimits& limits) {
    if (bytes.size() < kFixedHeaderBytes + 8 + 4) throw DecodeError("stream truncated: too short for a header");
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw DecodeError("bad magic: not an MTC1 stream");
    const std::size_t body = bytes.size() - 4;
    std::uint32_t stored_crc = 0;
    for (int i = 3; i >= 0; --i) stored_crc = (stored_crc << 8) | bytes[body + static_cast<std::size_t>(i)];
    if (entropy::crc32(bytes.first(body)) != stored_crc) {
        throw DecodeError("checksum mismatch: stream is corrupt or truncated");
    }

    ByteReader r(bytes.first(body));
    r.take(4);
    DecodedStream out;
    StreamHeader& h = out.header;
    h.version = r.get<std::uint8_t>();
    if (h.version != kVersion) throw DecodeError("unsupported stream version " + std::to_string(h.version));
    const auto flags = r.get<std::uint8_t>();
    if ((flags & ~(kFlagDatabase | kFlagArithmetic)) != 0) throw DecodeError("unknown flag bits set");
    h.mode = (flags & kFlagDatabase) ? Mode::database : Mode::single_basis;
    h.backend = (flags & kFlagArithmetic) ? entropy::Backend::arithmetic : entropy::Backend::raw;
    h.markers = r.get<std::uint16_t>();
    h.frames = r.get<std::uint32_t>();
    h.frames_used = r.get<std::uint32_t>();
    h.frame_rate = r.get_f32();
    const auto clip_count = r.get<std::uint32_t>();
    h.bases = r.get<std::uint16_t>();
    h.components = r.get<std::uint16_t>();

    const std::uint64_t rows = 3ULL * h.markers;
    if (h.markers == 0) throw DecodeError("marker count is zero");
    if (h.frames == 0 || h.frames_used == 0 || h.frames_used > h.frames) throw DecodeError("invalid frame counts");
    if (clip_count == 0) throw DecodeError("clip count is zero");
    if (h.bases == 0 || h.bases > kMaxBases) throw DecodeError("invalid basis count");
    if (h.mode == Mode::single_basis && h.bases != 1) throw DecodeError("single-basis stream declares K != 1");
    if (h.components == 0 || h.components > rows) throw DecodeError("invalid component count k");
    if (!std::isfinite(h.frame_rate) || h.frame_rate < 0.0f) throw DecodeError("invalid frame rate");
    if (rows * h.frames_used > limits.max_values) throw DecodeError("stream exceeds decode size limit");

    r.require(static_cast<std::size_t>(clip_count) * kClipEntryBytes);
    h.clips.resize(clip_count);
    std::uint64_t frame_sum = 0;
    std::uint64_t coeff_count = 0;
    for (auto& e : h.clips) {
        e.length = r.get<std::uint32_t>();
        e.retained = r.get<std::uint16_t>();
        e.quant = r.get<std::uint8_t>();
        e.basis = r.get<std::uint8_t>();
        if (e.length == 0 || e.retained == 0 || e.retained > e.length) throw DecodeError("invalid clip dimensions");
        if (e.quant > quantize::kMaxFractionalBits) throw DecodeError("invalid quantization parameter");
        if (e.basis >= h.bases) throw DecodeError("clip references a missing basis");
        frame_sum += e.length;
        coeff_count += static_cast<std::uint64_t>(h.components) * e.retained;
    }
    if (frame_sum != h.frames_used) throw DecodeError("clip lengths do not sum to the frame count");

    const std::uint64_t basis_values = rows * h.components;
    r.require(static_cast<std::size_t>(h.bases * basis_values * 2));
    out.bases.reserve(h.bases);
    for (std::size_t j = 0; j < h.bases; ++j) {
        quantize::QuantizedBasis q{static_cast<std::size_t>(rows), h.components,
                                   std::vector<std::int16_t>(static_cast<std::size_t>(basis_values))};
        for (auto& v : q.values) {
            v = r.get<std::int16_t>();
            if (v == std::numeric_limits<std::int16_t>::min()) throw DecodeError("basis entry out of range");
        }
        out.bases.push_back(quantize::dequantize_basis(q));
    }

    const auto payload_len = r.get<std::uint64_t>();
    if (payload_len != r.remaining()) throw DecodeError("coefficient payload length does not match the stream");
    const auto payload = r.take(static_cast<std::size_t>(payload_len));
    out.payload_bytes = payload.size();
    if (entropy::peek_backend(payload) != h.backend) throw DecodeError("payload backend does not match header flags");
    const auto symbols = entropy::decode(payload, coeff_count);
    if (symbols.size() != coeff_count) throw DecodeError("coefficient count does not match clip table");

    out.coefficients.reserve(clip_count);
    std::size_t pos = 0;
    for (const auto& e : h.clips) {
        quantize::QuantizedCoeffs q{h.components, e.retained, e.quant, {}};
        const std::size_t n = q.rows * q.cols;
        q.values.assign(symbols.begin() + static_cast<std::ptrdiff_t>(pos),
                        symbols.begin() + static_cast<std::ptrdiff_t>(pos + n));
        pos += n;
        out.coefficients.push_back(quantize::dequantize_coeffs(q));
    }
    return out;
}

MocapSequence reconstruct(const DecodedStream& stream) {
    const auto& h = stream.header;
    const std::size_t rows = 3 * static_cast<std::size_t>(h.markers);
    Matrix data(rows, h.frames_used);
    std::map<DctKey, transform::TruncatedDct> cache;
    std::size_t start = 0;
    for (std::size_t i = 0; i < h.clips.size(); ++i) {
        const auto& e = h.clips[i];
        const auto& dct = cached_dct(cache, e.length, e.retained);
        const Matrix clip = transform::reconstruct_clip(stream.bases[e.basis], stream.coefficients[i], dct);
        for (std::size_t r = 0; r < rows; ++r) std::copy_n(clip.row(r).data(), e.length, data.row(r).data() + start);
        start += e.length;
    }
    return MocapSequence(h.markers, std::move(data), static_cast<double>(h.frame_rate));
}

MocapSequence decode_sequence(std::span<const std::uint8_t> bytes, const DecodeLimits& limits) {
    return reconstruct(parse_stream(bytes, limits));
}

double compression_ratio(const MocapSequence& original, std::size_t stream_bytes) {
    if (stream_bytes == 0) throw InvalidArgument("stream size must be positive");
    const double original_bytes = static_cast<double>(original.coordinate_rows()) *
                                  static_cast<double>(original.frames()) * 4.0;
    return original_bytes / static_cast<double>(stream_bytes);
}

double distortion(const MocapSequence& original, const MocapSequence& decoded) {
    if (original.markers() != decoded.markers()) throw ShapeError("distortion: marker counts differ");
    if (decoded.frames() > original.frames()) throw ShapeError("distortion: decoded sequence is longer than the original");
    const std::size_t n = original.markers();
    const std::size_t f = decoded.frames();
    const auto& k = kernels::active();
    const Matrix& p = original.data();
    const Matrix& q = decoded.data();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += k.point_distance_sum(p.row(i).data(), p.row(n + i).data(), p.row(2 * n + i).data(), q.row(i).data(),
                                      q.row(n + i).data(), q.row(2 * n + i).data(), f);
    }
    return total / static_cast<double>(n * f);
}

}  // namespace mtc::codec
