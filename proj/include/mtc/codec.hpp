#pragma once

// End-to-end encoder and decoder.
//
// Container layout (little-endian):
//   magic "MTC1" | version u8 | flags u8 (bit0 database mode, bit1 arithmetic backend)
//   n u16 | f u32 | f_used u32 | frame_rate f32 | N u32 | K u16 | k u16
//   N x { L_i u32 | l_i u16 | Q_i u8 | basis_index u8 }
//   K x (3n x k) i16 basis entries, row-major
//   coefficient payload length u64 | entropy payload (see entropy.hpp)
//   CRC-32 of all preceding bytes (u32)

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtc/entropy.hpp"
#include "mtc/matrix.hpp"
#include "mtc/sequence.hpp"

namespace mtc::codec {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kDefaultClipLength = 280;
inline constexpr std::size_t kMaxBases = 256;

enum class Mode { single_basis, database };

struct CodecParams {
    Mode mode = Mode::single_basis;
    /// K; must be 1 in single-basis mode.
    std::size_t bases = 1;
    /// k, the number of retained left-basis components.
    std::size_t components = 0;
    /// Equal-length segmentation; ignored when `cuts` is non-empty.
    std::size_t clip_length = kDefaultClipLength;
    /// Exclusive clip end frames for explicit segmentation.
    std::vector<std::size_t> cuts;
    /// Overrides the derived l_i for every clip (still clamped to L_i).
    std::optional<std::size_t> retained;
    /// Overrides the derived Q_i for every clip.
    std::optional<int> fractional_bits;
    entropy::Backend backend = entropy::Backend::arithmetic;
    std::uint64_t seed = 0;
    double anneal_tolerance = 1e-6;
    std::size_t anneal_max_iterations = 100;
    std::optional<double> anneal_temperature;
    std::size_t anneal_restarts = 4;
};

struct ClipEntry {
    std::uint32_t length = 0;     // L_i
    std::uint16_t retained = 0;   // l_i
    std::uint8_t quant = 0;       // Q_i
    std::uint8_t basis = 0;       // index into the basis block
};

struct StreamHeader {
    std::uint8_t version = kVersion;
    Mode mode = Mode::single_basis;
    entropy::Backend backend = entropy::Backend::arithmetic;
    std::uint16_t markers = 0;
    std::uint32_t frames = 0;
    std::uint32_t frames_used = 0;
    float frame_rate = 0.0f;
    std::uint16_t bases = 0;
    std::uint16_t components = 0;
    std::vector<ClipEntry> clips;
};

struct EncodeStats {
    StreamHeader header;
    std::size_t frames_dropped = 0;
    /// sum_i ||M_i - B S_i D~^T||^2 before quantization.
    double truncation_error = 0.0;
    double total_energy = 0.0;
    std::size_t anneal_iterations = 0;
    bool anneal_converged = true;
    std::vector<std::string> warnings;
};

struct EncodeResult {
    std::vector<std::uint8_t> bytes;
    EncodeStats stats;
};

/// Per-clip plan the encoder will use for these parameters.
std::vector<ClipEntry> plan_clips(const MocapSequence& seq, const CodecParams& params);

EncodeResult encode_sequence(const MocapSequence& seq, const CodecParams& params);

struct DecodeLimits {
    /// Upper bound on 3n * f_used values in the reconstruction.
    std::uint64_t max_values = 1ULL << 28;
};

/// Fully parsed stream: dequantized bases and coefficients plus the header.
struct DecodedStream {
    StreamHeader header;
    std::vector<Matrix> bases;         // K matrices, 3n x k
    std::vector<Matrix> coefficients;  // N matrices, k x l_i
    std::size_t payload_bytes = 0;
};

DecodedStream parse_stream(std::span<const std::uint8_t> bytes, const DecodeLimits& limits = {});
MocapSequence reconstruct(const DecodedStream& stream);
MocapSequence decode_sequence(std::span<const std::uint8_t> bytes, const DecodeLimits& limits = {});

/// Original size at 4 bytes per value (3n * f * 4) over the stream size.
double compression_ratio(const MocapSequence& original, std::size_t stream_bytes);

/// Mean Euclidean marker error over n * f_used points, comparing the first
/// decoded.frames() frames of `original`.
double distortion(const MocapSequence& original, const MocapSequence& decoded);

std::string_view mode_name(Mode mode);

}  // namespace mtc::codec
