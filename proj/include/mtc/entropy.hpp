#pragma once

// Lossless layer for quantized coefficients.
//
// Signed integers are zigzag-mapped and written as little-endian base-128
// varints. The "raw" backend stores those bytes as-is; the "arithmetic"
// backend codes them with an adaptive order-0 byte model (counts start at 1,
// grow by 32, and are halved with a floor of 1 once the total reaches 2^16)
// driven by a 32-bit range coder with carry propagation.
//
// Payload layout (little-endian):
//   backend u8 | value count u64 | body | CRC-32 of everything before it (u32)

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mtc::entropy {

enum class Backend : std::uint8_t { raw = 0, arithmetic = 1 };

Backend parse_backend(std::string_view tag);
std::string_view backend_name(Backend backend);

constexpr std::uint64_t zigzag_encode(std::int64_t v) noexcept {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

constexpr std::int64_t zigzag_decode(std::uint64_t u) noexcept {
    return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

void append_varint(std::vector<std::uint8_t>& out, std::uint64_t value);
/// Reads one varint at `pos` and advances it; throws DecodeError on truncation or overlong input.
std::uint64_t read_varint(std::span<const std::uint8_t> in, std::size_t& pos);

/// Adaptive frequency table over 256 byte symbols with Fenwick-tree cumulative counts.
class ByteModel {
public:
    static constexpr std::uint32_t kIncrement = 32;
    static constexpr std::uint32_t kRescaleAt = 1u << 16;

    ByteModel();

    std::uint32_t total() const noexcept { return total_; }
    std::uint32_t frequency(std::uint8_t symbol) const noexcept { return freq_[symbol]; }
    /// Sum of frequencies of symbols below `symbol`.
    std::uint32_t cumulative(std::uint8_t symbol) const noexcept;
    /// Symbol whose cumulative interval contains `target` (< total()).
    std::uint8_t find(std::uint32_t target) const noexcept;
    void update(std::uint8_t symbol);

private:
    void rebuild();

    std::array<std::uint32_t, 256> freq_{};
    std::array<std::uint32_t, 257> tree_{};  // 1-based Fenwick tree
    std::uint32_t total_ = 0;
};

class RangeEncoder {
public:
    explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}
    void encode(std::uint32_t cumulative, std::uint32_t frequency, std::uint32_t total);
    void finish();

private:
    void shift_low();

    std::vector<std::uint8_t>& out_;
    std::uint64_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint8_t cache_ = 0;
    std::uint64_t cache_size_ = 1;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint8_t> in);
    /// Scaled target in [0, total) for the next symbol.
    std::uint32_t target(std::uint32_t total);
    void consume(std::uint32_t cumulative, std::uint32_t frequency);
    /// True when every input byte was consumed and none were read past the end.
    bool exhausted_exactly() const noexcept { return pos_ == in_.size() && overrun_ == 0; }

private:
    std::uint8_t next_byte();

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::size_t overrun_ = 0;
    std::uint32_t code_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint32_t scale_ = 1;
};

std::vector<std::uint8_t> encode(std::span<const std::int64_t> values, Backend backend);

/// Decodes a payload produced by encode(). Rejects streams declaring more than
/// `max_count` values; throws DecodeError on any corruption.
std::vector<std::int64_t> decode(std::span<const std::uint8_t> payload, std::uint64_t max_count = 1ULL << 28);

/// Backend tag of a payload without decoding it.
Backend peek_backend(std::span<const std::uint8_t> payload);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace mtc::entropy
