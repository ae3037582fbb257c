#include "mtc/entropy.hpp"

#include <algorithm>
#include <string>

#include <zlib.h>

#include "mtc/error.hpp"

namespace mtc::entropy {
namespace {

constexpr std::uint32_t kTopValue = 1u << 24;
constexpr std::size_t kHeaderSize = 1 + 8;
constexpr std::size_t kTrailerSize = 4;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | in[static_cast<std::size_t>(i)];
    return v;
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | in[static_cast<std::size_t>(i)];
    return v;
}

Backend checked_backend(std::uint8_t tag) {
    if (tag > static_cast<std::uint8_t>(Backend::arithmetic)) {
        throw DecodeError("unknown entropy backend tag " + std::to_string(tag));
    }
    return static_cast<Backend>(tag);
}

}  // namespace

Backend parse_backend(std::string_view tag) {
    if (tag == "raw") return Backend::raw;
    if (tag == "arithmetic" || tag == "arith") return Backend::arithmetic;
    throw InvalidArgument("unknown entropy backend '" + std::string(tag) + "' (expected raw or arithmetic)");
}

std::string_view backend_name(Backend backend) {
    return backend == Backend::raw ? "raw" : "arithmetic";
}

void append_varint(std::vector<std::uint8_t>& out, std::uint64_t value) {
    while (value >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(value | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

std::uint64_t read_varint(std::span<const std::uint8_t> in, std::size_t& pos) {
    std::uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
        if (pos >= in.size()) throw DecodeError("truncated varint");
        const std::uint8_t byte = in[pos++];
        if (shift == 63 && byte > 1) throw DecodeError("varint overflows 64 bits");
        value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0) return value;
    }
    throw DecodeError("varint longer than 10 bytes");
}

// ---------------------------------------------------------------------------
// ByteModel

ByteModel::ByteModel() {
    freq_.fill(1);
    rebuild();
}

void ByteModel::rebuild() {
    tree_.fill(0);
    total_ = 0;
    for (std::size_t i = 0; i < freq_.size(); ++i) {
        total_ += freq_[i];
        for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += freq_[i];
    }
}

std::uint32_t ByteModel::cumulative(std::uint8_t symbol) const noexcept {
    std::uint32_t sum = 0;
    for (std::size_t j = symbol; j > 0; j -= j & (~j + 1)) sum += tree_[j];
    return sum;
}

std::uint8_t ByteModel::find(std::uint32_t target) const noexcept {
    std::size_t pos = 0;
    for (std::size_t mask = 256; mask > 0; mask >>= 1) {
        const std::size_t next = pos + mask;
        if (next < tree_.size() && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    return static_cast<std::uint8_t>(std::min<std::size_t>(pos, 255));
}

void ByteModel::update(std::uint8_t symbol) {
    freq_[symbol] += kIncrement;
    total_ += kIncrement;
    for (std::size_t j = static_cast<std::size_t>(symbol) + 1; j < tree_.size(); j += j & (~j + 1)) {
        tree_[j] += kIncrement;
    }
    if (total_ >= kRescaleAt) {
        for (auto& f : freq_) f = std::max<std::uint32_t>(1, f / 2);
        rebuild();
    }
}

// ---------------------------------------------------------------------------
// Range coder

void RangeEncoder::encode(std::uint32_t cumulative, std::uint32_t frequency, std::uint32_t total) {
    const std::uint32_t r = range_ / total;
    low_ += static_cast<std::uint64_t>(r) * cumulative;
    range_ = r * frequency;
    while (range_ < kTopValue) {
        range_ <<= 8;
        shift_low();
    }
}

void RangeEncoder::shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
        const auto carry = static_cast<std::uint8_t>(low_ >> 32);
        std::uint8_t pending = cache_;
        do {
            out_.push_back(static_cast<std::uint8_t>(pending + carry));
            pending = 0xFF;
        } while (--cache_size_ != 0);
        cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::finish() {
    for (int i = 0; i < 5; ++i) shift_low();
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> in) : in_(in) {
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
    if (pos_ < in_.size()) return in_[pos_++];
    ++overrun_;
    return 0;
}

std::uint32_t RangeDecoder::target(std::uint32_t total) {
    scale_ = range_ / total;
    return std::min(code_ / scale_, total - 1);
}

void RangeDecoder::consume(std::uint32_t cumulative, std::uint32_t frequency) {
    code_ -= scale_ * cumulative;
    range_ = scale_ * frequency;
    while (range_ < kTopValue) {
        code_ = (code_ << 8) | next_byte();
        range_ <<= 8;
    }
}

// ---------------------------------------------------------------------------
// Payload

std::vector<std::uint8_t> encode(std::span<const std::int64_t> values, Backend backend) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(values.size() * 2);
    for (auto v : values) append_varint(bytes, zigzag_encode(v));

    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + bytes.size() + kTrailerSize);
    out.push_back(static_cast<std::uint8_t>(backend));
    put_u64(out, values.size());
    if (backend == Backend::raw) {
        out.insert(out.end(), bytes.begin(), bytes.end());
    } else {
        ByteModel model;
        RangeEncoder rc(out);
        for (auto b : bytes) {
            rc.encode(model.cumulative(b), model.frequency(b), model.total());
            model.update(b);
        }
        rc.finish();
    }
    put_u32(out, crc32(out));
    return out;
}

Backend peek_backend(std::span<const std::uint8_t> payload) {
    if (payload.empty()) throw DecodeError("empty entropy payload");
    return checked_backend(payload[0]);
}

std::vector<std::int64_t> decode(std::span<const std::uint8_t> payload, std::uint64_t max_count) {
    if (payload.size() < kHeaderSize + kTrailerSize) throw DecodeError("entropy payload truncated");
    const auto body_end = payload.size() - kTrailerSize;
    if (crc32(payload.first(body_end)) != get_u32(payload.subspan(body_end))) {
        throw DecodeError("entropy payload checksum mismatch");
    }
    const Backend backend = checked_backend(payload[0]);
    const std::uint64_t count = get_u64(payload.subspan(1, 8));
    if (count > max_count) {
        throw DecodeError("entropy payload declares " + std::to_string(count) + " values, limit is " +
                          std::to_string(max_count));
    }
    const auto body = payload.subspan(kHeaderSize, body_end - kHeaderSize);

    std::vector<std::int64_t> values;
    if (backend == Backend::raw) {
        if (count > body.size()) throw DecodeError("raw payload shorter than its value count");
        values.reserve(static_cast<std::size_t>(count));
        std::size_t pos = 0;
        for (std::uint64_t i = 0; i < count; ++i) values.push_back(zigzag_decode(read_varint(body, pos)));
        if (pos != body.size()) throw DecodeError("trailing bytes after raw payload");
        return values;
    }

    values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, body.size() * 64 + 16)));
    ByteModel model;
    RangeDecoder rc(body);
    auto next = [&]() {
        const std::uint8_t b = model.find(rc.target(model.total()));
        rc.consume(model.cumulative(b), model.frequency(b));
        model.update(b);
        return b;
    };
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t value = 0;
        int shift = 0;
        while (true) {
            if (shift > 63) throw DecodeError("varint longer than 10 bytes in arithmetic payload");
            const std::uint8_t byte = next();
            if (shift == 63 && byte > 1) throw DecodeError("varint overflows 64 bits in arithmetic payload");
            value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
            if ((byte & 0x80) == 0) break;
            shift += 7;
        }
        values.push_back(zigzag_decode(value));
    }
    if (!rc.exhausted_exactly()) throw DecodeError("arithmetic payload length does not match its content");
    return values;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
        crc = ::crc32(crc, bytes.data() + pos, chunk);
        pos += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace mtc::entropy
