#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <vector>

#include "kashin/errors.hpp"

namespace kashin::detail {

// Little-endian byte encoding shared by operator parameter blobs and the
// container formats. Hosts are assumed little-endian or byte-swapping;
// std::endian guards the one place it matters.

static_assert(std::endian::native == std::endian::little,
              "serialization code assumes a little-endian host");

inline void append_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
}

template <typename T>
void append_pod(std::vector<std::uint8_t>& out, T v) {
    append_bytes(out, &v, sizeof(T));
}

inline void append_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { append_pod(out, v); }
inline void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) { append_pod(out, v); }
inline void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) { append_pod(out, v); }
inline void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) { append_pod(out, v); }
inline void append_f32(std::vector<std::uint8_t>& out, float v) { append_pod(out, v); }
inline void append_f64(std::vector<std::uint8_t>& out, double v) { append_pod(out, v); }

/// Sequential reader over a byte buffer; every read is bounds-checked and
/// reports truncation as a typed error.
class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    template <typename T>
    T read() {
        T v;
        if (pos_ + sizeof(T) > size_) throw TruncatedError("unexpected end of data");
        std::memcpy(&v, data_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::uint8_t u8() { return read<std::uint8_t>(); }
    std::uint16_t u16() { return read<std::uint16_t>(); }
    std::uint32_t u32() { return read<std::uint32_t>(); }
    std::uint64_t u64() { return read<std::uint64_t>(); }
    float f32() { return read<float>(); }
    double f64() { return read<double>(); }

    void raw(void* out, std::size_t n) {
        if (pos_ + n > size_) throw TruncatedError("unexpected end of data");
        std::memcpy(out, data_ + pos_, n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return size_ - pos_; }
    const std::uint8_t* cursor() const { return data_ + pos_; }
    void skip(std::size_t n) {
        if (pos_ + n > size_) throw TruncatedError("unexpected end of data");
        pos_ += n;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

} // namespace kashin::detail
