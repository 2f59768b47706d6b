#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace punchcard {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 32-byte client card secret `u` (and other fixed-width secrets).
using Secret32 = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline void append_to(Bytes& out, ByteView in) { out.insert(out.end(), in.begin(), in.end()); }

inline void put_u16_le(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32_le(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64_le(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint16_t get_u16_le(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t get_u64_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

/// Sequential reader over a byte buffer; throws InvalidEncoding on underrun.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    ByteView take(std::size_t n);
    template <std::size_t N>
    std::array<std::uint8_t, N> take_array() {
        std::array<std::uint8_t, N> out{};
        auto v = take(N);
        std::copy(v.begin(), v.end(), out.begin());
        return out;
    }
    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16_le() { return get_u16_le(take(2).data()); }
    std::uint32_t u32_le() { return get_u32_le(take(4).data()); }
    std::uint64_t u64_le() { return get_u64_le(take(8).data()); }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return remaining() == 0; }
    /// Throws InvalidEncoding if bytes are left over.
    void expect_done() const;

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace punchcard
