#include "punchcard/bytes.hpp"

#include "punchcard/errors.hpp"

namespace punchcard {

std::string to_hex(ByteView bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw InvalidEncoding("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw InvalidEncoding("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

ByteView ByteReader::take(std::size_t n) {
    if (remaining() < n) throw InvalidEncoding("truncated input");
    auto v = data_.subspan(pos_, n);
    pos_ += n;
    return v;
}

void ByteReader::expect_done() const {
    if (!done()) throw InvalidEncoding("trailing bytes");
}

}  // namespace punchcard
