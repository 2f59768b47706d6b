#include "punchcard/hash.hpp"

#include <stdexcept>

namespace punchcard {

void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

TaggedHash::TaggedHash(std::string_view tag) {
    ensure_sodium();
    if (tag.empty() || tag.size() > 255) throw std::invalid_argument("domain tag must be 1..255 bytes");
    crypto_hash_sha512_init(&state_);
    update(static_cast<std::uint8_t>(tag.size()));
    update(as_bytes(tag));
}

TaggedHash& TaggedHash::update(ByteView data) {
    crypto_hash_sha512_update(&state_, data.data(), data.size());
    return *this;
}

std::array<std::uint8_t, 64> TaggedHash::finalize() {
    std::array<std::uint8_t, 64> out{};
    crypto_hash_sha512_final(&state_, out.data());
    return out;
}

std::array<std::uint8_t, 64> tagged_hash(std::string_view tag, ByteView data) {
    return TaggedHash(tag).update(data).finalize();
}

std::array<std::uint8_t, 32> sha256(ByteView data) {
    ensure_sodium();
    std::array<std::uint8_t, 32> out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

}  // namespace punchcard
