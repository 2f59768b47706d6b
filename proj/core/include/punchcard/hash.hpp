#pragma once

#include <array>
#include <string_view>

#include <sodium.h>

#include "punchcard/bytes.hpp"

namespace punchcard {

/// Domain tags used across the protocol.
namespace tags {
inline constexpr std::string_view kHashMain = "punchcard/h2g/v1/main";
inline constexpr std::string_view kHashMergeG0 = "punchcard/h2g/v1/merge-g0";
inline constexpr std::string_view kHashMergeG1 = "punchcard/h2g/v1/merge-g1";
inline constexpr std::string_view kDleq = "punchcard/dleq/v1";
inline constexpr std::string_view kDleqG0 = "punchcard/dleq/v1/g0";
inline constexpr std::string_view kDleqG1 = "punchcard/dleq/v1/g1";
inline constexpr std::string_view kRedemptionSecret = "punchcard/rs/v1";
inline constexpr std::string_view kTicketPrefix = "punchcard/ticket/v1/";
}  // namespace tags

/// SHA-512 over len(tag) || tag || inputs. The one-byte length prefix keeps
/// tags that are prefixes of one another in separate domains.
class TaggedHash {
public:
    explicit TaggedHash(std::string_view tag);

    TaggedHash& update(ByteView data);
    TaggedHash& update(std::uint8_t byte) { return update(ByteView(&byte, 1)); }
    std::array<std::uint8_t, 64> finalize();

private:
    crypto_hash_sha512_state state_{};
};

std::array<std::uint8_t, 64> tagged_hash(std::string_view tag, ByteView data);
std::array<std::uint8_t, 32> sha256(ByteView data);

/// Ensures libsodium is initialised; safe to call repeatedly from any thread.
void ensure_sodium();

}  // namespace punchcard
