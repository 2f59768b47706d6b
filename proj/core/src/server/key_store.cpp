#include "punchcard/server/key_store.hpp"

#include <system_error>

#include "punchcard/errors.hpp"
#include "punchcard/storage.hpp"

namespace punchcard::server {

namespace {

constexpr std::string_view kMagic = "PCKS";
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kFileBytes = 4 + 1 + 1 + 32 + 4;

Secret32 fresh_secret(Scheme scheme, Rng& rng) {
    Secret32 out{};
    if (scheme == Scheme::Main) {
        const auto s = random_nonzero<MainGroup::Scalar>(rng).to_bytes();
        std::copy(s.begin(), s.end(), out.begin());
    } else {
        const auto s = random_nonzero<MergeGroups::Scalar>(rng).to_bytes();
        std::copy(s.begin(), s.end(), out.begin());
    }
    return out;
}

void check_scalar(Scheme scheme, const Secret32& secret) {
    try {
        const bool zero = scheme == Scheme::Main ? MainGroup::Scalar::from_bytes(secret).is_zero()
                                                 : MergeGroups::Scalar::from_bytes(secret).is_zero();
        if (zero) throw KeyStoreError("key file holds a zero secret");
    } catch (const InvalidEncoding&) {
        throw KeyStoreError("key file holds a non-canonical secret");
    }
}

}  // namespace

Bytes encode_key_file(const KeyMaterial& key) {
    Bytes out;
    out.reserve(kFileBytes);
    append_to(out, as_bytes(kMagic));
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(key.scheme));
    append_to(out, key.secret);
    put_u32_le(out, crc32(out));
    return out;
}

KeyMaterial decode_key_file(ByteView bytes) {
    if (bytes.size() != kFileBytes) throw KeyStoreError("key file has wrong size");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw KeyStoreError("key file has bad magic");
    if (bytes[4] != kVersion) throw KeyStoreError("unsupported key file version " + std::to_string(bytes[4]));
    if (crc32(bytes.first(kFileBytes - 4)) != get_u32_le(bytes.data() + kFileBytes - 4))
        throw KeyStoreError("key file checksum mismatch");
    if (bytes[5] > 1) throw KeyStoreError("key file names an unknown scheme");
    KeyMaterial key;
    key.scheme = static_cast<Scheme>(bytes[5]);
    std::copy_n(bytes.begin() + 6, 32, key.secret.begin());
    check_scalar(key.scheme, key.secret);
    return key;
}

KeyMaterial load_or_create_key(const std::filesystem::path& path, Scheme scheme, Rng& rng, bool sync) {
    std::optional<Bytes> existing;
    try {
        existing = read_file(path);
    } catch (const StorageError& e) {
        throw KeyStoreError(e.what());
    }
    if (existing) {
        auto key = decode_key_file(*existing);
        if (key.scheme != scheme)
            throw KeyStoreError("key file is for the " + std::string(to_string(key.scheme)) +
                                " scheme, config asks for " + std::string(to_string(scheme)));
        return key;
    }
    KeyMaterial key{scheme, fresh_secret(scheme, rng)};
    try {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        write_file_atomic(path, encode_key_file(key), sync);
        std::filesystem::permissions(path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
    } catch (const std::exception& e) {
        throw KeyStoreError(std::string("cannot write key file: ") + e.what());
    }
    return key;
}

}  // namespace punchcard::server
