#pragma once

#include <filesystem>

#include "punchcard/bytes.hpp"
#include "punchcard/rng.hpp"
#include "punchcard/scheme.hpp"

namespace punchcard::server {

/// Key file: "PCKS" || version (1) || scheme (1) || sk (32, scalar encoding) || crc32 (u32 LE).
/// Only the secret exponent is stored; public keys are recomputed on load.
struct KeyMaterial {
    Scheme scheme = Scheme::Main;
    Secret32 secret{};
};

/// Loads the key file, or creates one with a fresh secret if it does not exist.
/// Throws KeyStoreError for unreadable, corrupt or wrong-scheme files.
KeyMaterial load_or_create_key(const std::filesystem::path& path, Scheme scheme, Rng& rng, bool sync = true);

Bytes encode_key_file(const KeyMaterial& key);
KeyMaterial decode_key_file(ByteView bytes);

}  // namespace punchcard::server
