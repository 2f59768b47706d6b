#include "punchcard/redeem_db.hpp"

#include <fcntl.h>
#include <sodium.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <mutex>
#include <unordered_set>
#include <vector>

#include "punchcard/errors.hpp"
#include "punchcard/hash.hpp"

namespace punchcard {

namespace {

constexpr std::string_view kLogMagic = "PCDL";
constexpr std::string_view kSnapMagic = "PCSN";
constexpr std::uint8_t kVersion = 1;

/// Keyed SipHash so client-chosen secrets cannot be used to degrade the table.
struct SecretHash {
    std::array<std::uint8_t, crypto_shorthash_KEYBYTES> key;

    SecretHash() {
        ensure_sodium();
        randombytes_buf(key.data(), key.size());
    }
    std::size_t operator()(const Secret32& s) const {
        std::array<std::uint8_t, crypto_shorthash_BYTES> out{};
        crypto_shorthash(out.data(), s.data(), s.size(), key.data());
        return static_cast<std::size_t>(get_u64_le(out.data()));
    }
};

using SecretSet = std::unordered_set<Secret32, SecretHash>;

Bytes encode_record(std::span<const Secret32> secrets) {
    Bytes out;
    out.reserve(2 + 32 * secrets.size());
    put_u16_le(out, static_cast<std::uint16_t>(secrets.size()));
    for (const auto& s : secrets) append_to(out, s);
    return out;
}

void decode_record(ByteView payload, SecretSet& set) {
    ByteReader r(payload);
    const std::uint16_t n = r.u16_le();
    for (std::uint16_t i = 0; i < n; ++i) set.insert(r.take_array<32>());
    r.expect_done();
}

void load_snapshot(const std::filesystem::path& path, SecretSet& set) {
    auto data = read_file(path);
    if (!data) return;
    const std::size_t header = kSnapMagic.size() + 1 + 8;
    if (data->size() < header + 4 || !std::equal(kSnapMagic.begin(), kSnapMagic.end(), data->begin()) ||
        (*data)[kSnapMagic.size()] != kVersion)
        throw CorruptStore("bad snapshot header in " + path.string());
    const std::uint64_t count = get_u64_le(data->data() + kSnapMagic.size() + 1);
    if (data->size() != header + 32 * count + 4) throw CorruptStore("snapshot size mismatch in " + path.string());
    const std::size_t body = data->size() - 4;
    if (crc32(ByteView(data->data(), body)) != get_u32_le(data->data() + body))
        throw CorruptStore("snapshot checksum mismatch in " + path.string());
    set.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Secret32 s;
        std::copy_n(data->data() + header + 32 * i, 32, s.begin());
        set.insert(s);
    }
}

}  // namespace

struct RedeemDb::Impl {
    mutable std::mutex mu;
    SecretSet set;
    bool persistent = false;
    std::filesystem::path dir;
    RedeemDbOptions options;
    AppendLog log;
    int lock_fd = -1;

    ~Impl() {
        if (lock_fd >= 0) ::close(lock_fd);
    }

    std::filesystem::path snapshot_path() const { return dir / "redeemed.snap"; }
    std::filesystem::path log_path() const { return dir / "redeemed.log"; }

    void compact_locked() {
        if (!persistent) return;
        std::vector<Secret32> sorted(set.begin(), set.end());
        std::sort(sorted.begin(), sorted.end());
        Bytes snap(kSnapMagic.begin(), kSnapMagic.end());
        snap.push_back(kVersion);
        put_u64_le(snap, sorted.size());
        snap.reserve(snap.size() + 32 * sorted.size() + 4);
        for (const auto& s : sorted) append_to(snap, s);
        put_u32_le(snap, crc32(snap));
        write_file_atomic(snapshot_path(), snap, options.sync, options.faults, "db.snapshot");
        if (options.faults != nullptr) options.faults->checkpoint("db.after-snapshot");
        log.reset();
    }
};

RedeemDb::RedeemDb(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
RedeemDb::RedeemDb(RedeemDb&&) noexcept = default;
RedeemDb& RedeemDb::operator=(RedeemDb&&) noexcept = default;
RedeemDb::~RedeemDb() = default;

RedeemDb RedeemDb::in_memory() { return RedeemDb(std::make_unique<Impl>()); }

RedeemDb RedeemDb::open(const std::filesystem::path& dir, RedeemDbOptions options) {
    auto impl = std::make_unique<Impl>();
    impl->persistent = true;
    impl->dir = dir;
    impl->options = options;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create db directory " + dir.string() + ": " + ec.message());

    // One process at a time; the kernel drops the lock if the holder dies.
    const auto lock_path = dir / "LOCK";
    impl->lock_fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
    if (impl->lock_fd < 0) throw StorageError("cannot open " + lock_path.string());
    if (::flock(impl->lock_fd, LOCK_EX | LOCK_NB) != 0)
        throw StorageError("db directory " + dir.string() + " is in use by another process");

    load_snapshot(impl->snapshot_path(), impl->set);
    AppendLog::Options log_opts{options.sync, options.faults, "db.append"};
    auto& set = impl->set;
    impl->log = AppendLog(impl->log_path(), kLogMagic, kVersion, [&set](ByteView p) { decode_record(p, set); },
                          log_opts);
    return RedeemDb(std::move(impl));
}

InsertResult RedeemDb::check_and_insert(std::span<const Secret32> secrets) {
    std::lock_guard lock(impl_->mu);
    for (std::size_t i = 0; i < secrets.size(); ++i) {
        if (impl_->set.contains(secrets[i])) return InsertResult::AlreadyPresent;
        for (std::size_t j = 0; j < i; ++j)
            if (secrets[j] == secrets[i]) return InsertResult::AlreadyPresent;
    }
    // Durable first: a crash after this point replays the insert, a crash
    // before it leaves the secret unspent and no accept was ever sent.
    if (impl_->persistent) impl_->log.append(encode_record(secrets));
    for (const auto& s : secrets) impl_->set.insert(s);
    if (impl_->persistent && impl_->log.record_count() >= impl_->options.compact_after) impl_->compact_locked();
    return InsertResult::Inserted;
}

bool RedeemDb::contains(const Secret32& secret) const {
    std::lock_guard lock(impl_->mu);
    return impl_->set.contains(secret);
}

std::size_t RedeemDb::size() const {
    std::lock_guard lock(impl_->mu);
    return impl_->set.size();
}

bool RedeemDb::persistent() const { return impl_->persistent; }

void RedeemDb::bulk_insert(std::span<const Secret32> secrets) {
    std::lock_guard lock(impl_->mu);
    impl_->set.reserve(impl_->set.size() + secrets.size());
    for (const auto& s : secrets) impl_->set.insert(s);
    impl_->compact_locked();
}

std::size_t RedeemDb::purge_if(const std::function<bool(const Secret32&)>& expired) {
    std::lock_guard lock(impl_->mu);
    std::size_t removed = std::erase_if(impl_->set, [&](const Secret32& s) { return expired(s); });
    if (removed > 0) impl_->compact_locked();
    return removed;
}

void RedeemDb::compact() {
    std::lock_guard lock(impl_->mu);
    impl_->compact_locked();
}

void RedeemDb::flush() {
    std::lock_guard lock(impl_->mu);
    if (impl_->persistent) impl_->log.sync();
}

}  // namespace punchcard
