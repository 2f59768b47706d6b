#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <spdlog/logger.h>

#include "punchcard/extensions/expiry.hpp"
#include "punchcard/mergeable.hpp"
#include "punchcard/punchcard.hpp"
#include "punchcard/rng.hpp"
#include "punchcard/scheme.hpp"
#include "punchcard/storage.hpp"
#include "punchcard/transport.hpp"

namespace punchcard::client {

using CardId = std::uint32_t;

/// One stored card. `state` holds CardState (main) or MergeCardState
/// (mergeable) in its at-rest encoding.
struct CardRecord {
    CardId id = 0;
    Scheme scheme = Scheme::Main;
    bool spent = false;
    std::optional<Date> expiry;
    std::optional<Secret32> rs;
    Bytes state;

    std::uint32_t punches() const;
    Secret32 secret_u() const;

    CardState<MainGroup> main_state() const;
    MergeCardState<MergeGroups> merge_state() const;

    Bytes encode() const;
    static CardRecord decode(ByteView bytes);
};

/// What `list()` shows: no secrets.
struct CardSummary {
    CardId id;
    Scheme scheme;
    std::uint32_t punches;
    bool spent;
    std::optional<Date> expiry;
    bool redemption_proof;
};

struct NewCardOptions {
    std::optional<Date> expiry;
    bool redemption_proof = false;
    Date today = today_utc();
    ExpiryPolicy policy{};
};

struct WalletOptions {
    bool sync = true;
    /// Journal records before the snapshot is rewritten.
    std::size_t compact_after = 64;
    FaultInjector* faults = nullptr;
    std::shared_ptr<spdlog::logger> logger;
};

/// Client card store and protocol driver.
///
/// On disk: `<path>` is the snapshot ("PCWL" || version || body || crc32) and
/// `<path>.journal` an append log of whole-card replacements. A card's state
/// changes only by appending one journal record, after the server's proof has
/// been verified, so a crash leaves each card either before or after an
/// operation. Operations on one card are serialized; distinct cards may be
/// used from different threads.
class Wallet {
public:
    static Wallet open(const std::filesystem::path& path, WalletOptions options = {});
    static Wallet in_memory(WalletOptions options = {});

    Wallet(Wallet&&) noexcept;
    Wallet& operator=(Wallet&&) noexcept;
    ~Wallet();

    void set_public_key(Scheme scheme, ByteView pk);
    std::optional<Bytes> public_key(Scheme scheme) const;
    /// GET_PK round trip; stores the key. Returns it.
    Bytes fetch_public_key(Scheme scheme, Transport& transport);

    /// Offline: needs only the cached public key for the scheme.
    CardId new_card(Scheme scheme, const NewCardOptions& options = {});

    /// One punch (t = 1) or a promotion of t punches. Returns the new count.
    /// On ProofRejected, TransportError or ProtocolError the card is unchanged.
    std::uint32_t punch(CardId id, Transport& transport, std::uint32_t t = 1);

    /// Refuses (WalletError) unless the card holds exactly n punches or `force`.
    /// On accept the card is marked spent; on reject it is kept.
    VerifyOutcome redeem(CardId id, Transport& transport, std::uint16_t n, bool force = false);
    /// Card A contributes its G0 half, card B its G1 half; counts must sum to n.
    VerifyOutcome merge_redeem(CardId a, CardId b, Transport& transport, std::uint16_t n, bool force = false);

    std::vector<CardSummary> list() const;
    CardRecord card(CardId id) const;
    std::size_t size() const;

    /// Drops spent cards from the store.
    std::size_t prune_spent();
    void compact();

    /// Replays the journal through the decoder without opening (recovery checks).
    static std::size_t verify_file(const std::filesystem::path& path);

private:
    struct Impl;
    explicit Wallet(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

}  // namespace punchcard::client
