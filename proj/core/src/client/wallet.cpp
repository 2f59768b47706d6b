#include "punchcard/client/wallet.hpp"

#include <spdlog/sinks/null_sink.h>
#include <spdlog/spdlog.h>

#include "punchcard/errors.hpp"
#include "punchcard/extensions/multi_punch.hpp"
#include "punchcard/extensions/redemption_proof.hpp"

namespace punchcard::client {

namespace {

constexpr std::string_view kSnapMagic = "PCWL";
constexpr std::string_view kJournalMagic = "PCWJ";
constexpr std::uint8_t kVersion = 1;

enum class JournalOp : std::uint8_t { PutCard = 1, SetKey = 2, RemoveCard = 3, PutCards = 4 };

constexpr std::uint8_t kFlagSpent = 1;
constexpr std::uint8_t kFlagExpiry = 2;
constexpr std::uint8_t kFlagRs = 4;

Rng& thread_rng() {
    thread_local Rng rng = Rng::system();
    return rng;
}

void check_public_key(Scheme scheme, ByteView pk) {
    if (scheme == Scheme::Main) {
        if (MainGroup::decode(pk) == MainGroup::Element{}) throw InvalidEncoding("public key is the identity");
    } else {
        MergePublicKey<MergeGroups>::deserialize(pk);
    }
}

}  // namespace

std::uint32_t CardRecord::punches() const {
    if (state.size() < 4) throw InvalidEncoding("card record: state too short");
    return get_u32_le(state.data() + state.size() - 4);
}

Secret32 CardRecord::secret_u() const {
    Secret32 u{};
    if (state.size() < 32) throw InvalidEncoding("card record: state too short");
    std::copy_n(state.begin(), 32, u.begin());
    return u;
}

CardState<MainGroup> CardRecord::main_state() const {
    if (scheme != Scheme::Main) throw WalletError("card " + std::to_string(id) + " is not a main-scheme card");
    return CardState<MainGroup>::deserialize(state);
}

MergeCardState<MergeGroups> CardRecord::merge_state() const {
    if (scheme != Scheme::Mergeable) throw WalletError("card " + std::to_string(id) + " is not a mergeable card");
    return MergeCardState<MergeGroups>::deserialize(state);
}

// id (u32) || scheme || flags || [expiry days (u32)] || [rs (32)] || state
Bytes CardRecord::encode() const {
    Bytes out;
    put_u32_le(out, id);
    out.push_back(static_cast<std::uint8_t>(scheme));
    std::uint8_t flags = 0;
    if (spent) flags |= kFlagSpent;
    if (expiry) flags |= kFlagExpiry;
    if (rs) flags |= kFlagRs;
    out.push_back(flags);
    if (expiry) put_u32_le(out, static_cast<std::uint32_t>(expiry->time_since_epoch().count()));
    if (rs) append_to(out, *rs);
    append_to(out, state);
    return out;
}

CardRecord CardRecord::decode(ByteView bytes) {
    ByteReader r(bytes);
    CardRecord rec;
    rec.id = r.u32_le();
    const std::uint8_t scheme = r.u8();
    if (scheme > 1) throw InvalidEncoding("card record: unknown scheme");
    rec.scheme = static_cast<Scheme>(scheme);
    const std::uint8_t flags = r.u8();
    if ((flags & ~(kFlagSpent | kFlagExpiry | kFlagRs)) != 0) throw InvalidEncoding("card record: unknown flags");
    rec.spent = (flags & kFlagSpent) != 0;
    if ((flags & kFlagExpiry) != 0) rec.expiry = Date(std::chrono::days(r.u32_le()));
    if ((flags & kFlagRs) != 0) rec.rs = r.take_array<32>();
    const auto state = r.take(r.remaining());
    rec.state.assign(state.begin(), state.end());
    // Full decode validates the state encoding.
    if (rec.scheme == Scheme::Main) {
        CardState<MainGroup>::deserialize(rec.state);
    } else {
        MergeCardState<MergeGroups>::deserialize(rec.state);
    }
    return rec;
}

struct Wallet::Impl {
    std::optional<std::filesystem::path> path;
    WalletOptions options;
    std::shared_ptr<spdlog::logger> log;

    mutable std::mutex mu;
    std::map<CardId, CardRecord> cards;
    std::map<Scheme, Bytes> keys;
    CardId next_id = 1;
    AppendLog journal;
    std::map<CardId, std::shared_ptr<std::mutex>> card_locks;

    std::filesystem::path journal_path() const { return path->string() + ".journal"; }

    void apply(ByteView record) {
        ByteReader r(record);
        switch (static_cast<JournalOp>(r.u8())) {
            case JournalOp::PutCard: {
                auto rec = CardRecord::decode(r.take(r.remaining()));
                next_id = std::max(next_id, rec.id + 1);
                cards[rec.id] = std::move(rec);
                break;
            }
            case JournalOp::PutCards: {
                const std::uint8_t count = r.u8();
                std::vector<CardRecord> recs;
                for (std::uint8_t i = 0; i < count; ++i) recs.push_back(CardRecord::decode(r.take(r.u16_le())));
                r.expect_done();
                for (auto& rec : recs) {
                    next_id = std::max(next_id, rec.id + 1);
                    cards[rec.id] = std::move(rec);
                }
                break;
            }
            case JournalOp::SetKey: {
                const std::uint8_t scheme = r.u8();
                if (scheme > 1) throw InvalidEncoding("journal: unknown scheme");
                const auto pk = r.take(r.remaining());
                keys[static_cast<Scheme>(scheme)] = Bytes(pk.begin(), pk.end());
                break;
            }
            case JournalOp::RemoveCard: {
                const CardId id = r.u32_le();
                r.expect_done();
                cards.erase(id);
                break;
            }
            default: throw InvalidEncoding("journal: unknown record type");
        }
    }

    Bytes snapshot() const {
        Bytes out(kSnapMagic.begin(), kSnapMagic.end());
        out.push_back(kVersion);
        put_u32_le(out, next_id);
        out.push_back(static_cast<std::uint8_t>(keys.size()));
        for (const auto& [scheme, pk] : keys) {
            out.push_back(static_cast<std::uint8_t>(scheme));
            put_u16_le(out, static_cast<std::uint16_t>(pk.size()));
            append_to(out, pk);
        }
        put_u32_le(out, static_cast<std::uint32_t>(cards.size()));
        for (const auto& [id, rec] : cards) {
            const auto enc = rec.encode();
            put_u16_le(out, static_cast<std::uint16_t>(enc.size()));
            append_to(out, enc);
        }
        put_u32_le(out, crc32(out));
        return out;
    }

    void load_snapshot(ByteView data) {
        if (data.size() < kSnapMagic.size() + 1 + 4 ||
            !std::equal(kSnapMagic.begin(), kSnapMagic.end(), data.begin()))
            throw CorruptStore("wallet file has bad magic");
        const std::size_t body = data.size() - 4;
        if (crc32(data.first(body)) != get_u32_le(data.data() + body))
            throw CorruptStore("wallet file checksum mismatch");
        ByteReader r(data.subspan(kSnapMagic.size(), body - kSnapMagic.size()));
        if (const auto v = r.u8(); v != kVersion)
            throw CorruptStore("unsupported wallet file version " + std::to_string(v));
        try {
            next_id = r.u32_le();
            const std::uint8_t nkeys = r.u8();
            for (std::uint8_t i = 0; i < nkeys; ++i) {
                const std::uint8_t scheme = r.u8();
                if (scheme > 1) throw InvalidEncoding("unknown scheme");
                const auto pk = r.take(r.u16_le());
                keys[static_cast<Scheme>(scheme)] = Bytes(pk.begin(), pk.end());
            }
            const std::uint32_t ncards = r.u32_le();
            for (std::uint32_t i = 0; i < ncards; ++i) {
                auto rec = CardRecord::decode(r.take(r.u16_le()));
                next_id = std::max(next_id, rec.id + 1);
                cards[rec.id] = std::move(rec);
            }
            r.expect_done();
        } catch (const InvalidEncoding& e) {
            throw CorruptStore(std::string("wallet file: ") + e.what());
        }
    }

    // Journal first, then memory, then (maybe) a snapshot of the updated memory.
    template <typename Commit>
    void write_locked(JournalOp op, ByteView payload, Commit&& commit) {
        if (!path) {
            commit();
            return;
        }
        Bytes rec;
        rec.reserve(1 + payload.size());
        rec.push_back(static_cast<std::uint8_t>(op));
        append_to(rec, payload);
        journal.append(rec);
        commit();
        if (journal.record_count() >= options.compact_after) compact_locked();
    }

    void compact_locked() {
        if (!path) return;
        write_file_atomic(*path, snapshot(), options.sync, options.faults, "wallet.snapshot");
        if (options.faults != nullptr) options.faults->checkpoint("wallet.after-snapshot");
        journal.reset();
    }

    void put_card(const CardRecord& rec) {
        std::lock_guard lock(mu);
        // The in-memory view never runs ahead of the disk.
        write_locked(JournalOp::PutCard, rec.encode(), [&] { cards[rec.id] = rec; });
    }

    void put_cards(const std::vector<CardRecord>& recs) {
        Bytes payload{static_cast<std::uint8_t>(recs.size())};
        for (const auto& rec : recs) {
            const auto enc = rec.encode();
            put_u16_le(payload, static_cast<std::uint16_t>(enc.size()));
            append_to(payload, enc);
        }
        std::lock_guard lock(mu);
        write_locked(JournalOp::PutCards, payload, [&] {
            for (const auto& rec : recs) cards[rec.id] = rec;
        });
    }

    CardRecord get(CardId id) const {
        std::lock_guard lock(mu);
        auto it = cards.find(id);
        if (it == cards.end()) throw WalletError("no card with id " + std::to_string(id));
        return it->second;
    }

    std::shared_ptr<std::mutex> lock_for(CardId id) {
        std::lock_guard lock(mu);
        auto& m = card_locks[id];
        if (!m) m = std::make_shared<std::mutex>();
        return m;
    }

    Bytes key_for(Scheme scheme) const {
        std::lock_guard lock(mu);
        auto it = keys.find(scheme);
        if (it == keys.end())
            throw WalletError("no cached public key for the " + std::string(to_string(scheme)) + " scheme");
        return it->second;
    }
};

Wallet::Wallet(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Wallet::Wallet(Wallet&&) noexcept = default;
Wallet& Wallet::operator=(Wallet&&) noexcept = default;
Wallet::~Wallet() = default;

Wallet Wallet::in_memory(WalletOptions options) {
    auto impl = std::make_unique<Impl>();
    impl->options = options;
    impl->log = options.logger ? options.logger : std::make_shared<spdlog::logger>("wallet", std::make_shared<spdlog::sinks::null_sink_mt>());
    return Wallet(std::move(impl));
}

Wallet Wallet::open(const std::filesystem::path& path, WalletOptions options) {
    auto impl = std::make_unique<Impl>();
    impl->path = path;
    impl->options = options;
    impl->log = options.logger ? options.logger : spdlog::default_logger();
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw StorageError("cannot create wallet directory: " + ec.message());
    }
    if (auto data = read_file(path)) impl->load_snapshot(*data);
    auto* raw = impl.get();
    try {
        impl->journal = AppendLog(impl->journal_path(), kJournalMagic, kVersion,
                                  [raw](ByteView rec) { raw->apply(rec); },
                                  AppendLog::Options{options.sync, options.faults, "wallet.journal"});
    } catch (const InvalidEncoding& e) {
        throw CorruptStore(std::string("wallet journal: ") + e.what());
    }
    if (impl->journal.truncated_bytes() > 0)
        impl->log->warn("wallet journal had a torn tail of {} bytes; discarded", impl->journal.truncated_bytes());
    return Wallet(std::move(impl));
}

std::size_t Wallet::verify_file(const std::filesystem::path& path) {
    WalletOptions opts;
    opts.sync = false;
    opts.logger = std::make_shared<spdlog::logger>("wallet-verify", std::make_shared<spdlog::sinks::null_sink_mt>());
    return open(path, opts).size();
}

void Wallet::set_public_key(Scheme scheme, ByteView pk) {
    check_public_key(scheme, pk);
    Bytes payload{static_cast<std::uint8_t>(scheme)};
    append_to(payload, pk);
    std::lock_guard lock(impl_->mu);
    impl_->write_locked(JournalOp::SetKey, payload, [&] { impl_->keys[scheme] = Bytes(pk.begin(), pk.end()); });
}

std::optional<Bytes> Wallet::public_key(Scheme scheme) const {
    std::lock_guard lock(impl_->mu);
    auto it = impl_->keys.find(scheme);
    if (it == impl_->keys.end()) return std::nullopt;
    return it->second;
}

Bytes Wallet::fetch_public_key(Scheme scheme, Transport& transport) {
    const auto reply = transport.roundtrip(wire::Frame{wire::MsgType::GetPkReq, {}});
    const auto& f = expect_frame(reply, wire::MsgType::GetPkResp);
    const std::size_t expected =
        scheme == Scheme::Main ? MainGroup::kElementBytes : MergeServerKeys<MergeGroups>::kPublicBytes;
    if (f.body.size() != expected)
        throw ProtocolError("server public key has " + std::to_string(f.body.size()) + " bytes; the " +
                            std::string(to_string(scheme)) + " scheme uses " + std::to_string(expected));
    set_public_key(scheme, f.body);
    return f.body;
}

CardId Wallet::new_card(Scheme scheme, const NewCardOptions& options) {
    impl_->key_for(scheme);
    auto& rng = thread_rng();

    CardRecord rec;
    rec.scheme = scheme;
    Secret32 u;
    if (options.redemption_proof && options.expiry)
        throw WalletError("a card cannot both embed an expiry and derive u from a redemption secret");
    if (options.redemption_proof) {
        rec.rs = rng.bytes<32>();
        u = derive_card_secret(*rec.rs);
    } else if (options.expiry) {
        u = make_expiring_secret(*options.expiry, options.today, options.policy, rng);
        rec.expiry = options.expiry;
    } else {
        u = rng.bytes<32>();
    }

    if (scheme == Scheme::Main) {
        auto [secret, card] = issue_with_secret<MainGroup>(u, rng);
        rec.state = CardState<MainGroup>{secret, card, 0}.serialize();
    } else {
        auto [secret, card] = merge_issue_with_secret<MergeGroups>(u, rng);
        rec.state = MergeCardState<MergeGroups>{secret, card, 0}.serialize();
    }

    {
        std::lock_guard lock(impl_->mu);
        rec.id = impl_->next_id;
        impl_->write_locked(JournalOp::PutCard, rec.encode(), [&] {
            impl_->cards[rec.id] = rec;
            impl_->next_id = rec.id + 1;
        });
    }
    impl_->log->info("created {} card {}", to_string(scheme), rec.id);
    return rec.id;
}

std::uint32_t Wallet::punch(CardId id, Transport& transport, std::uint32_t t) {
    auto card_lock = impl_->lock_for(id);
    std::lock_guard guard(*card_lock);
    CardRecord rec = impl_->get(id);
    if (rec.spent) throw WalletError("card " + std::to_string(id) + " is already redeemed");
    if (t == 0) throw WalletError("punch count must be at least 1");
    const Bytes pk_bytes = impl_->key_for(rec.scheme);
    auto& rng = thread_rng();

    try {
        if (rec.scheme == Scheme::Main) {
            auto st = rec.main_state();
            const auto pk = MainGroup::decode(pk_bytes);
            const auto sent = st.card.serialize();
            if (t == 1) {
                const auto reply = transport.roundtrip(wire::Frame{wire::MsgType::PunchReq, Bytes(sent.begin(), sent.end())});
                const auto& f = expect_frame(reply, wire::MsgType::PunchResp);
                std::tie(st.secret, st.card) = client_punch_bytes<MainGroup>(pk, st.secret, st.card, f.body, rng);
            } else {
                Bytes body(sent.begin(), sent.end());
                body.push_back(static_cast<std::uint8_t>(t));
                if (t > 255) throw WalletError("promotion too large for the wire format");
                const auto reply = transport.roundtrip(wire::Frame{wire::MsgType::MultiPunchReq, std::move(body)});
                const auto& f = expect_frame(reply, wire::MsgType::MultiPunchResp);
                MultiPunchResponse<MainGroup> resp;
                try {
                    resp = MultiPunchResponse<MainGroup>::deserialize(f.body);
                } catch (const InvalidEncoding&) {
                    throw ProofRejected("multi-punch response malformed");
                }
                std::tie(st.secret, st.card) = client_multi_punch<MainGroup>(pk, st.secret, st.card, resp, t, rng);
            }
            st.punches += t;
            rec.state = st.serialize();
        } else {
            if (t != 1) throw WalletError("mergeable cards take one punch at a time");
            auto st = rec.merge_state();
            const auto pk = MergePublicKey<MergeGroups>::deserialize(pk_bytes);
            const auto reply = transport.roundtrip(wire::Frame{wire::MsgType::MergePunchReq, st.card.serialize()});
            const auto& f = expect_frame(reply, wire::MsgType::MergePunchResp);
            MergePunchResponse<MergeGroups> resp;
            try {
                resp = MergePunchResponse<MergeGroups>::deserialize(f.body);
            } catch (const InvalidEncoding&) {
                throw ProofRejected("merge punch response malformed");
            }
            std::tie(st.secret, st.card) = merge_client_punch<MergeGroups>(pk, st.secret, st.card, resp, rng);
            st.punches += 1;
            rec.state = st.serialize();
        }
    } catch (const ProofRejected&) {
        impl_->log->warn("server punch proof rejected for card {}; card left unchanged", id);
        throw;
    }

    impl_->put_card(rec);
    impl_->log->info("card {} punched, {} punches", id, rec.punches());
    return rec.punches();
}

namespace {

VerifyOutcome parse_status(const wire::Frame& reply, wire::MsgType expected) {
    const auto& f = expect_frame(reply, expected);
    if (f.body.size() != 1 || f.body[0] > 3) throw ProtocolError("malformed redeem response");
    return static_cast<VerifyOutcome>(f.body[0]);
}

}  // namespace

VerifyOutcome Wallet::redeem(CardId id, Transport& transport, std::uint16_t n, bool force) {
    auto card_lock = impl_->lock_for(id);
    std::lock_guard guard(*card_lock);
    CardRecord rec = impl_->get(id);
    if (rec.spent && !force) throw WalletError("card " + std::to_string(id) + " is already redeemed");
    if (rec.punches() != n && !force)
        throw WalletError("card " + std::to_string(id) + " holds " + std::to_string(rec.punches()) +
                          " punches, not " + std::to_string(n));
    if (rec.scheme != Scheme::Main)
        throw WalletError("mergeable cards are redeemed in pairs with merge-redeem");

    const auto st = rec.main_state();
    const auto req = client_redeem<MainGroup>(st.secret, st.card);
    const auto outcome =
        parse_status(transport.roundtrip(wire::make_redeem_request(wire::MsgType::RedeemReq, req.serialize(), n)),
                     wire::MsgType::RedeemResp);
    if (outcome == VerifyOutcome::Accepted) {
        rec.spent = true;
        impl_->put_card(rec);
    }
    impl_->log->info("card {} redemption: {}", id, to_string(outcome));
    return outcome;
}

VerifyOutcome Wallet::merge_redeem(CardId a, CardId b, Transport& transport, std::uint16_t n, bool force) {
    if (a == b && !force) throw WalletError("a card cannot be merged with itself");
    auto lock_a = impl_->lock_for(std::min(a, b));
    auto lock_b = impl_->lock_for(std::max(a, b));
    std::unique_lock guard_a(*lock_a);
    std::unique_lock<std::mutex> guard_b;
    if (a != b) guard_b = std::unique_lock(*lock_b);

    CardRecord ra = impl_->get(a);
    CardRecord rb = impl_->get(b);
    if ((ra.spent || rb.spent) && !force) throw WalletError("one of the cards is already redeemed");
    if (ra.punches() + rb.punches() != n && !force)
        throw WalletError("cards hold " + std::to_string(ra.punches()) + " + " + std::to_string(rb.punches()) +
                          " punches, not " + std::to_string(n));
    const auto sa = ra.merge_state();
    const auto sb = rb.merge_state();
    const auto req = client_merge_redeem<MergeGroups>(sa.secret, sa.card, sb.secret, sb.card);
    const auto outcome = parse_status(
        transport.roundtrip(wire::make_redeem_request(wire::MsgType::MergeRedeemReq, req.serialize(), n)),
        wire::MsgType::MergeRedeemResp);
    if (outcome == VerifyOutcome::Accepted) {
        ra.spent = true;
        rb.spent = true;
        if (a != b) {
            impl_->put_cards({ra, rb});
        } else {
            impl_->put_card(ra);
        }
    }
    impl_->log->info("cards {} and {} merge redemption: {}", a, b, to_string(outcome));
    return outcome;
}

std::vector<CardSummary> Wallet::list() const {
    std::lock_guard lock(impl_->mu);
    std::vector<CardSummary> out;
    out.reserve(impl_->cards.size());
    for (const auto& [id, rec] : impl_->cards)
        out.push_back({id, rec.scheme, rec.punches(), rec.spent, rec.expiry, rec.rs.has_value()});
    return out;
}

CardRecord Wallet::card(CardId id) const { return impl_->get(id); }

std::size_t Wallet::size() const {
    std::lock_guard lock(impl_->mu);
    return impl_->cards.size();
}

std::size_t Wallet::prune_spent() {
    std::lock_guard lock(impl_->mu);
    std::vector<CardId> spent;
    for (const auto& [id, rec] : impl_->cards)
        if (rec.spent) spent.push_back(id);
    for (CardId id : spent) {
        Bytes payload;
        put_u32_le(payload, id);
        impl_->write_locked(JournalOp::RemoveCard, payload, [&] { impl_->cards.erase(id); });
    }
    return spent.size();
}

void Wallet::compact() {
    std::lock_guard lock(impl_->mu);
    impl_->compact_locked();
}

}  // namespace punchcard::client
