#include <gtest/gtest.h>

#include <openssl/sha.h>

#include <set>

#include "punchcard/bytes.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/hash.hpp"
#include "punchcard/rng.hpp"
#include "punchcard/storage.hpp"

namespace punchcard {
namespace {

TEST(Bytes, HexRoundTrip) {
    const Bytes b{0x00, 0x01, 0xab, 0xff};
    EXPECT_EQ(to_hex(b), "0001abff");
    EXPECT_EQ(from_hex("0001ABff"), b);
    EXPECT_THROW(from_hex("abc"), InvalidEncoding);
    EXPECT_THROW(from_hex("zz"), InvalidEncoding);
}

TEST(Bytes, LittleEndianHelpers) {
    Bytes out;
    put_u16_le(out, 0x1234);
    put_u32_le(out, 0xdeadbeef);
    put_u64_le(out, 0x0102030405060708ULL);
    EXPECT_EQ(to_hex(out), "3412efbeadde0807060504030201");
    ByteReader r(out);
    EXPECT_EQ(r.u16_le(), 0x1234);
    EXPECT_EQ(r.u32_le(), 0xdeadbeefU);
    EXPECT_EQ(r.u64_le(), 0x0102030405060708ULL);
    EXPECT_TRUE(r.done());
    EXPECT_THROW(r.u8(), InvalidEncoding);
}

TEST(Bytes, ReaderRejectsTrailingBytes) {
    const Bytes b{1, 2, 3};
    ByteReader r(b);
    r.take(2);
    EXPECT_THROW(r.expect_done(), InvalidEncoding);
}

TEST(Rng, SeededIsDeterministic) {
    auto a = Rng::seeded(42), b = Rng::seeded(42), c = Rng::seeded(43);
    EXPECT_EQ(a.bytes<64>(), b.bytes<64>());
    EXPECT_NE(a.bytes<32>(), c.bytes<32>());
    EXPECT_TRUE(a.deterministic());
    EXPECT_FALSE(Rng::system().deterministic());
}

TEST(Rng, UniformStaysInRange) {
    auto rng = Rng::seeded(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.uniform(10);
        ASSERT_LT(v, 10u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 10u);
}

TEST(Rng, SystemDrawsDiffer) {
    auto rng = Rng::system();
    std::set<Secret32> draws;
    for (int i = 0; i < 100; ++i) draws.insert(rng.bytes<32>());
    EXPECT_EQ(draws.size(), 100u);
}

TEST(Hash, Sha256KnownAnswer) {
    EXPECT_EQ(to_hex(sha256(as_bytes("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(to_hex(sha256(as_bytes(""))), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

// Independent oracle: OpenSSL SHA-512 over len(tag) || tag || data.
TEST(Hash, TaggedHashMatchesOracle) {
    for (std::string_view tag : {"t", "punchcard/h2g/v1/main"}) {
        const std::string data = "some input";
        std::string msg(1, static_cast<char>(tag.size()));
        msg += tag;
        msg += data;
        unsigned char want[64];
        SHA512(reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), want);
        const auto got = tagged_hash(tag, as_bytes(data));
        EXPECT_EQ(to_hex(got), to_hex(ByteView(want, 64))) << "tag '" << tag << "'";
    }
    EXPECT_THROW(tagged_hash("", as_bytes("x")), std::invalid_argument);
    EXPECT_THROW(tagged_hash(std::string(256, 'a'), as_bytes("x")), std::invalid_argument);
}

TEST(Hash, TagsSeparateDomains) {
    // "ab" || "c" and "a" || "bc" must not collide.
    EXPECT_NE(tagged_hash("ab", as_bytes("c")), tagged_hash("a", as_bytes("bc")));
    TaggedHash h("x");
    h.update(as_bytes("12")).update(as_bytes("34"));
    EXPECT_EQ(h.finalize(), tagged_hash("x", as_bytes("1234")));
}

TEST(Storage, Crc32KnownAnswer) {
    EXPECT_EQ(crc32(as_bytes("123456789")), 0xcbf43926U);
    EXPECT_EQ(crc32(as_bytes("")), 0U);
}

}  // namespace
}  // namespace punchcard
