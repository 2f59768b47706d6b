#include <gtest/gtest.h>

#include "punchcard/errors.hpp"
#include "punchcard/wire.hpp"

namespace punchcard::wire {
namespace {

TEST(Wire, FrameLayout) {
    const Frame f{MsgType::PunchReq, {0xaa, 0xbb}};
    // total length 7 (LE) || type || body
    EXPECT_EQ(to_hex(f.encode()), "0700000001aabb");
    EXPECT_EQ(f.wire_size(), 7u);
}

TEST(Wire, DecodeIncrementally) {
    const Frame f{MsgType::GetPkResp, Bytes(32, 7)};
    const auto enc = f.encode();
    for (std::size_t n = 0; n < enc.size(); ++n)
        EXPECT_EQ(decode_frame(ByteView(enc).first(n)).status, DecodeResult::Status::NeedMore) << n;
    Bytes two = enc;
    append_to(two, enc);
    const auto r = decode_frame(two);
    ASSERT_EQ(r.status, DecodeResult::Status::Ok);
    EXPECT_EQ(r.frame, f);
    EXPECT_EQ(r.consumed, enc.size());
}

TEST(Wire, InvalidFrames) {
    EXPECT_EQ(decode_frame(Bytes{4, 0, 0, 0, 1}).status, DecodeResult::Status::Invalid);
    Bytes huge{0, 0, 0, 1, 1};  // 16 MiB
    EXPECT_EQ(decode_frame(huge).status, DecodeResult::Status::Invalid);
    // Unknown types still frame correctly; the service answers them.
    const auto unknown = decode_frame(Bytes{5, 0, 0, 0, 0x55});
    EXPECT_EQ(unknown.status, DecodeResult::Status::Ok);
    EXPECT_FALSE(is_known(0x55));
}

TEST(Wire, RedeemTrailer) {
    const Bytes req(64, 1);
    const auto f = make_redeem_request(MsgType::RedeemReq, req, 0x0102);
    EXPECT_EQ(f.body.size(), 66u);
    EXPECT_EQ(f.body[64], 0x02);
    EXPECT_EQ(f.body[65], 0x01);
    EXPECT_EQ(f.payload_size(), 64u);
    const auto [body, n] = split_redeem_request(f, 64);
    EXPECT_EQ(n, 0x0102);
    EXPECT_EQ(body.size(), 64u);
    EXPECT_THROW(split_redeem_request(f, 63), InvalidEncoding);
}

TEST(Wire, ErrorFrames) {
    const auto f = make_error(ErrorCode::PunchCountNotAccepted, "nope");
    EXPECT_EQ(f.type, MsgType::Error);
    const auto [code, msg] = parse_error(f);
    EXPECT_EQ(code, ErrorCode::PunchCountNotAccepted);
    EXPECT_EQ(msg, "nope");
}

TEST(Wire, KnownTypes) {
    for (int t = 0x01; t <= 0x0c; ++t) EXPECT_TRUE(is_known(static_cast<std::uint8_t>(t)));
    EXPECT_TRUE(is_known(0x7f));
    EXPECT_FALSE(is_known(0x00));
    EXPECT_FALSE(is_known(0x0d));
    EXPECT_EQ(to_string(MsgType::MergeRedeemReq), "MERGE_REDEEM_REQ");
}

}  // namespace
}  // namespace punchcard::wire
