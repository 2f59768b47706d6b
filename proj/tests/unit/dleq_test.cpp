#include <gtest/gtest.h>

#include "punchcard/dleq.hpp"
#include "punchcard/group/bls12_381.hpp"
#include "punchcard/group/ristretto255.hpp"
#include "punchcard/group/toy.hpp"

namespace punchcard {
namespace {

template <typename G>
class DleqTest : public ::testing::Test {};
using Groups = ::testing::Types<Ristretto255, toy::ToyGroup, Bls12381::G0>;
TYPED_TEST_SUITE(DleqTest, Groups);

template <typename G>
DleqStatement<G> statement(const typename G::Scalar& x, Rng& rng) {
    const auto base = G::hash_to_group("dleq-test", rng.template bytes<32>());
    return {G::generator(), G::exp(G::generator(), x), base, G::exp(base, x)};
}

TYPED_TEST(DleqTest, HonestProofVerifies) {
    using G = TypeParam;
    auto rng = Rng::seeded(11);
    for (int i = 0; i < 10; ++i) {
        const auto x = random_nonzero<typename G::Scalar>(rng);
        const auto st = statement<G>(x, rng);
        const auto proof = dleq_prove<G>("t", st, x, rng);
        EXPECT_TRUE(dleq_verify<G>("t", st, proof));
        EXPECT_TRUE(dleq_verify_bytes<G>("t", st, proof.serialize()));
        EXPECT_EQ(DleqProof<G>::deserialize(proof.serialize()), proof);
    }
}

TYPED_TEST(DleqTest, WrongTagOrStatementFails) {
    using G = TypeParam;
    auto rng = Rng::seeded(12);
    const auto x = random_nonzero<typename G::Scalar>(rng);
    const auto st = statement<G>(x, rng);
    const auto proof = dleq_prove<G>("t", st, x, rng);
    EXPECT_FALSE(dleq_verify<G>("u", st, proof));
    auto other = st;
    other.punched = G::mul(st.punched, G::generator());
    EXPECT_FALSE(dleq_verify<G>("t", other, proof));
}

TYPED_TEST(DleqTest, SimulatedTranscriptsPassOnlyTheInteractiveCheck) {
    using G = TypeParam;
    auto rng = Rng::seeded(13);
    const auto x = random_nonzero<typename G::Scalar>(rng);
    const auto st = statement<G>(x, rng);
    const auto c = random_nonzero<typename G::Scalar>(rng);
    const auto sim = dleq_simulate<G>(st, c, rng);
    EXPECT_TRUE(dleq_check_response<G>(st, sim.a1, sim.a2, c, sim.z));
    // Zero knowledge does not hand out Fiat-Shamir proofs: the hash picks a different challenge.
    if (dleq_challenge<G>("t", st, sim.a1, sim.a2) != c) EXPECT_FALSE(dleq_verify<G>("t", st, sim));
}

TEST(Dleq, MalformedBytesAreRejects) {
    auto rng = Rng::seeded(14);
    const auto x = random_nonzero<RistrettoScalar>(rng);
    const auto st = statement<Ristretto255>(x, rng);
    auto bytes = dleq_prove<Ristretto255>("t", st, x, rng).serialize();
    EXPECT_EQ(bytes.size(), 96u);
    EXPECT_FALSE(dleq_verify_bytes<Ristretto255>("t", st, ByteView(bytes).first(95)));
    bytes[95] = 0xff;  // z no longer reduced
    EXPECT_FALSE(dleq_verify_bytes<Ristretto255>("t", st, bytes));
}

// A proof for log_g(pk) == log_p(p') cannot be made with a different exponent.
TEST(Dleq, ToyExhaustiveSoundnessForOneStatement) {
    using T = toy::ToyGroup;
    auto rng = Rng::seeded(15);
    const toy::ToyScalar x(5), y(6);
    const auto base = T::exp(T::generator(), toy::ToyScalar(3));
    const DleqStatement<T> st{T::generator(), T::exp(T::generator(), x), base, T::exp(base, y)};
    for (int i = 0; i < 200; ++i) EXPECT_FALSE(dleq_verify<T>("t", st, dleq_prove<T>("t", st, x, rng)));
}

}  // namespace
}  // namespace punchcard
