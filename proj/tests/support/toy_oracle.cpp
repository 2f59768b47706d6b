#include "toy_oracle.hpp"

#include <openssl/sha.h>

#include <string>

namespace punchcard::testing::oracle {

std::uint64_t powm(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t r = 1;
    base %= mod;
    for (; exp > 0; exp >>= 1) {
        if (exp & 1) r = r * base % mod;
        base = base * base % mod;
    }
    return r % mod;
}

std::uint64_t hash_exponent(std::string_view tag, ByteView input) {
    std::string msg(tag);
    msg.append(reinterpret_cast<const char*>(input.data()), input.size());
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), digest);
    std::uint64_t acc = 0;
    for (unsigned char b : digest) acc = (acc * 256 + b) % kQ;
    return acc;
}

}  // namespace punchcard::testing::oracle
