#pragma once

#include <cstdint>
#include <string_view>

#include "punchcard/group/bls12_381.hpp"
#include "punchcard/group/ristretto255.hpp"

namespace punchcard {

/// Deployed instantiations: the main scheme over ristretto255, the mergeable
/// scheme over BLS12-381.
using MainGroup = Ristretto255;
using MergeGroups = Bls12381;

enum class Scheme : std::uint8_t { Main = 0, Mergeable = 1 };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

}  // namespace punchcard
