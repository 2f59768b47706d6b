#include "punchcard/scheme.hpp"

#include <string>

#include "punchcard/errors.hpp"

namespace punchcard {

std::string_view to_string(Scheme s) { return s == Scheme::Main ? "main" : "mergeable"; }

Scheme parse_scheme(std::string_view name) {
    if (name == "main") return Scheme::Main;
    if (name == "mergeable") return Scheme::Mergeable;
    throw ConfigError("unknown scheme '" + std::string(name) + "' (expected main or mergeable)");
}

}  // namespace punchcard
