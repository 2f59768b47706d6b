#include "punchcard/punchcard.hpp"

namespace punchcard {

std::string_view to_string(VerifyOutcome outcome) {
    switch (outcome) {
        case VerifyOutcome::Accepted: return "accepted";
        case VerifyOutcome::BadCard: return "bad-card";
        case VerifyOutcome::DoubleSpend: return "double-spend";
        case VerifyOutcome::Expired: return "expired";
    }
    return "unknown";
}

}  // namespace punchcard
