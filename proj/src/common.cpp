#include "invcorr/common.hpp"

namespace invcorr {

std::string_view to_string(InvestorType type) noexcept {
    return type == InvestorType::individual ? "ind" : "ins";
}

std::optional<InvestorType> parse_investor_type(std::string_view text) noexcept {
    if (text == "ind") return InvestorType::individual;
    if (text == "ins") return InvestorType::institution;
    return std::nullopt;
}

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::parse: return "parse";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::misaligned: return "misaligned";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::non_convergence: return "non_convergence";
        case ErrorKind::config: return "config";
        case ErrorKind::missing_input: return "missing_input";
    }
    return "unknown";
}

}  // namespace invcorr
