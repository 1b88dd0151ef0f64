#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace invcorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class InvestorType : std::uint8_t { individual, institution };

/// Short spelling used in trade logs and reports: "ind" / "ins".
std::string_view to_string(InvestorType type) noexcept;
std::optional<InvestorType> parse_investor_type(std::string_view text) noexcept;

enum class ErrorKind {
    invalid_argument,
    parse,
    degenerate,
    misaligned,
    insufficient_data,
    non_convergence,
    config,
    missing_input,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every module reports contract violations through this type. `field` names the
/// offending configuration key or argument when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string field = {})
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

}  // namespace invcorr
