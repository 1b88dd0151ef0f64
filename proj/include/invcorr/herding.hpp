#pragma once

// Buy and sell herding days per (investor type, category) group.

#include "invcorr/classify.hpp"
#include "invcorr/inventory.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace invcorr {

enum class TradeDirection { buyer, seller, inactive };
enum class HerdingDirection { buy, sell, none };

[[nodiscard]] std::string_view to_string(HerdingDirection d) noexcept;

/// Sign of the net flow of `series` on `date`. Throws for an intraday series or an
/// unknown date.
[[nodiscard]] TradeDirection daily_direction(const InventorySeries& series, Date date);

/// h = N+ / (N+ + N-). Throws invalid_argument when both are zero.
[[nodiscard]] double herding_index(std::uint64_t n_plus, std::uint64_t n_minus);

/// P(X >= k) and P(X <= k) for X ~ Binomial(n, 1/2), summed term by term.
[[nodiscard]] double binomial_upper_tail(std::uint64_t n, std::uint64_t k);
[[nodiscard]] double binomial_lower_tail(std::uint64_t n, std::uint64_t k);

struct HerdingTest {
    HerdingDirection direction = HerdingDirection::none;
    double p_value = 1.0;  // the smaller of the two one-sided tails
    double p_buy = 1.0;
    double p_sell = 1.0;
};

[[nodiscard]] HerdingTest binomial_herding_test(std::uint64_t n_plus, std::uint64_t n_minus, double alpha = 0.05);

struct HerdingGroup {
    InvestorType type = InvestorType::individual;
    Category category = Category::uncategorized;
    auto operator<=>(const HerdingGroup&) const = default;
};

struct HerdingDay {
    std::string stock_code;
    Date date;
    HerdingGroup group;
    std::uint64_t n_plus = 0;
    std::uint64_t n_minus = 0;
    double h = 0.0;
    HerdingDirection direction = HerdingDirection::none;
    double p_value = 1.0;
};

struct HerdingGroupCount {
    HerdingGroup group;
    std::size_t members = 0;
    std::size_t buy_days = 0;
    std::size_t sell_days = 0;
    std::size_t skipped_days = 0;  // no active member
};

struct HerdingReport {
    std::string stock_code;
    std::size_t total_days = 0;
    std::vector<HerdingDay> days;          // tested (group, day) pairs
    std::vector<HerdingGroupCount> counts; // all six groups, empty ones with zero counts
};

/// Per-day herding tests for every type x category group of a daily panel.
/// Investors without a label are ignored.
[[nodiscard]] HerdingReport herding_day_counts(const InventoryPanel& panel,
                                               const std::map<std::string, Category>& labels, double alpha = 0.05);

/// stock,category,total_days,n_plus_d,n_minus_d,n_plus_s,n_minus_s where d marks
/// individuals and s institutions.
void write_herding_table(std::ostream& out, std::span<const HerdingReport> reports);
void write_herding_days(std::ostream& out, const HerdingReport& report);

}  // namespace invcorr
