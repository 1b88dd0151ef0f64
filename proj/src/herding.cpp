#include "invcorr/herding.hpp"
#include "invcorr/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace invcorr {

std::string_view to_string(HerdingDirection d) noexcept {
    switch (d) {
        case HerdingDirection::buy: return "buy";
        case HerdingDirection::sell: return "sell";
        case HerdingDirection::none: break;
    }
    return "none";
}

TradeDirection daily_direction(const InventorySeries& series, Date date) {
    if (!series.horizon.is_daily()) throw Error(ErrorKind::invalid_argument, "herding needs a daily series");
    const auto it = std::find_if(series.times.begin(), series.times.end(),
                                 [&](const Period& p) { return p.date == date; });
    if (it == series.times.end()) throw Error(ErrorKind::misaligned, "date outside the series: " + format_date(date));
    const std::int64_t flow = series.cash_ticks[static_cast<std::size_t>(it - series.times.begin())];
    if (flow > 0) return TradeDirection::buyer;
    if (flow < 0) return TradeDirection::seller;
    return TradeDirection::inactive;
}

double herding_index(std::uint64_t n_plus, std::uint64_t n_minus) {
    if (n_plus + n_minus == 0) throw Error(ErrorKind::invalid_argument, "herding index of an empty group");
    return static_cast<double>(n_plus) / static_cast<double>(n_plus + n_minus);
}

namespace {

constexpr std::uint64_t kExactLimit = 62;

// sum_{j=lo}^{hi} C(n, j), n <= 62
std::uint64_t binomial_sum(std::uint64_t n, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t c = 1;  // C(n, 0)
    std::uint64_t total = 0;
    for (std::uint64_t j = 0; j <= hi; ++j) {
        if (j >= lo) total += c;
        if (j < n) c = c / (j + 1) * (n - j) + c % (j + 1) * (n - j) / (j + 1);
    }
    return total;
}

double log_pmf(std::uint64_t n, std::uint64_t j) {
    const double nd = static_cast<double>(n);
    const double jd = static_cast<double>(j);
    return std::lgamma(nd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) - nd * std::log(2.0);
}

// P(X <= k) for k below the mode: terms increase with j, summed smallest first
double lower_sum(std::uint64_t n, std::uint64_t k) {
    double s = 0.0;
    for (std::uint64_t j = 0; j <= k; ++j) s += std::exp(log_pmf(n, j));
    return s;
}

}  // namespace

double binomial_lower_tail(std::uint64_t n, std::uint64_t k) {
    if (k >= n) return 1.0;
    if (n <= kExactLimit) return std::ldexp(static_cast<double>(binomial_sum(n, 0, k)), -static_cast<int>(n));
    if (2 * k < n) return lower_sum(n, k);
    return 1.0 - lower_sum(n, n - k - 1);  // P(X >= k+1) = P(X <= n-k-1) by symmetry
}

double binomial_upper_tail(std::uint64_t n, std::uint64_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    return binomial_lower_tail(n, n - k);
}

HerdingTest binomial_herding_test(std::uint64_t n_plus, std::uint64_t n_minus, double alpha) {
    const std::uint64_t n = n_plus + n_minus;
    if (n == 0) throw Error(ErrorKind::invalid_argument, "herding test of an empty group");
    HerdingTest out;
    out.p_buy = binomial_upper_tail(n, n_plus);
    out.p_sell = binomial_lower_tail(n, n_plus);
    out.p_value = std::min(out.p_buy, out.p_sell);
    if (out.p_buy < alpha)
        out.direction = HerdingDirection::buy;
    else if (out.p_sell < alpha)
        out.direction = HerdingDirection::sell;
    return out;
}

namespace {

constexpr std::array<Category, 3> kCategories{Category::reversing, Category::trending, Category::uncategorized};
constexpr std::array<InvestorType, 2> kTypes{InvestorType::individual, InvestorType::institution};

}  // namespace

HerdingReport herding_day_counts(const InventoryPanel& panel, const std::map<std::string, Category>& labels,
                                 double alpha) {
    if (!panel.horizon.is_daily()) throw Error(ErrorKind::invalid_argument, "herding needs a daily panel");
    HerdingReport report;
    report.stock_code = panel.stock_code;
    report.total_days = panel.times.size();

    std::map<HerdingGroup, std::vector<const InventorySeries*>> members;
    for (auto c : kCategories)
        for (auto t : kTypes) members[HerdingGroup{t, c}];
    for (const auto& s : panel.series) {
        const auto it = labels.find(s.investor_id);
        if (it == labels.end()) continue;
        if (s.times.size() != panel.times.size()) throw Error(ErrorKind::misaligned, "series off the panel grid");
        members[HerdingGroup{s.investor_type, it->second}].push_back(&s);
    }

    for (const auto& [group, list] : members) {
        HerdingGroupCount count{group, list.size()};
        for (std::size_t d = 0; d < panel.times.size(); ++d) {
            std::uint64_t plus = 0, minus = 0;
            for (const auto* s : list) {
                if (s->cash_ticks[d] > 0) ++plus;
                else if (s->cash_ticks[d] < 0) ++minus;
            }
            if (plus + minus == 0) {
                ++count.skipped_days;
                continue;
            }
            const auto test = binomial_herding_test(plus, minus, alpha);
            if (test.direction == HerdingDirection::buy) ++count.buy_days;
            if (test.direction == HerdingDirection::sell) ++count.sell_days;
            report.days.push_back(HerdingDay{panel.stock_code, panel.times[d].date, group, plus, minus,
                                             herding_index(plus, minus), test.direction, test.p_value});
        }
        report.counts.push_back(count);
    }
    return report;
}

void write_herding_table(std::ostream& out, std::span<const HerdingReport> reports) {
    out << "stock,category,total_days,n_plus_d,n_minus_d,n_plus_s,n_minus_s\n";
    for (const auto& r : reports) {
        for (auto c : kCategories) {
            out << r.stock_code << ',' << to_string(c) << ',' << r.total_days;
            for (auto t : kTypes) {
                const auto it = std::find_if(r.counts.begin(), r.counts.end(),
                                             [&](const HerdingGroupCount& g) { return g.group == HerdingGroup{t, c}; });
                const std::size_t buy = it == r.counts.end() ? 0 : it->buy_days;
                const std::size_t sell = it == r.counts.end() ? 0 : it->sell_days;
                out << ',' << buy << ',' << sell;
            }
            out << '\n';
        }
    }
}

void write_herding_days(std::ostream& out, const HerdingReport& report) {
    out << "stock,date,type,category,n_plus,n_minus,h,direction,p_value\n";
    for (const auto& d : report.days)
        out << d.stock_code << ',' << format_date(d.date) << ',' << to_string(d.group.type) << ','
            << to_string(d.group.category) << ',' << d.n_plus << ',' << d.n_minus << ',' << format_number(d.h) << ','
            << to_string(d.direction) << ',' << format_number(d.p_value) << '\n';
}

}  // namespace invcorr
