#pragma once

#include "invcorr/market_data.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline invcorr::TradeRecord trade(const std::string& stock, const std::string& when, const std::string& buyer,
                                  const std::string& seller, double price, std::int64_t size,
                                  invcorr::InvestorType buyer_type = invcorr::InvestorType::individual,
                                  invcorr::InvestorType seller_type = invcorr::InvestorType::individual) {
    invcorr::TradeRecord t;
    t.stock_code = stock;
    t.buyer_id = buyer;
    t.seller_id = seller;
    t.buyer_type = buyer_type;
    t.seller_type = seller_type;
    t.price_ticks = std::llround(price * static_cast<double>(invcorr::kTicksPerUnit));
    t.size = size;
    t.timestamp = *invcorr::parse_timestamp(when);
    return t;
}

inline invcorr::Date day(const std::string& text) { return *invcorr::parse_date(text); }

inline std::vector<double> normal_draws(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> out(n);
    for (auto& x : out) x = z(rng);
    return out;
}

// Two-pass reference moments, kept separate from the library code paths.
inline double ref_mean(const std::vector<double>& x) {
    long double s = 0;
    for (double v : x) s += v;
    return static_cast<double>(s / x.size());
}

inline double ref_var(const std::vector<double>& x) {
    const long double m = ref_mean(x);
    long double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return static_cast<double>(s / x.size());
}

inline double ref_corr(const std::vector<double>& x, const std::vector<double>& y) {
    const long double mx = ref_mean(x), my = ref_mean(y);
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

}  // namespace testing
