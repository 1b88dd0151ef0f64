#pragma once

// Autocorrelation, lagged cross-correlation and Granger causality between
// inventory variations and returns.

#include "invcorr/classify.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invcorr {

struct LaggedCorrelation {
    std::vector<int> lags;
    std::vector<double> values;
    std::vector<double> band;  // half-width of the +-2 sigma significance band per lag
    std::string group;
};

/// Biased autocorrelation (denominator T) for lags 0..max_lag; band 2/sqrt(T).
/// Needs T > 2 max_lag.
[[nodiscard]] LaggedCorrelation autocorrelation(std::span<const double> series, std::size_t max_lag);

/// C(tau) = corr(V(t), R(t + tau)) over the overlapping records, tau in
/// [-max_lag, max_lag]; tau < 0 means returns lead. Band 2/sqrt(T - |tau|).
[[nodiscard]] LaggedCorrelation lagged_crosscorrelation(std::span<const double> V, std::span<const double> R,
                                                        std::size_t max_lag);

struct GroupAverages {
    std::vector<LaggedCorrelation> groups;  // sorted by group name
    std::vector<std::string> omitted;       // expected groups with no members
};

/// Pointwise mean of the functions sharing a group key.
[[nodiscard]] GroupAverages group_average_correlation(std::span<const LaggedCorrelation> correlations,
                                                      std::span<const std::string> keys,
                                                      std::span<const std::string> expected_groups = {});

enum class CausalDirection { v_to_r, r_to_v };
[[nodiscard]] std::string_view to_string(CausalDirection d) noexcept;

struct GrangerOptions {
    std::size_t max_lag_order = 4;
    double alpha = 0.05;
};

struct GrangerResult {
    std::size_t horizon = 1;   // in base sampling units
    std::size_t lag_order = 0;
    double f_statistic = 0.0;
    double p_value = 1.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    bool indicator = false;    // p_value < alpha
};

/// Does `cause` Granger-cause `effect`? Lag order by minimum AIC of the own-lags
/// (restricted) model over 1..max_lag_order on a common estimation sample, then an
/// F-test of the cause lags at that order. Needs length >= 20 + 2 max_lag_order.
[[nodiscard]] GrangerResult granger_test(std::span<const double> cause, std::span<const double> effect,
                                         const GrangerOptions& options = {});

/// Both series summed over windows of `delta_t` base periods, then granger_test.
[[nodiscard]] GrangerResult granger_indicator(std::span<const double> cause, std::span<const double> effect,
                                              std::size_t delta_t, const GrangerOptions& options = {});

struct IndicatorRecord {
    std::string investor_id;
    InvestorType investor_type = InvestorType::individual;
    Category category = Category::uncategorized;
    double cvr = 0.0;
    std::size_t n_t = 0;  // records behind cvr
    CausalDirection direction = CausalDirection::r_to_v;
    GrangerResult result;
};

enum class IndicatorGrouping { horizon, cvr_bin };

struct IndicatorAggregate {
    CausalDirection direction = CausalDirection::r_to_v;
    std::string population;      // "all", "ind" or "ins"
    long group = 0;              // horizon, or C_VR bin index in sigma units
    bool uncategorized_band = false;  // cvr_bin only: bin inside [-2 sigma, 2 sigma]
    std::size_t n = 0;
    std::size_t fired = 0;
    double expected = 0.0;       // E[I] = fired / n
};

/// E[I] per (direction, population, group). cvr_bin uses bins floor(C_VR sqrt(N_T))
/// of the records at `bin_horizon`. Empty groups do not appear.
[[nodiscard]] std::vector<IndicatorAggregate> aggregate_indicators(std::span<const IndicatorRecord> records,
                                                                   IndicatorGrouping grouping,
                                                                   std::size_t bin_horizon = 4);

}  // namespace invcorr
