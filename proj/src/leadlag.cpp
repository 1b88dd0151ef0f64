#include "invcorr/leadlag.hpp"
#include "invcorr/inventory.hpp"
#include "invcorr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace invcorr {

LaggedCorrelation autocorrelation(std::span<const double> series, std::size_t max_lag) {
    const std::size_t T = series.size();
    if (T <= 2 * max_lag) throw Error(ErrorKind::insufficient_data, "autocorrelation needs T > 2 max_lag");
    if (stats::is_degenerate(series)) throw Error(ErrorKind::degenerate, "autocorrelation of a constant series");
    const double m = stats::mean(series);
    double denom = 0.0;
    for (double x : series) denom += (x - m) * (x - m);
    LaggedCorrelation out;
    const double band = 2.0 / std::sqrt(static_cast<double>(T));
    for (std::size_t tau = 0; tau <= max_lag; ++tau) {
        double num = 0.0;
        for (std::size_t t = 0; t + tau < T; ++t) num += (series[t] - m) * (series[t + tau] - m);
        out.lags.push_back(static_cast<int>(tau));
        out.values.push_back(tau == 0 ? 1.0 : num / denom);
        out.band.push_back(band);
    }
    return out;
}

LaggedCorrelation lagged_crosscorrelation(std::span<const double> V, std::span<const double> R, std::size_t max_lag) {
    if (V.size() != R.size()) throw Error(ErrorKind::misaligned, "inventory and return grids differ");
    const std::size_t T = V.size();
    if (T < max_lag + 3) throw Error(ErrorKind::insufficient_data, "series too short for the requested lags");
    LaggedCorrelation out;
    const auto L = static_cast<long>(max_lag);
    for (long tau = -L; tau <= L; ++tau) {
        const std::size_t shift = static_cast<std::size_t>(std::labs(tau));
        const std::size_t n = T - shift;
        // V(t) pairs with R(t + tau)
        const auto v = tau >= 0 ? V.subspan(0, n) : V.subspan(shift, n);
        const auto r = tau >= 0 ? R.subspan(shift, n) : R.subspan(0, n);
        out.lags.push_back(static_cast<int>(tau));
        out.values.push_back(stats::pearson(v, r));
        out.band.push_back(2.0 / std::sqrt(static_cast<double>(n)));
    }
    return out;
}

GroupAverages group_average_correlation(std::span<const LaggedCorrelation> correlations,
                                        std::span<const std::string> keys,
                                        std::span<const std::string> expected_groups) {
    if (keys.size() != correlations.size()) throw Error(ErrorKind::misaligned, "one group key per function expected");
    std::map<std::string, std::pair<LaggedCorrelation, std::size_t>> acc;
    for (std::size_t i = 0; i < correlations.size(); ++i) {
        const auto& c = correlations[i];
        auto [it, inserted] = acc.try_emplace(keys[i], c, 0);
        auto& [sum, count] = it->second;
        if (c.lags != sum.lags) throw Error(ErrorKind::misaligned, "lag grids differ within a group");
        if (!inserted)
            for (std::size_t k = 0; k < c.values.size(); ++k) sum.values[k] += c.values[k];
        ++count;
    }
    GroupAverages out;
    for (auto& [key, entry] : acc) {
        auto& [sum, count] = entry;
        for (auto& v : sum.values) v /= static_cast<double>(count);
        sum.group = key;
        out.groups.push_back(std::move(sum));
    }
    for (const auto& g : expected_groups)
        if (!acc.contains(g)) out.omitted.push_back(g);
    return out;
}

std::string_view to_string(CausalDirection d) noexcept { return d == CausalDirection::v_to_r ? "V->R" : "R->V"; }

namespace {

double rss_of(const Matrix& A, const Vector& y) {
    const Eigen::ColPivHouseholderQR<Matrix> qr(A);
    const Vector beta = qr.solve(y);
    return (y - A * beta).squaredNorm();
}

Matrix lag_design(std::span<const double> own, std::span<const double> other, std::size_t p, std::size_t start,
                  bool with_other) {
    const auto rows = static_cast<Eigen::Index>(own.size() - start);
    const auto cols = static_cast<Eigen::Index>(1 + p + (with_other ? p : 0));
    Matrix A(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = start + static_cast<std::size_t>(r);
        A(r, 0) = 1.0;
        for (std::size_t k = 1; k <= p; ++k) {
            A(r, static_cast<Eigen::Index>(k)) = own[t - k];
            if (with_other) A(r, static_cast<Eigen::Index>(p + k)) = other[t - k];
        }
    }
    return A;
}

}  // namespace

GrangerResult granger_test(std::span<const double> cause, std::span<const double> effect,
                           const GrangerOptions& options) {
    if (cause.size() != effect.size()) throw Error(ErrorKind::misaligned, "Granger test series lengths differ");
    const std::size_t pmax = options.max_lag_order;
    if (pmax == 0) throw Error(ErrorKind::invalid_argument, "lag order must be at least 1", "leadlag.max_lag_order");
    const std::size_t n = cause.size();
    if (n < 20 + 2 * pmax)
        throw Error(ErrorKind::insufficient_data,
                    "Granger test needs at least " + std::to_string(20 + 2 * pmax) + " records, got " + std::to_string(n));

    const Eigen::Index rows = static_cast<Eigen::Index>(n - pmax);
    const Vector y = Eigen::Map<const Vector>(effect.data() + pmax, rows);
    const double n_eff = static_cast<double>(rows);

    std::size_t best_p = 1;
    double best_aic = std::numeric_limits<double>::infinity();
    double rss_r = 0.0;
    for (std::size_t p = 1; p <= pmax; ++p) {
        const double rss = rss_of(lag_design(effect, cause, p, pmax, false), y);
        const double aic = n_eff * std::log(std::max(rss, 1e-300) / n_eff) + 2.0 * static_cast<double>(p + 1);
        if (aic < best_aic) {
            best_aic = aic;
            best_p = p;
            rss_r = rss;
        }
    }
    const double best_rss = rss_of(lag_design(effect, cause, best_p, pmax, true), y);

    GrangerResult out;
    out.lag_order = best_p;
    out.df1 = best_p;
    out.df2 = static_cast<std::size_t>(rows) - 2 * best_p - 1;
    const double gain = std::max(rss_r - best_rss, 0.0);
    out.f_statistic = best_rss > 0.0 ? (gain / static_cast<double>(out.df1)) / (best_rss / static_cast<double>(out.df2))
                                     : std::numeric_limits<double>::infinity();
    out.p_value = stats::fisher_f_sf(out.f_statistic, static_cast<double>(out.df1), static_cast<double>(out.df2));
    out.indicator = out.p_value < options.alpha;
    return out;
}

GrangerResult granger_indicator(std::span<const double> cause, std::span<const double> effect, std::size_t delta_t,
                                const GrangerOptions& options) {
    if (cause.size() != effect.size()) throw Error(ErrorKind::misaligned, "Granger test series lengths differ");
    const auto x = resample_sum(cause, delta_t);
    const auto y = resample_sum(effect, delta_t);
    auto out = granger_test(x, y, options);
    out.horizon = delta_t;
    return out;
}

std::vector<IndicatorAggregate> aggregate_indicators(std::span<const IndicatorRecord> records,
                                                     IndicatorGrouping grouping, std::size_t bin_horizon) {
    using Key = std::tuple<int, std::string, long>;
    std::map<Key, IndicatorAggregate> acc;
    for (const auto& r : records) {
        long group = 0;
        if (grouping == IndicatorGrouping::horizon) {
            group = static_cast<long>(r.result.horizon);
        } else {
            if (r.result.horizon != bin_horizon) continue;
            if (r.n_t == 0) throw Error(ErrorKind::invalid_argument, "indicator record lacks N_T");
            group = static_cast<long>(std::floor(r.cvr * std::sqrt(static_cast<double>(r.n_t))));
        }
        for (const std::string& pop : {std::string("all"), std::string(to_string(r.investor_type))}) {
            auto& a = acc[Key{static_cast<int>(r.direction), pop, group}];
            a.direction = r.direction;
            a.population = pop;
            a.group = group;
            a.uncategorized_band = grouping == IndicatorGrouping::cvr_bin && group >= -2 && group + 1 <= 2;
            ++a.n;
            if (r.result.indicator) ++a.fired;
        }
    }
    std::vector<IndicatorAggregate> out;
    for (auto& [key, a] : acc) {
        a.expected = static_cast<double>(a.fired) / static_cast<double>(a.n);
        out.push_back(a);
    }
    return out;
}

}  // namespace invcorr
