#include "invcorr/inventory.hpp"
#include "invcorr/report.hpp"
#include "invcorr/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <unordered_map>

namespace invcorr {

namespace {

InventorySeries empty_series(const std::string& id, InvestorType type, const std::string& stock,
                             const PeriodGrid& grid, const std::vector<Period>& times) {
    InventorySeries s;
    s.investor_id = id;
    s.investor_type = type;
    s.stock_code = stock;
    s.horizon = grid.horizon;
    s.times = times;
    s.cash_ticks.assign(times.size(), 0);
    return s;
}

void finish(InventorySeries& s) {
    s.v.resize(s.cash_ticks.size());
    std::transform(s.cash_ticks.begin(), s.cash_ticks.end(), s.v.begin(), [](std::int64_t c) {
        return static_cast<double>(c) / static_cast<double>(kTicksPerUnit);
    });
    standardize_or_flag(s);
}

}  // namespace

void standardize_or_flag(InventorySeries& series) {
    if (stats::is_degenerate(series.v)) {
        series.degenerate = true;
        series.V.clear();
        series.mean = series.v.empty() ? 0.0 : stats::mean(series.v);
        series.sigma = 0.0;
        return;
    }
    series.degenerate = false;
    series.mean = stats::mean(series.v);
    series.sigma = stats::stddev(series.v);
    series.V = stats::standardize(series.v);
}

InventorySeries standardize(InventorySeries series) {
    standardize_or_flag(series);
    if (series.degenerate)
        throw Error(ErrorKind::degenerate, "inventory series of " + series.investor_id + " has zero variance");
    return series;
}

InventorySeries build_inventory(std::span<const TradeRecord> stock_trades, const std::string& investor_id,
                                const PeriodGrid& grid) {
    std::optional<InvestorType> type;
    std::string stock;
    for (const auto& t : stock_trades) {
        if (t.buyer_id == investor_id) type = t.buyer_type;
        else if (t.seller_id == investor_id) type = t.seller_type;
        if (type) { stock = t.stock_code; break; }
    }
    if (!type) throw Error(ErrorKind::invalid_argument, "investor " + investor_id + " does not trade this stock");
    const InvestorProfile profile{investor_id, *type, 0};
    auto panel = build_panel(stock_trades, std::span(&profile, 1), grid);
    return std::move(panel.series.front());
}

InventoryPanel build_panel(std::span<const TradeRecord> stock_trades, std::span<const InvestorProfile> investors,
                           const PeriodGrid& grid) {
    InventoryPanel panel;
    panel.horizon = grid.horizon;
    panel.times = grid.periods();
    if (!stock_trades.empty()) panel.stock_code = stock_trades.front().stock_code;

    std::unordered_map<std::string, std::size_t> index;
    panel.series.reserve(investors.size());
    for (const auto& p : investors) {
        if (!index.emplace(p.investor_id, panel.series.size()).second)
            throw Error(ErrorKind::invalid_argument, "investor " + p.investor_id + " listed twice");
        panel.series.push_back(empty_series(p.investor_id, p.investor_type, panel.stock_code, grid, panel.times));
    }
    for (const auto& t : stock_trades) {
        const auto b = index.find(t.buyer_id);
        const auto s = index.find(t.seller_id);
        if (b == index.end() && s == index.end()) continue;
        const std::size_t k = grid.index_of(t);
        if (b != index.end()) panel.series[b->second].cash_ticks[k] += t.value_ticks();
        if (s != index.end()) panel.series[s->second].cash_ticks[k] -= t.value_ticks();
    }
    for (auto& s : panel.series) finish(s);
    return panel;
}

std::size_t InventoryPanel::excluded_degenerate() const {
    return static_cast<std::size_t>(
        std::count_if(series.begin(), series.end(), [](const InventorySeries& s) { return s.degenerate; }));
}

std::vector<InventorySeries> InventoryPanel::usable() const {
    std::vector<InventorySeries> out;
    for (const auto& s : series)
        if (!s.degenerate) out.push_back(s);
    return out;
}

std::vector<double> resample_sum(std::span<const double> values, std::size_t factor) {
    if (factor == 0) throw Error(ErrorKind::invalid_argument, "resampling factor must be at least 1");
    if (factor > values.size())
        throw Error(ErrorKind::insufficient_data, "resampling factor " + std::to_string(factor) +
                                                      " exceeds series length " + std::to_string(values.size()));
    std::vector<double> out(values.size() / factor, 0.0);
    for (std::size_t w = 0; w < out.size(); ++w)
        for (std::size_t j = 0; j < factor; ++j) out[w] += values[w * factor + j];
    return out;
}

InventorySeries resample(const InventorySeries& series, std::size_t factor) {
    if (factor == 0) throw Error(ErrorKind::invalid_argument, "resampling factor must be at least 1");
    if (factor > series.size())
        throw Error(ErrorKind::insufficient_data, "resampling factor " + std::to_string(factor) +
                                                      " exceeds series length " + std::to_string(series.size()));
    InventorySeries out;
    out.investor_id = series.investor_id;
    out.investor_type = series.investor_type;
    out.stock_code = series.stock_code;
    out.horizon = series.horizon.is_daily() ? series.horizon
                                            : Horizon::intraday(series.horizon.minutes * static_cast<int>(factor));
    const std::size_t windows = series.size() / factor;
    out.cash_ticks.assign(windows, 0);
    out.times.reserve(windows);
    for (std::size_t w = 0; w < windows; ++w) {
        out.times.push_back(series.times.empty() ? Period{} : series.times[w * factor]);
        for (std::size_t j = 0; j < factor; ++j) out.cash_ticks[w] += series.cash_ticks[w * factor + j];
    }
    finish(out);
    return out;
}

Matrix standardized_matrix(std::span<const InventorySeries> series) {
    std::vector<const InventorySeries*> cols;
    for (const auto& s : series)
        if (!s.degenerate) cols.push_back(&s);
    const std::size_t T = cols.empty() ? 0 : cols.front()->size();
    Matrix X(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j]->V.size() != T) throw Error(ErrorKind::misaligned, "series lengths differ");
        for (std::size_t t = 0; t < T; ++t)
            X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = cols[j]->V[t];
    }
    return X;
}

void write_panel_csv(std::ostream& out, const InventoryPanel& panel, const SessionSchedule& schedule) {
    out << "period";
    for (const auto& s : panel.series) out << ',' << s.investor_id;
    out << '\n';
    for (std::size_t t = 0; t < panel.times.size(); ++t) {
        out << format_period(panel.times[t], panel.horizon, schedule);
        for (const auto& s : panel.series) out << ',' << format_number(s.v[t]);
        out << '\n';
    }
}

nlohmann::json panel_sidecar(const InventoryPanel& panel) {
    nlohmann::json investors = nlohmann::json::array();
    for (const auto& s : panel.series) {
        investors.push_back({{"investor_id", s.investor_id},
                             {"type", std::string(to_string(s.investor_type))},
                             {"mean", s.mean},
                             {"sigma", s.sigma},
                             {"degenerate", s.degenerate}});
    }
    return {{"stock", panel.stock_code},
            {"horizon", panel.horizon.label()},
            {"periods", panel.times.size()},
            {"excluded_degenerate", panel.excluded_degenerate()},
            {"investors", investors}};
}

}  // namespace invcorr
