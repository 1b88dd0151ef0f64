#pragma once

// Signed inventory-variation series: v_i(t) = buy value - sell value over period t.

#include "invcorr/market_data.hpp"

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace invcorr {

struct InventorySeries {
    std::string investor_id;
    InvestorType investor_type = InvestorType::individual;
    std::string stock_code;
    Horizon horizon;
    std::vector<Period> times;
    std::vector<std::int64_t> cash_ticks;  // exact net cash flow per period, 1e-4 units
    std::vector<double> v;                 // currency units
    std::vector<double> V;                 // standardized v; empty when degenerate
    double mean = 0.0;
    double sigma = 0.0;
    bool degenerate = false;

    [[nodiscard]] std::size_t size() const noexcept { return v.size(); }
};

/// Fills mean, sigma and V from v, or throws ErrorKind::degenerate when sigma = 0.
[[nodiscard]] InventorySeries standardize(InventorySeries series);

/// Like standardize but flags the series instead of throwing.
void standardize_or_flag(InventorySeries& series);

/// Inventory variation of one investor on the grid. Throws ErrorKind::invalid_argument
/// when the investor never trades in `stock_trades`.
[[nodiscard]] InventorySeries build_inventory(std::span<const TradeRecord> stock_trades,
                                              const std::string& investor_id, const PeriodGrid& grid);

struct InventoryPanel {
    std::string stock_code;
    Horizon horizon;
    std::vector<Period> times;
    std::vector<InventorySeries> series;

    [[nodiscard]] std::size_t excluded_degenerate() const;
    /// Non-degenerate series only.
    [[nodiscard]] std::vector<InventorySeries> usable() const;
};

/// One pass over the trades building the series of every listed investor.
[[nodiscard]] InventoryPanel build_panel(std::span<const TradeRecord> stock_trades,
                                         std::span<const InvestorProfile> investors, const PeriodGrid& grid);

/// Sums of `factor` consecutive values; a trailing partial window is dropped.
[[nodiscard]] std::vector<double> resample_sum(std::span<const double> values, std::size_t factor);

/// Coarser series whose v is the window sum of `factor` consecutive periods.
/// Throws when factor is zero or exceeds the series length.
[[nodiscard]] InventorySeries resample(const InventorySeries& series, std::size_t factor);

/// T x N matrix of standardized columns for the non-degenerate series.
[[nodiscard]] Matrix standardized_matrix(std::span<const InventorySeries> series);

/// Rows = periods, columns = investor ids, values = v.
void write_panel_csv(std::ostream& out, const InventoryPanel& panel, const SessionSchedule& schedule);
[[nodiscard]] nlohmann::json panel_sidecar(const InventoryPanel& panel);

}  // namespace invcorr
