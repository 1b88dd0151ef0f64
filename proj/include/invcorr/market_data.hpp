#pragma once

// Trade-log ingestion, activity filtering, trading calendars and price returns.

#include "invcorr/common.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace invcorr {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Prices are held as integer ticks of 1e-4 currency units so that cash flows
/// (price x size) add up exactly.
inline constexpr std::int64_t kTicksPerUnit = 10'000;

struct TradeRecord {
    std::string stock_code;
    std::string buyer_id;
    std::string seller_id;
    InvestorType buyer_type = InvestorType::individual;
    InvestorType seller_type = InvestorType::individual;
    std::int64_t price_ticks = 0;
    std::int64_t size = 0;
    Timestamp timestamp{};

    [[nodiscard]] double price() const noexcept {
        return static_cast<double>(price_ticks) / static_cast<double>(kTicksPerUnit);
    }
    [[nodiscard]] std::int64_t value_ticks() const noexcept { return price_ticks * size; }
    [[nodiscard]] Date date() const noexcept { return std::chrono::floor<std::chrono::days>(timestamp); }
    [[nodiscard]] int minute_of_day() const noexcept;
};

// ---- timestamps and calendars ---------------------------------------------------

/// Accepts "YYYY-MM-DDTHH:MM:SS" (a space may replace the 'T').
[[nodiscard]] std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept;
[[nodiscard]] std::optional<Date> parse_date(std::string_view text) noexcept;
[[nodiscard]] std::string format_timestamp(Timestamp ts);
[[nodiscard]] std::string format_date(Date d);

/// Decimal text to ticks without going through floating point; more than four
/// decimals are rounded half-up.
[[nodiscard]] std::optional<std::int64_t> parse_price_ticks(std::string_view text) noexcept;
[[nodiscard]] std::string format_price_ticks(std::int64_t ticks);

struct Session {
    int open_minute;   // minutes after midnight
    int close_minute;
};

/// Exchange session layout. Defaults to a 09:30-11:30 / 13:00-15:00 day.
struct SessionSchedule {
    std::vector<Session> sessions{{570, 690}, {780, 900}};

    [[nodiscard]] int total_minutes() const;
    /// Number of intraday bins of `minutes` per day. Throws unless `minutes`
    /// divides every session's length.
    [[nodiscard]] int bins_per_day(int minutes) const;
    /// Bin of a minute-of-day. Pre-open (call auction) trades go to the first bin,
    /// trades at a session's close or inside the midday break to the last bin of
    /// the preceding session, and after-close trades to the last bin of the day.
    [[nodiscard]] int bin_of(int minute_of_day, int minutes) const;
    [[nodiscard]] int bin_open_minute(int bin, int minutes) const;
};

/// Sampling horizon: daily, or intraday bins of `minutes`.
struct Horizon {
    int minutes = 0;

    [[nodiscard]] static Horizon daily() noexcept { return {}; }
    [[nodiscard]] static Horizon intraday(int m) noexcept { return {m}; }
    [[nodiscard]] bool is_daily() const noexcept { return minutes == 0; }
    [[nodiscard]] std::string label() const;
    bool operator==(const Horizon&) const = default;
};

/// One sampling period: a trading date plus an intraday bin (0 for daily).
struct Period {
    Date date{};
    int bin = 0;
    bool operator==(const Period&) const = default;
};

[[nodiscard]] std::string format_period(const Period& p, const Horizon& h, const SessionSchedule& s);

/// Calendar + schedule + horizon: the common time index of every per-stock series.
struct PeriodGrid {
    std::vector<Date> calendar;
    SessionSchedule schedule;
    Horizon horizon;

    [[nodiscard]] int bins_per_day() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::vector<Period> periods() const;
    /// Index of the period a trade falls into; throws ErrorKind::misaligned when the
    /// trade's date is not in the calendar.
    [[nodiscard]] std::size_t index_of(const TradeRecord& trade) const;
    [[nodiscard]] std::string label(std::size_t index) const;
};

/// Sorted distinct trading dates across `trades`.
[[nodiscard]] std::vector<Date> trading_calendar(std::span<const TradeRecord> trades);

// ---- parsing ----------------------------------------------------------------------

inline constexpr std::string_view kTradeLogHeader =
    "stock,timestamp,buyer_id,buyer_type,seller_id,seller_type,price,size";

struct ParseOptions {
    bool strict = false;  // abort on the first malformed row
};

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
};

struct ParseReport {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::vector<RejectedRow> rejected;
    std::size_t out_of_order = 0;  // rows whose timestamp went backwards within a stock
    [[nodiscard]] bool reordered() const noexcept { return out_of_order > 0; }
};

struct ParsedTrades {
    std::vector<TradeRecord> trades;  // sorted by (stock_code, timestamp), stable
    ParseReport report;
};

/// Reads the CSV trade log. Rows violating a record invariant (non-positive price or
/// size, buyer == seller, unknown type spelling, an investor changing type) are
/// rejected and reported; with `strict` the first one throws ErrorKind::parse.
[[nodiscard]] ParsedTrades parse_trades(std::istream& in, const ParseOptions& options = {});
[[nodiscard]] ParsedTrades parse_trades_file(const std::string& path, const ParseOptions& options = {});

void write_trades(std::ostream& out, std::span<const TradeRecord> trades);

/// Contiguous per-stock slices of a vector sorted by stock code.
[[nodiscard]] std::map<std::string, std::span<const TradeRecord>>
split_by_stock(std::span<const TradeRecord> sorted_trades);

// ---- activity filter -------------------------------------------------------------

struct InvestorProfile {
    std::string investor_id;
    InvestorType investor_type = InvestorType::individual;
    std::size_t transaction_count = 0;
    bool operator==(const InvestorProfile&) const = default;
};

using ProfileMap = std::map<std::string, std::vector<InvestorProfile>>;

struct ActivityFilter {
    std::size_t min_investor_trades = 120;
    std::size_t min_investors_per_stock = 120;
    std::size_t top_k = 80;
    /// Trades an investor needs to count toward min_investors_per_stock; 0 means
    /// min_investor_trades.
    std::size_t min_stock_active_trades = 0;
};

/// Per stock, every investor with its transaction count (as buyer or seller),
/// ordered by descending count then ascending id.
[[nodiscard]] ProfileMap count_profiles(std::span<const TradeRecord> trades);

[[nodiscard]] ProfileMap filter_profiles(const ProfileMap& profiles, const ActivityFilter& filter);

/// count_profiles followed by filter_profiles.
[[nodiscard]] ProfileMap filter_active(std::span<const TradeRecord> trades, const ActivityFilter& filter);

// ---- returns ---------------------------------------------------------------------

enum class PriceReference { close, vwap };

struct ReturnSeries {
    std::string stock_code;
    Horizon horizon;
    std::vector<Period> periods;              // period of each return (grid periods 1..P-1)
    std::vector<double> raw_return;           // log-returns
    std::vector<double> normalized_return;    // zero mean, unit variance; empty if degenerate
    std::vector<Period> carried_forward;      // periods with no trades
    bool degenerate = false;
};

/// Log-returns of the per-period reference price over `grid`. Periods without trades
/// carry the previous price forward (leading empty periods take the first observed
/// price) and are listed in `carried_forward`.
[[nodiscard]] ReturnSeries price_returns(std::span<const TradeRecord> stock_trades, const PeriodGrid& grid,
                                         PriceReference reference = PriceReference::close);

/// Close-to-close daily log-returns over the stock's own trading dates, or over
/// `calendar` when one is given.
[[nodiscard]] ReturnSeries daily_returns(std::span<const TradeRecord> stock_trades,
                                         std::span<const Date> calendar = {},
                                         PriceReference reference = PriceReference::close);

}  // namespace invcorr
