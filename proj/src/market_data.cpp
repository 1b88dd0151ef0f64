#include "invcorr/market_data.hpp"
#include "invcorr/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace invcorr {

namespace {

using namespace std::chrono;

bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

}  // namespace

int TradeRecord::minute_of_day() const noexcept {
    return static_cast<int>(duration_cast<minutes>(timestamp - date()).count());
}

std::optional<Date> parse_date(std::string_view text) noexcept {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept {
    if (text.size() != 19 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
        return std::nullopt;
    const auto date = parse_date(text.substr(0, 10));
    int hh = 0, mm = 0, ss = 0;
    if (!date || !parse_uint(text.substr(11, 2), hh) || !parse_uint(text.substr(14, 2), mm) ||
        !parse_uint(text.substr(17, 2), ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return Timestamp{*date} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_timestamp(Timestamp ts) {
    const auto d = floor<days>(ts);
    const auto secs = (ts - d).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "T%02lld:%02lld:%02lld", static_cast<long long>(secs / 3600),
                  static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60));
    return format_date(d) + buf;
}

std::optional<std::int64_t> parse_price_ticks(std::string_view text) noexcept {
    if (text.empty()) return std::nullopt;
    const std::size_t dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    std::int64_t units = 0;
    for (char c : whole) {
        if (c < '0' || c > '9') return std::nullopt;
        units = units * 10 + (c - '0');
        if (units > 1'000'000'000) return std::nullopt;
    }
    std::int64_t ticks = units * kTicksPerUnit;
    std::int64_t scale = kTicksPerUnit / 10;
    bool round_up = false;
    for (std::size_t i = 0; i < frac.size(); ++i) {
        const char c = frac[i];
        if (c < '0' || c > '9') return std::nullopt;
        if (scale > 0) {
            ticks += (c - '0') * scale;
            scale /= 10;
        } else if (i == 4) {
            round_up = c >= '5';
        }
    }
    return ticks + (round_up ? 1 : 0);
}

std::string format_price_ticks(std::int64_t ticks) {
    std::string out = std::to_string(ticks / kTicksPerUnit);
    std::int64_t frac = ticks % kTicksPerUnit;
    if (frac == 0) return out;
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04lld", static_cast<long long>(frac));
    std::string f = buf;
    while (f.back() == '0') f.pop_back();
    return out + "." + f;
}

// ---- sessions and grids -----------------------------------------------------------

int SessionSchedule::total_minutes() const {
    int total = 0;
    for (const auto& s : sessions) total += s.close_minute - s.open_minute;
    return total;
}

int SessionSchedule::bins_per_day(int minutes) const {
    if (minutes <= 0) throw Error(ErrorKind::invalid_argument, "intraday horizon must be positive", "intraday_minutes");
    if (sessions.empty()) throw Error(ErrorKind::invalid_argument, "session schedule is empty", "sessions");
    int bins = 0;
    for (const auto& s : sessions) {
        const int len = s.close_minute - s.open_minute;
        if (len <= 0 || len % minutes != 0)
            throw Error(ErrorKind::invalid_argument,
                        std::to_string(minutes) + "-minute bins do not divide a " + std::to_string(len) +
                            "-minute session",
                        "intraday_minutes");
        bins += len / minutes;
    }
    return bins;
}

int SessionSchedule::bin_of(int minute_of_day, int minutes) const {
    int base = 0;
    for (const auto& s : sessions) {
        const int n = (s.close_minute - s.open_minute) / minutes;
        if (minute_of_day < s.open_minute) return base == 0 ? 0 : base - 1;
        if (minute_of_day < s.close_minute) return base + (minute_of_day - s.open_minute) / minutes;
        base += n;
    }
    return base - 1;
}

int SessionSchedule::bin_open_minute(int bin, int minutes) const {
    for (const auto& s : sessions) {
        const int n = (s.close_minute - s.open_minute) / minutes;
        if (bin < n) return s.open_minute + bin * minutes;
        bin -= n;
    }
    throw Error(ErrorKind::invalid_argument, "bin index beyond the trading day");
}

std::string Horizon::label() const {
    return is_daily() ? std::string("daily") : std::to_string(minutes) + "min";
}

std::string format_period(const Period& p, const Horizon& h, const SessionSchedule& s) {
    if (h.is_daily()) return format_date(p.date);
    const int m = s.bin_open_minute(p.bin, h.minutes);
    char buf[32];
    std::snprintf(buf, sizeof buf, "T%02d:%02d", m / 60, m % 60);
    return format_date(p.date) + buf;
}

int PeriodGrid::bins_per_day() const { return horizon.is_daily() ? 1 : schedule.bins_per_day(horizon.minutes); }

std::size_t PeriodGrid::size() const { return calendar.size() * static_cast<std::size_t>(bins_per_day()); }

std::vector<Period> PeriodGrid::periods() const {
    const int bins = bins_per_day();
    std::vector<Period> out;
    out.reserve(size());
    for (const auto& d : calendar)
        for (int b = 0; b < bins; ++b) out.push_back({d, b});
    return out;
}

std::size_t PeriodGrid::index_of(const TradeRecord& trade) const {
    const Date d = trade.date();
    const auto it = std::lower_bound(calendar.begin(), calendar.end(), d);
    if (it == calendar.end() || *it != d)
        throw Error(ErrorKind::misaligned, "trade dated " + format_date(d) + " is outside the calendar");
    const auto day = static_cast<std::size_t>(it - calendar.begin());
    if (horizon.is_daily()) return day;
    const int bins = bins_per_day();
    return day * static_cast<std::size_t>(bins) +
           static_cast<std::size_t>(schedule.bin_of(trade.minute_of_day(), horizon.minutes));
}

std::string PeriodGrid::label(std::size_t index) const {
    const auto bins = static_cast<std::size_t>(bins_per_day());
    return format_period({calendar.at(index / bins), static_cast<int>(index % bins)}, horizon, schedule);
}

std::vector<Date> trading_calendar(std::span<const TradeRecord> trades) {
    std::vector<Date> dates;
    dates.reserve(trades.size() / 8 + 1);
    for (const auto& t : trades) dates.push_back(t.date());
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    return dates;
}

// ---- parsing ----------------------------------------------------------------------

ParsedTrades parse_trades(std::istream& in, const ParseOptions& options) {
    ParsedTrades result;
    auto& report = result.report;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::unordered_map<std::string, InvestorType> known_types;
    std::unordered_map<std::string, Timestamp> last_seen;

    auto reject = [&](std::string reason) {
        if (options.strict)
            throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + reason);
        report.rejected.push_back({line_no, std::move(reason)});
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        view = trim(view);
        if (view.empty()) continue;
        if (!header_seen) {
            if (view != kTradeLogHeader)
                throw Error(ErrorKind::parse, "unexpected trade-log header: '" + std::string(view) + "'");
            header_seen = true;
            continue;
        }
        ++report.rows_read;
        const auto f = split_csv(view);
        if (f.size() != 8) {
            reject("expected 8 fields, found " + std::to_string(f.size()));
            continue;
        }
        TradeRecord rec;
        rec.stock_code = std::string(f[0]);
        rec.buyer_id = std::string(f[2]);
        rec.seller_id = std::string(f[4]);
        const auto ts = parse_timestamp(f[1]);
        const auto bt = parse_investor_type(f[3]);
        const auto st = parse_investor_type(f[5]);
        const auto price = parse_price_ticks(f[6]);
        std::int64_t size = 0;
        const auto [size_end, size_ec] = std::from_chars(f[7].data(), f[7].data() + f[7].size(), size);
        const bool size_ok = !f[7].empty() && size_ec == std::errc{} && size_end == f[7].data() + f[7].size();
        if (rec.stock_code.empty() || rec.buyer_id.empty() || rec.seller_id.empty()) {
            reject("empty identifier");
            continue;
        }
        if (!ts) { reject("bad timestamp '" + std::string(f[1]) + "'"); continue; }
        if (!bt || !st) { reject("investor type must be 'ind' or 'ins'"); continue; }
        if (!price || *price <= 0) { reject("price must be a positive decimal"); continue; }
        if (!size_ok || size <= 0) { reject("size must be a positive integer"); continue; }
        if (rec.buyer_id == rec.seller_id) { reject("buyer and seller are the same investor"); continue; }

        auto conflicts = [&](const std::string& id, InvestorType t) {
            const auto it = known_types.find(id);
            return it != known_types.end() && it->second != t;
        };
        if (conflicts(rec.buyer_id, *bt) || conflicts(rec.seller_id, *st)) {
            reject("investor " + (conflicts(rec.buyer_id, *bt) ? rec.buyer_id : rec.seller_id) + " changes type");
            continue;
        }
        known_types.emplace(rec.buyer_id, *bt);
        known_types.emplace(rec.seller_id, *st);

        rec.timestamp = *ts;
        rec.buyer_type = *bt;
        rec.seller_type = *st;
        rec.price_ticks = *price;
        rec.size = size;

        auto [it, inserted] = last_seen.emplace(rec.stock_code, rec.timestamp);
        if (!inserted) {
            if (rec.timestamp < it->second) ++report.out_of_order;
            else it->second = rec.timestamp;
        }
        result.trades.push_back(std::move(rec));
        ++report.rows_accepted;
    }
    std::stable_sort(result.trades.begin(), result.trades.end(), [](const TradeRecord& a, const TradeRecord& b) {
        if (a.stock_code != b.stock_code) return a.stock_code < b.stock_code;
        return a.timestamp < b.timestamp;
    });
    return result;
}

ParsedTrades parse_trades_file(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_input, "cannot open trade log '" + path + "'", "input");
    return parse_trades(in, options);
}

void write_trades(std::ostream& out, std::span<const TradeRecord> trades) {
    out << kTradeLogHeader << '\n';
    for (const auto& t : trades) {
        out << t.stock_code << ',' << format_timestamp(t.timestamp) << ',' << t.buyer_id << ','
            << to_string(t.buyer_type) << ',' << t.seller_id << ',' << to_string(t.seller_type) << ','
            << format_price_ticks(t.price_ticks) << ',' << t.size << '\n';
    }
}

std::map<std::string, std::span<const TradeRecord>> split_by_stock(std::span<const TradeRecord> sorted_trades) {
    std::map<std::string, std::span<const TradeRecord>> out;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= sorted_trades.size(); ++i) {
        if (i == sorted_trades.size() || sorted_trades[i].stock_code != sorted_trades[begin].stock_code) {
            if (out.contains(sorted_trades[begin].stock_code))
                throw Error(ErrorKind::invalid_argument, "trades are not grouped by stock");
            out.emplace(sorted_trades[begin].stock_code, sorted_trades.subspan(begin, i - begin));
            begin = i;
        }
    }
    return out;
}

// ---- activity filter -------------------------------------------------------------

ProfileMap count_profiles(std::span<const TradeRecord> trades) {
    std::map<std::string, std::unordered_map<std::string, InvestorProfile>> acc;
    for (const auto& t : trades) {
        auto& stock = acc[t.stock_code];
        auto bump = [&](const std::string& id, InvestorType type) {
            auto [it, inserted] = stock.try_emplace(id, InvestorProfile{id, type, 0});
            ++it->second.transaction_count;
        };
        bump(t.buyer_id, t.buyer_type);
        bump(t.seller_id, t.seller_type);
    }
    ProfileMap out;
    for (auto& [code, investors] : acc) {
        auto& list = out[code];
        list.reserve(investors.size());
        for (auto& [id, p] : investors) list.push_back(std::move(p));
        std::sort(list.begin(), list.end(), [](const InvestorProfile& a, const InvestorProfile& b) {
            if (a.transaction_count != b.transaction_count) return a.transaction_count > b.transaction_count;
            return a.investor_id < b.investor_id;
        });
    }
    return out;
}

ProfileMap filter_profiles(const ProfileMap& profiles, const ActivityFilter& filter) {
    if (filter.min_investor_trades == 0 || filter.min_investors_per_stock == 0 || filter.top_k == 0)
        throw Error(ErrorKind::invalid_argument, "activity thresholds must be positive");
    const std::size_t stock_active =
        filter.min_stock_active_trades == 0 ? filter.min_investor_trades : filter.min_stock_active_trades;
    ProfileMap out;
    for (const auto& [code, list] : profiles) {
        const auto active = std::count_if(list.begin(), list.end(), [&](const InvestorProfile& p) {
            return p.transaction_count >= stock_active;
        });
        if (static_cast<std::size_t>(active) < filter.min_investors_per_stock) continue;
        std::vector<InvestorProfile> qualifying;
        for (const auto& p : list)
            if (p.transaction_count >= filter.min_investor_trades) qualifying.push_back(p);
        std::sort(qualifying.begin(), qualifying.end(), [](const InvestorProfile& a, const InvestorProfile& b) {
            if (a.transaction_count != b.transaction_count) return a.transaction_count > b.transaction_count;
            return a.investor_id < b.investor_id;
        });
        if (qualifying.size() > filter.top_k) qualifying.resize(filter.top_k);
        out.emplace(code, std::move(qualifying));
    }
    return out;
}

ProfileMap filter_active(std::span<const TradeRecord> trades, const ActivityFilter& filter) {
    return filter_profiles(count_profiles(trades), filter);
}

// ---- returns ---------------------------------------------------------------------

ReturnSeries price_returns(std::span<const TradeRecord> stock_trades, const PeriodGrid& grid,
                           PriceReference reference) {
    const std::size_t n = grid.size();
    std::vector<double> price(n, 0.0);
    std::vector<bool> traded(n, false);
    std::vector<std::int64_t> value(n, 0), volume(n, 0);
    std::string code;
    for (const auto& t : stock_trades) {
        if (code.empty()) code = t.stock_code;
        else if (t.stock_code != code) throw Error(ErrorKind::invalid_argument, "price_returns expects a single stock");
        const std::size_t k = grid.index_of(t);
        traded[k] = true;
        price[k] = t.price();  // trades are time-ordered, so the last write is the close
        value[k] += t.value_ticks();
        volume[k] += t.size;
    }
    const auto traded_periods = static_cast<std::size_t>(std::count(traded.begin(), traded.end(), true));
    if (traded_periods < 2)
        throw Error(ErrorKind::insufficient_data, "returns need at least two periods with trades");
    if (reference == PriceReference::vwap) {
        for (std::size_t k = 0; k < n; ++k)
            if (traded[k])
                price[k] = static_cast<double>(value[k]) / static_cast<double>(volume[k]) /
                           static_cast<double>(kTicksPerUnit);
    }

    ReturnSeries out;
    out.stock_code = code;
    out.horizon = grid.horizon;
    const auto periods = grid.periods();
    const auto first = static_cast<std::size_t>(std::find(traded.begin(), traded.end(), true) - traded.begin());
    for (std::size_t k = 0; k < n; ++k) {
        if (traded[k]) continue;
        price[k] = k < first ? price[first] : price[k - 1];
        out.carried_forward.push_back(periods[k]);
    }
    out.periods.assign(periods.begin() + 1, periods.end());
    out.raw_return.resize(n - 1);
    for (std::size_t k = 1; k < n; ++k) out.raw_return[k - 1] = std::log(price[k] / price[k - 1]);
    if (stats::is_degenerate(out.raw_return)) {
        out.degenerate = true;
    } else {
        out.normalized_return = stats::standardize(out.raw_return);
    }
    return out;
}

ReturnSeries daily_returns(std::span<const TradeRecord> stock_trades, std::span<const Date> calendar,
                           PriceReference reference) {
    PeriodGrid grid;
    grid.horizon = Horizon::daily();
    grid.calendar = calendar.empty() ? trading_calendar(stock_trades)
                                     : std::vector<Date>(calendar.begin(), calendar.end());
    return price_returns(stock_trades, grid, reference);
}

}  // namespace invcorr
