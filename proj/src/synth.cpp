#include "invcorr/synth.hpp"
#include "invcorr/report.hpp"
#include "invcorr/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace invcorr {

namespace {

std::string numbered(std::string_view prefix, std::size_t i, int width = 4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, i);
    return std::string(prefix) + buf;
}

SynthPanel blank_panel(std::size_t n, std::size_t t) {
    SynthPanel p;
    p.V = Matrix::Zero(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(n));
    p.types.assign(n, InvestorType::individual);
    for (std::size_t i = 0; i < n; ++i) p.ids.push_back(numbered("I", i));
    return p;
}

std::vector<double> gaussian_vector(std::size_t n, Rng& rng) {
    std::normal_distribution<double> z;
    std::vector<double> out(n);
    for (auto& x : out) x = z(rng);
    return out;
}

void check_loading(double g, const char* what) {
    if (!(std::abs(g) < 1.0)) throw Error(ErrorKind::invalid_argument, std::string(what) + " loading must satisfy |g| < 1");
}

}  // namespace

std::vector<double> SynthPanel::column(std::size_t i) const {
    const auto c = V.col(static_cast<Eigen::Index>(i));
    return {c.data(), c.data() + c.size()};
}

SynthPanel gen_iid_panel(std::size_t n, std::size_t t, std::uint64_t seed) {
    if (n < 2 || t < 2) throw Error(ErrorKind::invalid_argument, "panel needs N, T >= 2");
    Rng rng(seed);
    auto p = blank_panel(n, t);
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = stats::standardize(gaussian_vector(t, rng));
        p.V.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(t));
    }
    return p;
}

SynthPanel gen_factor_panel(std::span<const double> gammas, std::size_t t, std::uint64_t seed) {
    for (double g : gammas) check_loading(g, "factor");
    if (gammas.empty() || t < 2) throw Error(ErrorKind::invalid_argument, "factor panel needs investors and T >= 2");
    Rng rng(seed);
    auto p = blank_panel(gammas.size(), t);
    p.R = gaussian_vector(t, rng);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const double g = gammas[i];
        const double s = std::sqrt(1.0 - g * g);
        const auto e = gaussian_vector(t, rng);
        for (std::size_t k = 0; k < t; ++k) p.V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = g * p.R[k] + s * e[k];
    }
    return p;
}

SynthPanel gen_two_factor_panel(std::span<const double> a, std::span<const double> b, std::size_t t,
                                std::uint64_t seed) {
    if (a.size() != b.size() || a.empty()) throw Error(ErrorKind::invalid_argument, "loading vectors differ in length");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] * a[i] + b[i] * b[i] < 1.0))
            throw Error(ErrorKind::invalid_argument, "two-factor loadings need a^2 + b^2 < 1");
    Rng rng(seed);
    auto p = blank_panel(a.size(), t);
    p.R = gaussian_vector(t, rng);
    const auto R2 = gaussian_vector(t, rng);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = std::sqrt(1.0 - a[i] * a[i] - b[i] * b[i]);
        const auto e = gaussian_vector(t, rng);
        for (std::size_t k = 0; k < t; ++k)
            p.V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = a[i] * p.R[k] + b[i] * R2[k] + s * e[k];
    }
    return p;
}

SynthPanel gen_leadlag_panel(double beta, std::size_t lag, std::size_t n, std::size_t t, std::uint64_t seed) {
    if (lag < 1) throw Error(ErrorKind::invalid_argument, "lag must be at least 1");
    check_loading(beta, "lead-lag");
    if (n < 1 || t < 2) throw Error(ErrorKind::invalid_argument, "lead-lag panel needs N >= 1 and T >= 2");
    Rng rng(seed);
    auto p = blank_panel(n, t);
    const auto full = gaussian_vector(t + lag, rng);
    p.R.assign(full.begin() + static_cast<std::ptrdiff_t>(lag), full.end());
    const double s = std::sqrt(1.0 - beta * beta);
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = gaussian_vector(t, rng);
        // full[k] is R(k - lag)
        for (std::size_t k = 0; k < t; ++k)
            p.V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = beta * full[k] + s * e[k];
    }
    return p;
}

SynthPanel gen_herding_scenario(const HerdingScenario& sc) {
    if (sc.investors < 1 || sc.days < 1) throw Error(ErrorKind::invalid_argument, "herding scenario needs members and days");
    for (auto d : sc.herd_days)
        if (d >= sc.days) throw Error(ErrorKind::invalid_argument, "herd day beyond the calendar");
    const std::set<std::size_t> herd(sc.herd_days.begin(), sc.herd_days.end());
    Rng rng(sc.seed);
    std::uniform_real_distribution<double> u;
    std::uniform_int_distribution<int> size(1, 1000);
    auto p = blank_panel(sc.investors, sc.days);
    for (std::size_t d = 0; d < sc.days; ++d) {
        for (std::size_t i = 0; i < sc.investors; ++i) {
            double v = 0.0;
            if (herd.contains(d)) {
                v = size(rng);
            } else if (u(rng) < sc.active_probability) {
                v = (u(rng) < 0.5 ? -1.0 : 1.0) * size(rng);
            }
            p.V(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return p;
}

SynthPanel generate_panel(const SynthSpec& spec) {
    SynthPanel p;
    switch (spec.model) {
        case SynthModel::iid_noise: p = gen_iid_panel(spec.n, spec.t, spec.seed); break;
        case SynthModel::one_factor: p = gen_factor_panel(spec.gammas, spec.t, spec.seed); break;
        case SynthModel::two_factor: p = gen_two_factor_panel(spec.gammas, spec.gammas2, spec.t, spec.seed); break;
        case SynthModel::leadlag: p = gen_leadlag_panel(spec.beta, spec.lag, spec.n, spec.t, spec.seed); break;
        case SynthModel::herding_scenario:
            p = gen_herding_scenario(HerdingScenario{spec.n, spec.t, spec.herd_days, 1.0, spec.seed});
            break;
    }
    if (!spec.types.empty()) {
        if (spec.types.size() != p.n()) throw Error(ErrorKind::invalid_argument, "one type per investor expected");
        p.types = spec.types;
    }
    p.V *= spec.noise_scale;
    return p;
}

std::vector<Date> weekday_calendar(Date first, std::size_t days) {
    std::vector<Date> out;
    for (Date d = first; out.size() < days; d += std::chrono::days{1}) {
        const std::chrono::weekday w{d};
        if (w != std::chrono::Saturday && w != std::chrono::Sunday) out.push_back(d);
    }
    return out;
}

InventoryPanel synth_inventory_panel(const SynthPanel& panel, const std::string& stock_code,
                                     std::span<const Date> calendar) {
    if (calendar.size() != panel.t()) throw Error(ErrorKind::misaligned, "calendar length differs from T");
    InventoryPanel out;
    out.stock_code = stock_code;
    out.horizon = Horizon::daily();
    for (auto d : calendar) out.times.push_back(Period{d, 0});
    for (std::size_t i = 0; i < panel.n(); ++i) {
        InventorySeries s;
        s.investor_id = panel.ids[i];
        s.investor_type = panel.types[i];
        s.stock_code = stock_code;
        s.horizon = out.horizon;
        s.times = out.times;
        for (std::size_t k = 0; k < panel.t(); ++k) {
            const double x = panel.V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
            s.cash_ticks.push_back(std::llround(x * static_cast<double>(kTicksPerUnit)));
            s.v.push_back(static_cast<double>(s.cash_ticks.back()) / static_cast<double>(kTicksPerUnit));
        }
        standardize_or_flag(s);
        out.series.push_back(std::move(s));
    }
    return out;
}

// ---- trade logs -------------------------------------------------------------------

namespace {

struct Fill {
    std::size_t investor;
    bool buy;
    std::int64_t shares;
};

// Clock time of the u-th trading second of a day.
Timestamp trading_second(Date day, const SessionSchedule& schedule, long u) {
    for (const auto& s : schedule.sessions) {
        const long len = static_cast<long>(s.close_minute - s.open_minute) * 60;
        if (u < len) return Timestamp{day} + std::chrono::seconds{static_cast<long>(s.open_minute) * 60 + u};
        u -= len;
    }
    throw Error(ErrorKind::invalid_argument, "trading second beyond the session schedule");
}

// Split `total` into `parts` positive integers.
std::vector<std::int64_t> split_shares(std::int64_t total, std::size_t parts, Rng& rng) {
    std::set<std::int64_t> cuts;
    std::uniform_int_distribution<std::int64_t> pick(1, total - 1);
    while (cuts.size() + 1 < parts) cuts.insert(pick(rng));
    std::vector<std::int64_t> out;
    std::int64_t prev = 0;
    for (auto c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    out.push_back(total - prev);
    return out;
}

}  // namespace

std::vector<TradeRecord> gen_trade_log(const TradeLogSpec& spec) {
    const std::size_t P = spec.grid.size();
    if (spec.investors.empty() || P == 0) return {};
    if (spec.price_ticks.size() != P) throw Error(ErrorKind::misaligned, "one price per period expected");
    if (spec.reservoir_trades == 0) throw Error(ErrorKind::invalid_argument, "reservoir_trades must be positive");
    for (auto p : spec.price_ticks)
        if (p <= 0) throw Error(ErrorKind::invalid_argument, "infeasible target: non-positive price");
    for (const auto& inv : spec.investors) {
        if (inv.target_ticks.size() != P) throw Error(ErrorKind::misaligned, "one target per period expected for " + inv.id);
        if (inv.id.starts_with(spec.reservoir_prefix))
            throw Error(ErrorKind::invalid_argument, "investor id collides with the reservoir prefix: " + inv.id);
    }

    Rng rng(spec.seed);
    const auto periods = spec.grid.periods();
    const int bins = spec.grid.bins_per_day();
    const long window = spec.grid.horizon.is_daily() ? static_cast<long>(spec.grid.schedule.total_minutes()) * 60
                                                     : static_cast<long>(spec.grid.horizon.minutes) * 60;

    std::vector<TradeRecord> out;
    std::vector<Fill> fills;
    for (std::size_t p = 0; p < P; ++p) {
        const std::int64_t price = spec.price_ticks[p];
        fills.clear();
        for (std::size_t i = 0; i < spec.investors.size(); ++i) {
            const std::int64_t target = spec.investors[i].target_ticks[p];
            if (target % price != 0)
                throw Error(ErrorKind::invalid_argument, "infeasible target: " + spec.investors[i].id +
                                                             " flow is not a whole number of shares");
            const std::int64_t shares = target / price;
            if (shares == 0) {
                if (!spec.zero_as_pair) continue;
                const std::int64_t q = std::uniform_int_distribution<std::int64_t>(1, 10)(rng) * 100;
                fills.push_back({i, true, q});
                fills.push_back({i, false, q});
                continue;
            }
            const std::int64_t total = std::llabs(shares);
            const auto parts = std::uniform_int_distribution<std::size_t>(
                1, static_cast<std::size_t>(std::min<std::int64_t>(5, total)))(rng);
            for (auto s : split_shares(total, parts, rng)) fills.push_back({i, shares > 0, s});
        }
        std::shuffle(fills.begin(), fills.end(), rng);
        const long u0 = spec.grid.horizon.is_daily() ? 0 : (periods[p].bin % bins) * window;
        for (std::size_t k = 0; k < fills.size(); ++k) {
            const auto& f = fills[k];
            const auto& inv = spec.investors[f.investor];
            TradeRecord t;
            t.stock_code = spec.stock_code;
            t.price_ticks = price;
            t.size = f.shares;
            t.timestamp = trading_second(periods[p].date, spec.grid.schedule,
                                         u0 + static_cast<long>(k) * window / static_cast<long>(fills.size()));
            (f.buy ? t.buyer_id : t.seller_id) = inv.id;
            (f.buy ? t.buyer_type : t.seller_type) = inv.type;
            out.push_back(std::move(t));
        }
    }

    // Reservoir counterparties, at most reservoir_trades each.
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < order.size(); ++k) {
        auto& t = out[order[k]];
        const auto id = spec.reservoir_prefix + spec.stock_code + "-" + numbered("", k / spec.reservoir_trades, 5);
        (t.buyer_id.empty() ? t.buyer_id : t.seller_id) = id;
        (t.buyer_id == id ? t.buyer_type : t.seller_type) = InvestorType::individual;
    }
    return out;
}

PlantedMarket gen_planted_market(const PlantedMarketSpec& spec) {
    if (!(std::abs(spec.gamma) < 1.0)) throw Error(ErrorKind::invalid_argument, "planted gamma must satisfy |g| < 1");
    if (spec.trending_fraction < 0 || spec.reversing_fraction < 0 ||
        spec.trending_fraction + spec.reversing_fraction > 1.0)
        throw Error(ErrorKind::invalid_argument, "category fractions must be non-negative and sum to at most 1");
    if (spec.initial_price < 0.01) throw Error(ErrorKind::invalid_argument, "initial price below one cent");
    if (spec.days < 3 || spec.investors_per_stock < 1)
        throw Error(ErrorKind::invalid_argument, "planted market needs at least 3 days and one investor");

    constexpr std::int64_t cent = kTicksPerUnit / 100;
    const auto calendar = weekday_calendar(spec.first_day, spec.days);
    const PeriodGrid grid{calendar, spec.schedule, spec.horizon};
    const std::size_t P = grid.size();
    const std::size_t N = spec.investors_per_stock;

    PlantedMarket market;
    for (std::size_t s = 0; s < spec.stocks; ++s) {
        Rng rng(replica_seed(spec.seed, s));
        std::normal_distribution<double> z;
        const std::string code = numbered("SYN", s + 1, 3);

        std::vector<std::int64_t> price(P);
        price[0] = std::max<std::int64_t>(cent, std::llround(spec.initial_price * 100.0) * cent);
        std::vector<double> realized(P - 1);
        for (std::size_t t = 1; t < P; ++t) {
            const double next = static_cast<double>(price[t - 1]) * std::exp(spec.return_sd * z(rng));
            price[t] = std::max<std::int64_t>(cent, std::llround(next / static_cast<double>(cent)) * cent);
            realized[t - 1] = std::log(static_cast<double>(price[t]) / static_cast<double>(price[t - 1]));
        }
        const auto R = stats::standardize(realized);

        const auto n_tr = static_cast<std::size_t>(std::llround(spec.trending_fraction * static_cast<double>(N)));
        const auto n_rev = std::min(N - n_tr, static_cast<std::size_t>(std::llround(spec.reversing_fraction * static_cast<double>(N))));
        const auto n_ins = static_cast<std::size_t>(std::llround(spec.institution_fraction * static_cast<double>(N)));
        std::vector<Category> cats(N, Category::uncategorized);
        std::fill_n(cats.begin(), n_tr, Category::trending);
        std::fill_n(cats.begin() + static_cast<std::ptrdiff_t>(n_tr), n_rev, Category::reversing);
        std::shuffle(cats.begin(), cats.end(), rng);

        TradeLogSpec log;
        log.stock_code = code;
        log.grid = grid;
        log.price_ticks = price;
        for (std::size_t i = 0; i < N; ++i) {
            PlantedInvestor inv;
            inv.stock_code = code;
            inv.investor_id = code + "-" + numbered("", i);
            inv.type = i < n_ins ? InvestorType::institution : InvestorType::individual;
            inv.category = cats[i];
            inv.gamma = cats[i] == Category::trending ? spec.gamma : cats[i] == Category::reversing ? -spec.gamma : 0.0;
            const double sd = std::sqrt(1.0 - inv.gamma * inv.gamma);
            inv.target_ticks.resize(P);
            for (std::size_t t = 0; t < P; ++t) {
                const double V = t == 0 ? z(rng) : inv.gamma * R[t - 1] + sd * z(rng);
                const double shares = spec.flow_scale * V / (static_cast<double>(price[t]) / static_cast<double>(kTicksPerUnit));
                inv.target_ticks[t] = std::llround(shares) * price[t];
            }
            log.investors.push_back({inv.investor_id, inv.type, inv.target_ticks});
            market.truth.push_back(std::move(inv));
        }
        log.seed = rng();
        auto trades = gen_trade_log(log);
        market.trades.insert(market.trades.end(), std::make_move_iterator(trades.begin()),
                             std::make_move_iterator(trades.end()));
        market.logs.push_back(std::move(log));
    }
    return market;
}

nlohmann::json planted_truth_json(const PlantedMarket& market) {
    auto investors = nlohmann::json::array();
    for (const auto& inv : market.truth)
        investors.push_back({{"stock", inv.stock_code},
                             {"investor_id", inv.investor_id},
                             {"type", to_string(inv.type)},
                             {"gamma", inv.gamma},
                             {"category", to_string(inv.category)}});
    return {{"investors", investors}, {"trades", market.trades.size()}};
}

}  // namespace invcorr
