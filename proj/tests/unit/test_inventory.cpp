#include "support.hpp"

#include "invcorr/inventory.hpp"
#include "invcorr/stats.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <numeric>
#include <sstream>

using namespace invcorr;
using Catch::Approx;
using testing::trade;

namespace {

PeriodGrid grid_for(const std::vector<TradeRecord>& ts, Horizon h) {
    return PeriodGrid{trading_calendar(ts), SessionSchedule{}, h};
}

std::vector<TradeRecord> random_log(std::size_t n, std::size_t investors, std::size_t days, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> who(0, investors - 1), d(0, days - 1);
    std::uniform_int_distribution<int> minute(0, 239), second(0, 59), size(1, 5000);
    std::uniform_int_distribution<std::int64_t> ticks(50'000, 200'000);
    std::vector<TradeRecord> out;
    for (std::size_t k = 0; k < n; ++k) {
        auto b = who(rng), s = who(rng);
        while (s == b) s = who(rng);
        int m = minute(rng);
        m = m < 120 ? 570 + m : 780 + m - 120;
        char when[32];
        std::snprintf(when, sizeof when, "2003-02-%02zuT%02d:%02d:%02d", 3 + d(rng), m / 60, m % 60, second(rng));
        auto t = trade("S", when, "i" + std::to_string(b), "i" + std::to_string(s), 1.0, size(rng));
        t.price_ticks = ticks(rng);
        out.push_back(t);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return out;
}

}  // namespace

TEST_CASE("buy 100 at 10 and sell 50 at 12 nets 400") {
    std::vector<TradeRecord> ts{trade("S", "2003-01-02T09:35:00", "A", "B", 10, 100),
                                trade("S", "2003-01-02T14:00:00", "B", "A", 12, 50),
                                trade("S", "2003-01-03T10:00:00", "B", "C", 11, 10)};
    const auto s = build_inventory(ts, "A", grid_for(ts, Horizon::daily()));
    REQUIRE(s.size() == 2);
    CHECK(s.v[0] == 400.0);
    CHECK(s.cash_ticks[0] == 400 * kTicksPerUnit);
    CHECK(s.v[1] == 0.0);
    CHECK(s.times.size() == s.v.size());
    CHECK(s.V.size() == s.v.size());
}

TEST_CASE("an investor absent from the log is rejected") {
    std::vector<TradeRecord> ts{trade("S", "2003-01-02T09:35:00", "A", "B", 10, 100)};
    CHECK_THROWS_AS(build_inventory(ts, "Z", grid_for(ts, Horizon::daily())), Error);
}

TEST_CASE("inventory matches a per-trade accumulation") {
    const auto ts = random_log(5000, 30, 10, 21);
    const auto grid = grid_for(ts, Horizon::intraday(15));
    const auto cal = trading_calendar(ts);
    for (const std::string id : {"i0", "i7", "i29"}) {
        std::map<std::pair<int, int>, long double> oracle;
        for (const auto& t : ts) {
            const int di = static_cast<int>(std::find(cal.begin(), cal.end(), t.date()) - cal.begin());
            const int m = t.minute_of_day();
            const int bin = m < 690 ? (m - 570) / 15 : 8 + (m - 780) / 15;
            const long double value = static_cast<long double>(t.price()) * t.size;
            if (t.buyer_id == id) oracle[{di, bin}] += value;
            if (t.seller_id == id) oracle[{di, bin}] -= value;
        }
        const auto s = build_inventory(ts, id, grid);
        REQUIRE(s.size() == cal.size() * 16);
        for (std::size_t k = 0; k < s.size(); ++k) {
            const auto it = oracle.find({static_cast<int>(k / 16), static_cast<int>(k % 16)});
            const double want = it == oracle.end() ? 0.0 : static_cast<double>(it->second);
            CHECK(s.v[k] == Approx(want).epsilon(1e-9).margin(1e-9));
        }
    }
}

TEST_CASE("intraday bins respect the midday break and the overnight gap") {
    std::vector<TradeRecord> ts{trade("S", "2003-01-02T11:29:59", "A", "B", 10, 1),
                                trade("S", "2003-01-02T13:00:00", "A", "B", 10, 2),
                                trade("S", "2003-01-02T14:59:00", "A", "B", 10, 3),
                                trade("S", "2003-01-03T09:30:00", "A", "B", 10, 4)};
    const auto s = build_inventory(ts, "A", grid_for(ts, Horizon::intraday(15)));
    REQUIRE(s.size() == 32);
    CHECK(s.v[7] == 10.0);
    CHECK(s.v[8] == 20.0);
    CHECK(s.v[15] == 30.0);
    CHECK(s.v[16] == 40.0);
    CHECK(std::accumulate(s.v.begin(), s.v.end(), 0.0) == 100.0);
}

TEST_CASE("daily inventory equals the resampled 15-minute series") {
    const auto ts = random_log(3000, 20, 8, 5);
    for (const std::string id : {"i1", "i2"}) {
        const auto fine = build_inventory(ts, id, grid_for(ts, Horizon::intraday(15)));
        const auto daily = build_inventory(ts, id, grid_for(ts, Horizon::daily()));
        const auto coarse = resample(fine, 16);
        CHECK(coarse.cash_ticks == daily.cash_ticks);
        CHECK(coarse.v == daily.v);
    }
}

TEST_CASE("all participants retained sum to zero in every period") {
    const auto ts = random_log(2000, 15, 5, 9);
    const auto profiles = count_profiles(ts).at("S");
    const auto panel = build_panel(ts, profiles, grid_for(ts, Horizon::intraday(15)));
    for (std::size_t t = 0; t < panel.times.size(); ++t) {
        std::int64_t sum = 0;
        for (const auto& s : panel.series) sum += s.cash_ticks[t];
        CHECK(sum == 0);
    }
}

TEST_CASE("a partial panel sums to the flow against the others") {
    const auto ts = random_log(2000, 15, 5, 10);
    auto profiles = count_profiles(ts).at("S");
    profiles.resize(6);
    std::set<std::string> kept;
    for (const auto& p : profiles) kept.insert(p.investor_id);
    const auto grid = PeriodGrid{trading_calendar(ts), SessionSchedule{}, Horizon::daily()};
    const auto panel = build_panel(ts, profiles, grid);
    std::vector<std::int64_t> want(grid.size(), 0);
    for (const auto& t : ts) {
        const bool b = kept.contains(t.buyer_id), s = kept.contains(t.seller_id);
        if (b != s) want[grid.index_of(t)] += b ? t.value_ticks() : -t.value_ticks();
    }
    for (std::size_t t = 0; t < grid.size(); ++t) {
        std::int64_t sum = 0;
        for (const auto& s : panel.series) sum += s.cash_ticks[t];
        CHECK(sum == want[t]);
    }
}

TEST_CASE("standardize a three point series") {
    InventorySeries s;
    s.v = {1, 2, 3};
    const auto z = standardize(s);
    const double a = std::sqrt(1.5);
    CHECK(z.V[0] == Approx(-a).epsilon(1e-14));
    CHECK(z.V[1] == Approx(0.0).margin(1e-15));
    CHECK(z.V[2] == Approx(a).epsilon(1e-14));
    CHECK(z.sigma == Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("a constant series is degenerate") {
    InventorySeries s;
    s.v = {5, 5, 5, 5};
    try {
        (void)standardize(s);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate);
    }
    standardize_or_flag(s);
    CHECK(s.degenerate);
    CHECK(s.V.empty());
}

TEST_CASE("a Gaussian series standardizes to zero mean and unit variance") {
    InventorySeries s;
    s.v = testing::normal_draws(237, 77);
    for (auto& x : s.v) x = 1e6 * x + 3e5;
    const auto z = standardize(s);
    CHECK(std::abs(testing::ref_mean(z.V)) < 1e-10);
    CHECK(std::abs(testing::ref_var(z.V) - 1.0) < 1e-10);
    for (std::size_t t = 0; t < s.v.size(); ++t)
        CHECK(z.V[t] == Approx((s.v[t] - testing::ref_mean(s.v)) / std::sqrt(testing::ref_var(s.v))).epsilon(1e-10));
}

TEST_CASE("standardizing twice is the identity") {
    InventorySeries s;
    s.v = testing::normal_draws(100, 3);
    const auto once = standardize(s);
    InventorySeries again;
    again.v = once.V;
    const auto twice = standardize(again);
    for (std::size_t t = 0; t < once.V.size(); ++t) CHECK(twice.V[t] == Approx(once.V[t]).margin(1e-12));
}

TEST_CASE("degenerate series are excluded from the panel matrix") {
    std::vector<TradeRecord> ts{trade("S", "2003-01-02T09:35:00", "A", "B", 10, 100),
                                trade("S", "2003-01-03T09:35:00", "B", "A", 10, 50),
                                trade("S", "2003-01-06T09:35:00", "C", "A", 10, 50),
                                trade("S", "2003-01-06T09:36:00", "D", "C", 10, 50)};
    const auto profiles = count_profiles(ts).at("S");
    const auto panel = build_panel(ts, profiles, grid_for(ts, Horizon::daily()));
    const auto c = std::find_if(panel.series.begin(), panel.series.end(), [](auto& s) { return s.investor_id == "C"; });
    CHECK(c->v == std::vector<double>{0, 0, 0});
    CHECK(c->degenerate);
    CHECK(panel.excluded_degenerate() == 1);
    CHECK(panel.usable().size() == 3);
    const auto X = standardized_matrix(panel.series);
    CHECK(X.cols() == 3);
    CHECK(X.rows() == 3);
}

TEST_CASE("resample sums windows") {
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(resample_sum(v, 2) == std::vector<double>{3, 7});
    CHECK(resample_sum(v, 1) == v);
    CHECK(resample_sum(v, 3) == std::vector<double>{6});
    CHECK_THROWS_AS(resample_sum(v, 5), Error);
    CHECK_THROWS_AS(resample_sum(v, 0), Error);
}

TEST_CASE("resampling conserves cash flow up to the dropped tail") {
    const auto ts = random_log(1500, 10, 7, 31);
    const auto s = build_inventory(ts, "i3", grid_for(ts, Horizon::intraday(15)));
    for (std::size_t f : {1u, 3u, 5u, 16u, 37u}) {
        const auto r = resample(s, f);
        const std::size_t used = r.size() * f;
        const auto total = std::accumulate(s.cash_ticks.begin(), s.cash_ticks.begin() + static_cast<long>(used),
                                           std::int64_t{0});
        CHECK(std::accumulate(r.cash_ticks.begin(), r.cash_ticks.end(), std::int64_t{0}) == total);
        CHECK(r.horizon.minutes == 15 * static_cast<int>(f));
    }
    CHECK(resample(s, 1).cash_ticks == s.cash_ticks);
}

TEST_CASE("panel csv and sidecar") {
    std::vector<TradeRecord> ts{trade("S", "2003-01-02T09:35:00", "A", "B", 10, 100),
                                trade("S", "2003-01-03T09:35:00", "B", "A", 12.5, 10, InvestorType::individual,
                                      InvestorType::individual)};
    const auto profiles = count_profiles(ts).at("S");
    const auto panel = build_panel(ts, profiles, grid_for(ts, Horizon::daily()));
    std::ostringstream out;
    write_panel_csv(out, panel, SessionSchedule{});
    CHECK(out.str() == "period,A,B\n2003-01-02,1000,-1000\n2003-01-03,-125,125\n");
    const auto j = panel_sidecar(panel);
    CHECK(j["investors"].size() == 2);
    CHECK(j["investors"][0]["sigma"].get<double>() == Approx(562.5));
}
