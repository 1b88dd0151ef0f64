#pragma once

// Synthetic panels and trade logs with known ground truth.

#include "invcorr/classify.hpp"
#include "invcorr/inventory.hpp"
#include "invcorr/random.hpp"

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace invcorr {

/// T x N panel (columns are investors) plus the driving return series when the
/// model has one.
struct SynthPanel {
    Matrix V;
    std::vector<double> R;
    std::vector<InvestorType> types;
    std::vector<std::string> ids;

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(V.cols()); }
    [[nodiscard]] std::size_t t() const noexcept { return static_cast<std::size_t>(V.rows()); }
    [[nodiscard]] std::vector<double> column(std::size_t i) const;
};

/// i.i.d. standard Gaussian entries, each column then standardized.
[[nodiscard]] SynthPanel gen_iid_panel(std::size_t n, std::size_t t, std::uint64_t seed);

/// V_i = g_i R + sqrt(1 - g_i^2) e_i with R and e_i i.i.d. standard Gaussian.
[[nodiscard]] SynthPanel gen_factor_panel(std::span<const double> gammas, std::size_t t, std::uint64_t seed);

/// V_i = a_i R1 + b_i R2 + sqrt(1 - a_i^2 - b_i^2) e_i; R holds R1.
[[nodiscard]] SynthPanel gen_two_factor_panel(std::span<const double> a, std::span<const double> b, std::size_t t,
                                              std::uint64_t seed);

/// V_i(t) = beta R(t - lag) + sqrt(1 - beta^2) e_i(t); R is drawn with a burn-in so
/// every V_i(t) has its lagged driver.
[[nodiscard]] SynthPanel gen_leadlag_panel(double beta, std::size_t lag, std::size_t n, std::size_t t,
                                           std::uint64_t seed);

struct HerdingScenario {
    std::size_t investors = 20;
    std::size_t days = 237;
    std::vector<std::size_t> herd_days;  // every member buys on these days
    double active_probability = 1.0;     // chance a member trades on a normal day
    std::uint64_t seed = 0;
};

/// Net flows in currency units: random fair-coin signs, all positive on herd days.
[[nodiscard]] SynthPanel gen_herding_scenario(const HerdingScenario& scenario);

enum class SynthModel { iid_noise, one_factor, two_factor, leadlag, herding_scenario };

struct SynthSpec {
    std::size_t n = 80;
    std::size_t t = 237;
    std::vector<InvestorType> types;  // empty: all individuals
    SynthModel model = SynthModel::iid_noise;
    std::vector<double> gammas;       // one_factor, and first loading of two_factor
    std::vector<double> gammas2;      // second loading of two_factor
    double beta = 0.0;
    std::size_t lag = 1;
    std::vector<std::size_t> herd_days;
    double noise_scale = 1.0;         // multiplies every generated V
    std::uint64_t seed = 0;
};

[[nodiscard]] SynthPanel generate_panel(const SynthSpec& spec);

/// Weekdays starting at `first`.
[[nodiscard]] std::vector<Date> weekday_calendar(Date first, std::size_t days);

/// Daily InventoryPanel holding the panel values as net cash flows (rounded to ticks).
[[nodiscard]] InventoryPanel synth_inventory_panel(const SynthPanel& panel, const std::string& stock_code,
                                                   std::span<const Date> calendar);

// ---- trade logs -------------------------------------------------------------------

struct TradeLogInvestor {
    std::string id;
    InvestorType type = InvestorType::individual;
    std::vector<std::int64_t> target_ticks;  // net cash flow per grid period
};

struct TradeLogSpec {
    std::string stock_code;
    PeriodGrid grid;
    std::vector<std::int64_t> price_ticks;   // one price per grid period
    std::vector<TradeLogInvestor> investors;
    std::size_t reservoir_trades = 20;       // trades per reservoir counterparty
    std::string reservoir_prefix = "X";
    bool zero_as_pair = true;                // zero target -> buy and sell of equal size
    std::uint64_t seed = 0;
};

/// Trades whose per-period aggregation reproduces every target exactly. Each nonzero
/// target is split into 1-5 trades at the period's price against reservoir
/// counterparties. Throws when a price is not positive or a target is not a whole
/// number of shares.
[[nodiscard]] std::vector<TradeRecord> gen_trade_log(const TradeLogSpec& spec);

struct PlantedMarketSpec {
    std::size_t stocks = 2;
    std::size_t investors_per_stock = 120;
    double institution_fraction = 0.25;
    std::size_t days = 237;
    Horizon horizon = Horizon::daily();
    SessionSchedule schedule;
    double gamma = 0.3;                 // planted |gamma|
    double trending_fraction = 0.5;     // of investors, +gamma
    double reversing_fraction = 0.5;    // of investors, -gamma; the rest load zero
    double initial_price = 10.0;
    double return_sd = 0.02;
    double flow_scale = 1.0e5;          // currency units per unit V
    Date first_day = Date{std::chrono::year{2003} / 1 / 2};
    std::uint64_t seed = 0;
};

struct PlantedInvestor {
    std::string stock_code;
    std::string investor_id;
    InvestorType type = InvestorType::individual;
    double gamma = 0.0;
    Category category = Category::uncategorized;
    std::vector<std::int64_t> target_ticks;
};

struct PlantedMarket {
    std::vector<TradeRecord> trades;  // sorted by stock then time
    std::vector<PlantedInvestor> truth;
    std::vector<TradeLogSpec> logs;
};

/// Cent-rounded log-normal price paths; V_i = gamma_i R + sqrt(1 - gamma_i^2) e_i
/// against the standardized realized returns; net shares round(flow_scale V / p).
[[nodiscard]] PlantedMarket gen_planted_market(const PlantedMarketSpec& spec);

[[nodiscard]] nlohmann::json planted_truth_json(const PlantedMarket& market);

}  // namespace invcorr
