#pragma once

// Configuration and orchestration of the per-stock analysis pipeline.

#include "invcorr/classify.hpp"
#include "invcorr/distfit.hpp"
#include "invcorr/market_data.hpp"
#include "invcorr/spectra.hpp"
#include "invcorr/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace invcorr {

inline constexpr std::string_view kVersion = "0.3.0";

struct PipelineConfig {
    std::vector<std::string> inputs;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    std::vector<std::string> stocks;  // empty: every stock
    unsigned jobs = 1;

    bool strict = false;
    ActivityFilter filter{120, 120, 80, 150};
    SessionSchedule schedule;
    PriceReference price_reference = PriceReference::close;

    std::size_t rolling_window = 5;

    FitRange exp_range = kExpTailRange;
    FitRange power_range = kPowerBulkRange;
    std::size_t exp_bins = 25;
    std::size_t power_bins = 20;
    std::size_t shuffled_bins = 25;
    std::size_t distfit_null_replicas = 100;

    NullMode null_mode = NullMode::trade_shuffle;
    std::size_t null_replicas = 1000;
    double null_quantile = 0.97725;

    std::size_t bootstrap_replicas = 1000;
    std::size_t block_length = 20;
    double lower_quantile = 0.02275;
    double upper_quantile = 0.97725;

    int intraday_minutes = 15;
    std::vector<std::size_t> granger_horizons{1, 2, 4, 8, 16, 32, 80};
    std::size_t max_lag_order = 4;
    double granger_alpha = 0.05;
    std::size_t cvr_bin_horizon = 4;
    std::size_t max_lag = 20;

    double herding_alpha = 0.05;
    CategoryMethod herding_labels = CategoryMethod::threshold;

    PlantedMarketSpec synth;
};

/// Parses and validates a configuration object. Unknown keys and out-of-range values
/// throw ErrorKind::config naming the offending field.
[[nodiscard]] PipelineConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json config_to_json(const PipelineConfig& config);
void validate(const PipelineConfig& config);

inline constexpr std::string_view kSubcommands[] = {"ingest",   "inventory", "xcorr", "distfit",
                                                    "spectra",  "factor",    "classify", "leadlag",
                                                    "herding",  "synth",     "all"};

[[nodiscard]] bool is_subcommand(std::string_view name) noexcept;

struct RunSummary {
    std::vector<std::string> stocks;         // analysed stocks
    std::vector<std::string> skipped;        // stocks dropped by the activity filter or --stocks
    std::vector<std::filesystem::path> outputs;
};

/// Runs one subcommand and writes its files plus manifest.json under output_dir.
[[nodiscard]] RunSummary run(std::string_view subcommand, const PipelineConfig& config);

/// 0 ok, 2 config, 3 missing input, 4 parse, 5 other module errors.
[[nodiscard]] int exit_code(ErrorKind kind) noexcept;
[[nodiscard]] nlohmann::json error_record(const Error& e);

}  // namespace invcorr
