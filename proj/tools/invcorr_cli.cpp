#include "invcorr/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

int fail(const nlohmann::json& record, int code) {
    std::cerr << record.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Investor inventory-variation analytics"};
    app.set_version_flag("--version", std::string(invcorr::kVersion));

    std::string command;
    std::vector<std::string> inputs;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> stocks;
    std::optional<unsigned> jobs;
    bool strict = false;

    std::vector<std::string> names(std::begin(invcorr::kSubcommands), std::end(invcorr::kSubcommands));
    app.add_option("command", command, "ingest, inventory, xcorr, distfit, spectra, factor, classify, leadlag, herding, synth or all")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("inputs", inputs, "trade-log CSV files (override config inputs)");
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--stocks", stocks, "restrict to these stock codes")->delimiter(',');
    app.add_option("--jobs", jobs, "worker threads across stocks")->check(CLI::PositiveNumber);
    app.add_flag("--strict", strict, "abort on the first malformed row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fail({{"error", "config"}, {"message", e.what()}, {"exit_code", 2}}, 2);
    }

    try {
        auto config = config_path.empty() ? invcorr::PipelineConfig{} : invcorr::load_config(config_path);
        if (!inputs.empty()) config.inputs = inputs;
        if (seed) config.seed = *seed;
        if (out) config.output_dir = *out;
        if (!stocks.empty()) config.stocks = stocks;
        if (jobs) config.jobs = *jobs;
        if (strict) config.strict = true;

        const auto summary = invcorr::run(command, config);
        std::cout << nlohmann::json{{"status", "ok"},
                                    {"subcommand", command},
                                    {"stocks", summary.stocks},
                                    {"skipped_stocks", summary.skipped},
                                    {"outputs", summary.outputs.size()},
                                    {"output_dir", config.output_dir}}
                         .dump()
                  << '\n';
        return 0;
    } catch (const invcorr::Error& e) {
        return fail(invcorr::error_record(e), invcorr::exit_code(e.kind()));
    } catch (const std::exception& e) {
        return fail({{"error", "internal"}, {"message", e.what()}, {"exit_code", 1}}, 1);
    }
}
