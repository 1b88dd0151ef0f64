#include "invcorr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace invcorr {

using nlohmann::json;

namespace {

class Reader {
public:
    Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
        if (!j_.is_object()) throw Error(ErrorKind::config, "expected an object", prefix_.empty() ? "<root>" : prefix_);
    }

    [[nodiscard]] std::string field(std::string_view key) const {
        return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
    }

    const json* find(const char* key) {
        const auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    void count(const char* key, std::size_t& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
            out = v->get<std::size_t>();
        }
    }
    void u64(const char* key, std::uint64_t& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void integer(const char* key, int& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) fail(key, "expected an integer");
            out = v->get<int>();
        }
    }
    void real(const char* key, double& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) fail(key, "expected a number");
            out = v->get<double>();
        }
    }
    void boolean(const char* key, bool& out) {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) fail(key, "expected true or false");
            out = v->get<bool>();
        }
    }
    void text(const char* key, std::string& out) {
        if (const auto* v = find(key)) {
            if (!v->is_string()) fail(key, "expected a string");
            out = v->get<std::string>();
        }
    }
    void strings(const char* key, std::vector<std::string>& out) {
        if (const auto* v = find(key)) {
            if (!v->is_array()) fail(key, "expected an array of strings");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_string()) fail(key, "expected an array of strings");
                out.push_back(e.get<std::string>());
            }
        }
    }
    void counts(const char* key, std::vector<std::size_t>& out) {
        if (const auto* v = find(key)) {
            if (!v->is_array()) fail(key, "expected an array of integers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_unsigned()) fail(key, "expected an array of non-negative integers");
                out.push_back(e.get<std::size_t>());
            }
        }
    }
    void range(const char* key, FitRange& out) {
        if (const auto* v = find(key)) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                fail(key, "expected [lo, hi]");
            out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
        }
    }

    [[noreturn]] void fail(std::string_view key, const std::string& why) const {
        throw Error(ErrorKind::config, why, field(key));
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.contains(k)) throw Error(ErrorKind::config, "unknown key", field(k));
    }

private:
    const json& j_;
    std::string prefix_;
    std::set<std::string> seen_;
};

int parse_clock(const std::string& s, const std::string& field) {
    int h = 0, m = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || h > 23 || m < 0 || m > 59)
        throw Error(ErrorKind::config, "expected HH:MM, got '" + s + "'", field);
    return h * 60 + m;
}

std::string clock(int minute) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

template <class Section>
void section(Reader& parent, const char* key, Section&& body) {
    if (const auto* v = parent.find(key)) {
        Reader r(*v, parent.field(key));
        body(r);
        r.finish();
    }
}

[[noreturn]] void bad(const std::string& field, const std::string& why) { throw Error(ErrorKind::config, why, field); }

}  // namespace

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    Reader root(j, "");
    root.strings("inputs", c.inputs);
    root.text("output_dir", c.output_dir);
    root.u64("seed", c.seed);
    root.strings("stocks", c.stocks);
    {
        std::size_t jobs = c.jobs;
        root.count("jobs", jobs);
        c.jobs = static_cast<unsigned>(jobs);
    }
    section(root, "ingest", [&](Reader& r) { r.boolean("strict", c.strict); });
    section(root, "filter", [&](Reader& r) {
        r.count("min_investor_trades", c.filter.min_investor_trades);
        r.count("min_investors_per_stock", c.filter.min_investors_per_stock);
        r.count("top_k", c.filter.top_k);
        r.count("stock_active_trades", c.filter.min_stock_active_trades);
    });
    if (const auto* s = root.find("sessions")) {
        if (!s->is_array() || s->empty()) bad("sessions", "expected a non-empty array of [open, close] pairs");
        c.schedule.sessions.clear();
        for (std::size_t i = 0; i < s->size(); ++i) {
            const auto& p = (*s)[i];
            const std::string f = "sessions[" + std::to_string(i) + "]";
            if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
                bad(f, "expected [\"HH:MM\", \"HH:MM\"]");
            c.schedule.sessions.push_back({parse_clock(p[0].get<std::string>(), f), parse_clock(p[1].get<std::string>(), f)});
        }
    }
    section(root, "returns", [&](Reader& r) {
        std::string ref = c.price_reference == PriceReference::close ? "close" : "vwap";
        r.text("reference", ref);
        if (ref == "close") c.price_reference = PriceReference::close;
        else if (ref == "vwap") c.price_reference = PriceReference::vwap;
        else r.fail("reference", "expected \"close\" or \"vwap\"");
    });
    section(root, "xcorr", [&](Reader& r) { r.count("rolling_window", c.rolling_window); });
    section(root, "distfit", [&](Reader& r) {
        r.range("exp_range", c.exp_range);
        r.range("power_range", c.power_range);
        r.count("exp_bins", c.exp_bins);
        r.count("power_bins", c.power_bins);
        r.count("shuffled_bins", c.shuffled_bins);
        r.count("null_replicas", c.distfit_null_replicas);
    });
    section(root, "spectra", [&](Reader& r) {
        std::string mode = c.null_mode == NullMode::trade_shuffle ? "trade_shuffle" : "series_permute";
        r.text("null_mode", mode);
        if (mode == "trade_shuffle") c.null_mode = NullMode::trade_shuffle;
        else if (mode == "series_permute") c.null_mode = NullMode::series_permute;
        else r.fail("null_mode", "expected \"trade_shuffle\" or \"series_permute\"");
        r.count("replicas", c.null_replicas);
        r.real("quantile", c.null_quantile);
    });
    section(root, "classify", [&](Reader& r) {
        r.count("bootstrap_replicas", c.bootstrap_replicas);
        r.count("block_length", c.block_length);
        r.real("lower_quantile", c.lower_quantile);
        r.real("upper_quantile", c.upper_quantile);
    });
    section(root, "leadlag", [&](Reader& r) {
        r.integer("intraday_minutes", c.intraday_minutes);
        r.counts("horizons", c.granger_horizons);
        r.count("max_lag_order", c.max_lag_order);
        r.real("alpha", c.granger_alpha);
        r.count("cvr_bin_horizon", c.cvr_bin_horizon);
        r.count("max_lag", c.max_lag);
    });
    section(root, "herding", [&](Reader& r) {
        r.real("alpha", c.herding_alpha);
        std::string labels = c.herding_labels == CategoryMethod::threshold ? "threshold" : "bootstrap";
        r.text("labels", labels);
        if (labels == "threshold") c.herding_labels = CategoryMethod::threshold;
        else if (labels == "bootstrap") c.herding_labels = CategoryMethod::bootstrap;
        else r.fail("labels", "expected \"threshold\" or \"bootstrap\"");
    });
    section(root, "synth", [&](Reader& r) {
        auto& s = c.synth;
        r.count("stocks", s.stocks);
        r.count("investors_per_stock", s.investors_per_stock);
        r.real("institution_fraction", s.institution_fraction);
        r.count("days", s.days);
        int minutes = s.horizon.minutes;
        r.integer("horizon_minutes", minutes);
        s.horizon = Horizon{minutes};
        r.real("gamma", s.gamma);
        r.real("trending_fraction", s.trending_fraction);
        r.real("reversing_fraction", s.reversing_fraction);
        r.real("initial_price", s.initial_price);
        r.real("return_sd", s.return_sd);
        r.real("flow_scale", s.flow_scale);
        std::string first = format_date(s.first_day);
        r.text("first_day", first);
        const auto d = parse_date(first);
        if (!d) r.fail("first_day", "expected YYYY-MM-DD");
        s.first_day = *d;
    });
    root.finish();
    c.synth.schedule = c.schedule;
    validate(c);
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_input, "cannot open config " + path.string(), "--config");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what(), "--config");
    }
    return config_from_json(j);
}

void validate(const PipelineConfig& c) {
    auto positive = [](std::size_t v, const char* field) {
        if (v == 0) bad(field, "must be positive");
    };
    auto probability = [](double v, const char* field) {
        if (!(v > 0.0 && v < 1.0)) bad(field, "must lie in (0, 1)");
    };
    if (c.jobs == 0) bad("jobs", "must be positive");
    positive(c.filter.min_investor_trades, "filter.min_investor_trades");
    positive(c.filter.min_investors_per_stock, "filter.min_investors_per_stock");
    positive(c.filter.top_k, "filter.top_k");

    int prev_close = -1;
    for (std::size_t i = 0; i < c.schedule.sessions.size(); ++i) {
        const auto& s = c.schedule.sessions[i];
        if (s.open_minute >= s.close_minute || s.open_minute < prev_close)
            bad("sessions[" + std::to_string(i) + "]", "sessions must be increasing and non-overlapping");
        prev_close = s.close_minute;
    }
    if (c.rolling_window < 3) bad("xcorr.rolling_window", "must be at least 3");

    if (!(c.exp_range.lo >= 0.0 && c.exp_range.lo < c.exp_range.hi && c.exp_range.hi <= 1.0))
        bad("distfit.exp_range", "needs 0 <= lo < hi <= 1");
    if (!(c.power_range.lo > 0.0 && c.power_range.lo < c.power_range.hi && c.power_range.hi <= 1.0))
        bad("distfit.power_range", "needs 0 < lo < hi <= 1");
    if (c.exp_bins < 3) bad("distfit.exp_bins", "must be at least 3");
    if (c.power_bins < 3) bad("distfit.power_bins", "must be at least 3");
    if (c.shuffled_bins < 3) bad("distfit.shuffled_bins", "must be at least 3");
    if (c.distfit_null_replicas < 100) bad("distfit.null_replicas", "must be at least 100");

    if (c.null_replicas < 100) bad("spectra.replicas", "must be at least 100");
    probability(c.null_quantile, "spectra.quantile");

    positive(c.bootstrap_replicas, "classify.bootstrap_replicas");
    positive(c.block_length, "classify.block_length");
    probability(c.lower_quantile, "classify.lower_quantile");
    probability(c.upper_quantile, "classify.upper_quantile");
    if (c.lower_quantile >= c.upper_quantile) bad("classify.lower_quantile", "must be below upper_quantile");

    if (c.intraday_minutes <= 0) bad("leadlag.intraday_minutes", "must be positive");
    for (const auto& s : c.schedule.sessions)
        if ((s.close_minute - s.open_minute) % c.intraday_minutes != 0)
            bad("leadlag.intraday_minutes", "must divide every session length");
    if (c.granger_horizons.empty()) bad("leadlag.horizons", "must not be empty");
    for (auto h : c.granger_horizons)
        if (h == 0) bad("leadlag.horizons", "horizons must be positive");
    positive(c.max_lag_order, "leadlag.max_lag_order");
    probability(c.granger_alpha, "leadlag.alpha");
    positive(c.cvr_bin_horizon, "leadlag.cvr_bin_horizon");
    positive(c.max_lag, "leadlag.max_lag");

    probability(c.herding_alpha, "herding.alpha");

    const auto& s = c.synth;
    positive(s.stocks, "synth.stocks");
    positive(s.investors_per_stock, "synth.investors_per_stock");
    if (s.days < 3) bad("synth.days", "must be at least 3");
    if (!(s.institution_fraction >= 0.0 && s.institution_fraction <= 1.0))
        bad("synth.institution_fraction", "must lie in [0, 1]");
    if (s.horizon.minutes < 0) bad("synth.horizon_minutes", "must be 0 (daily) or positive");
    if (!s.horizon.is_daily())
        for (const auto& sess : c.schedule.sessions)
            if ((sess.close_minute - sess.open_minute) % s.horizon.minutes != 0)
                bad("synth.horizon_minutes", "must divide every session length");
    if (!(std::abs(s.gamma) < 1.0)) bad("synth.gamma", "must satisfy |gamma| < 1");
    if (s.trending_fraction < 0.0 || s.reversing_fraction < 0.0 || s.trending_fraction + s.reversing_fraction > 1.0)
        bad("synth.trending_fraction", "category fractions must be non-negative and sum to at most 1");
    if (!(s.initial_price >= 0.01)) bad("synth.initial_price", "must be at least 0.01");
    if (!(s.return_sd >= 0.0)) bad("synth.return_sd", "must be non-negative");
    if (!(s.flow_scale > 0.0)) bad("synth.flow_scale", "must be positive");
}

json config_to_json(const PipelineConfig& c) {
    json sessions = json::array();
    for (const auto& s : c.schedule.sessions) sessions.push_back({clock(s.open_minute), clock(s.close_minute)});
    return {
        {"inputs", c.inputs},
        {"output_dir", c.output_dir},
        {"seed", c.seed},
        {"stocks", c.stocks},
        {"jobs", c.jobs},
        {"ingest", {{"strict", c.strict}}},
        {"filter",
         {{"min_investor_trades", c.filter.min_investor_trades},
          {"min_investors_per_stock", c.filter.min_investors_per_stock},
          {"top_k", c.filter.top_k},
          {"stock_active_trades", c.filter.min_stock_active_trades}}},
        {"sessions", sessions},
        {"returns", {{"reference", c.price_reference == PriceReference::close ? "close" : "vwap"}}},
        {"xcorr", {{"rolling_window", c.rolling_window}}},
        {"distfit",
         {{"exp_range", {c.exp_range.lo, c.exp_range.hi}},
          {"power_range", {c.power_range.lo, c.power_range.hi}},
          {"exp_bins", c.exp_bins},
          {"power_bins", c.power_bins},
          {"shuffled_bins", c.shuffled_bins},
          {"null_replicas", c.distfit_null_replicas}}},
        {"spectra",
         {{"null_mode", c.null_mode == NullMode::trade_shuffle ? "trade_shuffle" : "series_permute"},
          {"replicas", c.null_replicas},
          {"quantile", c.null_quantile}}},
        {"classify",
         {{"bootstrap_replicas", c.bootstrap_replicas},
          {"block_length", c.block_length},
          {"lower_quantile", c.lower_quantile},
          {"upper_quantile", c.upper_quantile}}},
        {"leadlag",
         {{"intraday_minutes", c.intraday_minutes},
          {"horizons", c.granger_horizons},
          {"max_lag_order", c.max_lag_order},
          {"alpha", c.granger_alpha},
          {"cvr_bin_horizon", c.cvr_bin_horizon},
          {"max_lag", c.max_lag}}},
        {"herding",
         {{"alpha", c.herding_alpha},
          {"labels", c.herding_labels == CategoryMethod::threshold ? "threshold" : "bootstrap"}}},
        {"synth",
         {{"stocks", c.synth.stocks},
          {"investors_per_stock", c.synth.investors_per_stock},
          {"institution_fraction", c.synth.institution_fraction},
          {"days", c.synth.days},
          {"horizon_minutes", c.synth.horizon.minutes},
          {"gamma", c.synth.gamma},
          {"trending_fraction", c.synth.trending_fraction},
          {"reversing_fraction", c.synth.reversing_fraction},
          {"initial_price", c.synth.initial_price},
          {"return_sd", c.synth.return_sd},
          {"flow_scale", c.synth.flow_scale},
          {"first_day", format_date(c.synth.first_day)}}},
    };
}

bool is_subcommand(std::string_view name) noexcept {
    return std::find(std::begin(kSubcommands), std::end(kSubcommands), name) != std::end(kSubcommands);
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return 2;
        case ErrorKind::missing_input: return 3;
        case ErrorKind::parse: return 4;
        default: return 5;
    }
}

json error_record(const Error& e) {
    json j{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}, {"exit_code", exit_code(e.kind())}};
    if (!e.field().empty()) j["field"] = e.field();
    return j;
}

}  // namespace invcorr
