#include "invcorr/pipeline.hpp"
#include "invcorr/factor.hpp"
#include "invcorr/herding.hpp"
#include "invcorr/inventory.hpp"
#include "invcorr/leadlag.hpp"
#include "invcorr/parallel.hpp"
#include "invcorr/report.hpp"
#include "invcorr/stats.hpp"
#include "invcorr/xcorr.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace invcorr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Stage : unsigned {
    kPanel = 1u << 0,
    kCorr = 1u << 1,
    kNull = 1u << 2,
    kDistNull = 1u << 3,
    kFactor = 1u << 4,
    kClassify = 1u << 5,
    kHerding = 1u << 6,
    kLeadlag = 1u << 7,
};

unsigned stages_for(std::string_view sub) {
    if (sub == "ingest") return 0;
    if (sub == "inventory") return kPanel;
    if (sub == "xcorr") return kPanel | kCorr;
    if (sub == "distfit") return kPanel | kCorr | kDistNull;
    if (sub == "spectra") return kPanel | kCorr | kNull;
    if (sub == "factor") return kPanel | kCorr | kFactor;
    if (sub == "classify") return kPanel | kClassify;
    if (sub == "leadlag") return kPanel | kClassify | kLeadlag;
    if (sub == "herding") return kPanel | kClassify | kHerding;
    return kPanel | kCorr | kNull | kDistNull | kFactor | kClassify | kHerding | kLeadlag;
}

// Output files are collected per writer and merged once all stocks are done.
class Outputs {
public:
    explicit Outputs(fs::path root) : root_(std::move(root)) {}

    void write(const fs::path& rel, std::string_view content) {
        write_text_file(root_ / rel, content);
        written_.push_back(rel);
    }
    void write_json(const fs::path& rel, const json& j) { write(rel, j.dump(2) + "\n"); }
    void absorb(const Outputs& other) { written_.insert(written_.end(), other.written_.begin(), other.written_.end()); }

    [[nodiscard]] const fs::path& root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<fs::path>& written() const noexcept { return written_; }

private:
    fs::path root_;
    std::vector<fs::path> written_;
};

struct InvestorLabel {
    std::string investor_id;
    InvestorType type = InvestorType::individual;
    double cvr = 0.0;
    std::size_t n_t = 0;
    Category threshold = Category::uncategorized;
    BootstrapOutcome bootstrap;
};

struct StockResult {
    std::string code;
    std::optional<CorrelationMatrix> corr;
    std::vector<double> null_coefficients;
    std::vector<InvestorLabel> labels;
    std::optional<TypeSlopes> slopes;
    std::optional<HerdingReport> herding;
    std::vector<IndicatorRecord> indicators;
    std::vector<LaggedCorrelation> autocorr;
    std::vector<LaggedCorrelation> crosscorr;
    std::vector<std::string> lag_keys;
    std::vector<std::string> notes;
    Outputs files;
};

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string out;
    for (const auto& c : cells) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out + '\n';
}

std::string category_name(Category c) { return std::string(to_string(c)); }
std::string type_name(InvestorType t) { return std::string(to_string(t)); }
std::string num(double x) { return format_number(x); }
std::string num(std::size_t x) { return std::to_string(x); }

json profile_report(const std::string& code, const std::vector<InvestorProfile>& all,
                    const std::vector<InvestorProfile>* retained) {
    std::set<std::string> kept;
    if (retained)
        for (const auto& p : *retained) kept.insert(p.investor_id);
    json investors = json::array();
    for (const auto& p : all)
        investors.push_back({{"investor_id", p.investor_id},
                             {"type", type_name(p.investor_type)},
                             {"transactions", p.transaction_count},
                             {"retained", kept.contains(p.investor_id)}});
    return {{"stock", code}, {"retained", retained != nullptr}, {"investors", investors}};
}

Matrix rows_from(const Matrix& m, Eigen::Index first) { return m.bottomRows(m.rows() - first); }

void analyse_stock(StockResult& out, std::span<const TradeRecord> trades, const std::vector<InvestorProfile>& investors,
                   const PipelineConfig& cfg, unsigned stages, bool emit_all, std::string_view sub) {
    const auto& code = out.code;
    const fs::path dir = code;
    const std::uint64_t stock_seed = derive_seed(cfg.seed, code);
    auto emits = [&](std::string_view module) { return emit_all || sub == module; };

    const auto calendar = trading_calendar(trades);
    const PeriodGrid daily_grid{calendar, cfg.schedule, Horizon::daily()};
    const auto panel = build_panel(trades, investors, daily_grid);
    const auto usable = panel.usable();
    for (const auto& s : panel.series)
        if (s.degenerate) out.notes.push_back(s.investor_id + ": constant daily inventory variation, excluded");

    if (emits("inventory")) {
        std::ostringstream csv;
        write_panel_csv(csv, panel, cfg.schedule);
        out.files.write(dir / "inventory_daily.csv", csv.str());
        out.files.write_json(dir / "inventory_daily.json", panel_sidecar(panel));
        const PeriodGrid grid{calendar, cfg.schedule, Horizon::intraday(cfg.intraday_minutes)};
        const auto intraday = build_panel(trades, investors, grid);
        std::ostringstream icsv;
        write_panel_csv(icsv, intraday, cfg.schedule);
        const std::string label = grid.horizon.label();
        out.files.write(dir / ("inventory_" + label + ".csv"), icsv.str());
        out.files.write_json(dir / ("inventory_" + label + ".json"), panel_sidecar(intraday));
    }

    std::optional<SpectralResult> spectrum;
    if (stages & (kCorr | kNull | kDistNull | kFactor)) {
        out.corr = correlation_matrix(usable);
        if (emits("xcorr")) {
            std::ostringstream csv;
            write_matrix_csv(csv, out.corr->labels, out.corr->values);
            out.files.write(dir / "correlation_matrix.csv", csv.str());
            std::string roll = "end_period,mean,series_used,series_dropped\n";
            for (const auto& p : rolling_mean_correlation(usable, cfg.rolling_window))
                roll += csv_row({format_date(panel.times[p.end_index].date), num(p.mean), num(p.series_used),
                                 num(p.series_dropped)});
            out.files.write(dir / "rolling_mean_correlation.csv", roll);
        }
    }
    const Matrix Z = (stages & (kNull | kDistNull | kFactor)) ? standardized_matrix(usable) : Matrix();

    if (stages & (kNull | kFactor)) spectrum = eigendecompose(*out.corr);
    if (stages & kNull) {
        std::vector<InvestorProfile> kept;
        for (const auto& s : usable) kept.push_back({s.investor_id, s.investor_type, 0});
        const TradeLevelData tld{trades, kept, daily_grid};
        NullOptions opts;
        opts.replicas = cfg.null_replicas;
        opts.seed = derive_seed(stock_seed, "spectra-null");
        opts.quantile = cfg.null_quantile;
        const auto null = shuffle_null(Z, &tld, cfg.null_mode, opts);
        spectrum->null_threshold = null.threshold;
        if (emits("spectra")) {
            auto j = spectrum_json(*spectrum);
            j["stock"] = code;
            j["T"] = out.corr->T;
            j["N"] = out.corr->size();
            j["null_mode"] = cfg.null_mode == NullMode::trade_shuffle ? "trade_shuffle" : "series_permute";
            j["null_replicas"] = cfg.null_replicas;
            out.files.write_json(dir / "spectrum.json", j);
            out.files.write(dir / "null_largest_eigenvalue.csv", one_column_csv("lambda_max", null.largest));
        }
    }
    if (stages & kDistNull) {
        NullOptions opts;
        opts.replicas = cfg.distfit_null_replicas;
        opts.seed = derive_seed(stock_seed, "distfit-null");
        opts.collect_coefficients = true;
        out.null_coefficients = shuffle_null(Z, nullptr, NullMode::series_permute, opts).coefficients;
    }

    std::optional<ReturnSeries> returns;
    if (stages & (kFactor | kClassify)) {
        returns = price_returns(trades, daily_grid, cfg.price_reference);
        if (returns->degenerate) throw Error(ErrorKind::degenerate, "daily returns are constant");
    }

    if (stages & kFactor) {
        const auto& R = returns->normalized_return;
        const Matrix V = rows_from(Z, 1);
        const Vector u1 = spectrum->eigenvectors.col(0);
        std::vector<InvestorType> types;
        for (const auto& t : out.corr->types) types.push_back(t);
        out.slopes = type_slopes(V, u1, types, R);
        if (emits("factor")) {
            const auto G = project_factor(V, u1, types, FactorSubset::all, out.slopes->orientation_sign);
            std::string csv = "period,G,R\n";
            for (std::size_t t = 0; t < G.G.size(); ++t)
                csv += csv_row({format_date(returns->periods[t].date), num(G.G[t]), num(R[t])});
            out.files.write(dir / "factor_projection.csv", csv);
        }
    }

    if (stages & kClassify) {
        const auto& R = returns->normalized_return;
        BootstrapOptions bo{cfg.bootstrap_replicas, cfg.block_length, cfg.lower_quantile, cfg.upper_quantile, 0};
        for (const auto& s : usable) {
            const std::span<const double> V(s.V.data() + 1, s.V.size() - 1);
            InvestorLabel l;
            l.investor_id = s.investor_id;
            l.type = s.investor_type;
            l.n_t = V.size();
            l.cvr = corr_with_return(V, R);
            l.threshold = threshold_categorize(l.cvr, l.n_t);
            bo.seed = derive_seed(stock_seed, "bootstrap:" + s.investor_id);
            l.bootstrap = bootstrap_categorize(V, R, bo);
            out.labels.push_back(std::move(l));
        }
        if (emits("classify")) {
            std::string csv = "investor_id,type,C_VR,threshold_label,bootstrap_label,bootstrap_lower,bootstrap_upper\n";
            for (const auto& l : out.labels)
                csv += csv_row({l.investor_id, type_name(l.type), num(l.cvr), category_name(l.threshold),
                                category_name(l.bootstrap.label), num(l.bootstrap.lower), num(l.bootstrap.upper)});
            out.files.write(dir / "categories.csv", csv);
        }
    }

    std::map<std::string, Category> chosen;
    for (const auto& l : out.labels)
        chosen[l.investor_id] = cfg.herding_labels == CategoryMethod::threshold ? l.threshold : l.bootstrap.label;

    if (stages & kHerding) {
        out.herding = herding_day_counts(panel, chosen, cfg.herding_alpha);
        if (emits("herding")) {
            std::ostringstream csv;
            write_herding_days(csv, *out.herding);
            out.files.write(dir / "herding_days.csv", csv.str());
        }
    }

    if (stages & kLeadlag) {
        const PeriodGrid grid{calendar, cfg.schedule, Horizon::intraday(cfg.intraday_minutes)};
        const auto ipanel = build_panel(trades, investors, grid);
        const auto iret = price_returns(trades, grid, cfg.price_reference);
        if (iret.degenerate) {
            out.notes.push_back("intraday returns are constant; lead-lag analysis skipped");
            return;
        }
        const auto& R = iret.raw_return;
        std::string csv = "investor_id,type,category,direction,dT,p,F,p_value,I\n";
        const GrangerOptions go{cfg.max_lag_order, cfg.granger_alpha};
        for (const auto& s : ipanel.series) {
            const auto label = std::find_if(out.labels.begin(), out.labels.end(),
                                            [&](const InvestorLabel& l) { return l.investor_id == s.investor_id; });
            if (label == out.labels.end()) continue;
            if (s.degenerate) {
                out.notes.push_back(s.investor_id + ": constant intraday inventory variation, lead-lag skipped");
                continue;
            }
            const Category cat = chosen.at(s.investor_id);
            const std::span<const double> V(s.v.data() + 1, s.v.size() - 1);
            if (s.v.size() > 2 * cfg.max_lag && V.size() >= cfg.max_lag + 3) {
                for (const std::string& pop : {std::string("all"), type_name(s.investor_type)}) {
                    out.autocorr.push_back(autocorrelation(s.v, cfg.max_lag));
                    out.crosscorr.push_back(lagged_crosscorrelation(V, R, cfg.max_lag));
                    out.lag_keys.push_back(category_name(cat) + "/" + pop);
                }
            }
            for (auto dT : cfg.granger_horizons) {
                if (V.size() / dT < 20 + 2 * cfg.max_lag_order) {
                    if (s.investor_id == ipanel.series.front().investor_id)
                        out.notes.push_back("horizon dT=" + std::to_string(dT) + " too long for the sample, skipped");
                    continue;
                }
                for (auto dir_ : {CausalDirection::v_to_r, CausalDirection::r_to_v}) {
                    IndicatorRecord rec;
                    rec.investor_id = s.investor_id;
                    rec.investor_type = s.investor_type;
                    rec.category = cat;
                    rec.cvr = label->cvr;
                    rec.n_t = label->n_t;
                    rec.direction = dir_;
                    rec.result = dir_ == CausalDirection::v_to_r ? granger_indicator(V, R, dT, go)
                                                                 : granger_indicator(R, V, dT, go);
                    csv += csv_row({s.investor_id, type_name(s.investor_type), category_name(cat),
                                    std::string(to_string(dir_)), num(dT), num(rec.result.lag_order),
                                    num(rec.result.f_statistic), num(rec.result.p_value),
                                    rec.result.indicator ? "1" : "0"});
                    out.indicators.push_back(std::move(rec));
                }
            }
        }
        if (emits("leadlag")) out.files.write(dir / "granger.csv", csv);
    }
}

json fit_entry(const std::string& population, const std::function<FitResult()>& fit) {
    try {
        auto j = to_json(fit());
        j["population"] = population;
        return j;
    } catch (const Error& e) {
        return {{"population", population}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    }
}

void write_distfit(Outputs& files, const std::vector<StockResult>& results, const PipelineConfig& cfg) {
    std::vector<CorrelationMatrix> matrices;
    std::vector<double> shuffled;
    for (const auto& r : results) {
        if (r.corr) matrices.push_back(*r.corr);
        shuffled.insert(shuffled.end(), r.null_coefficients.begin(), r.null_coefficients.end());
    }
    const auto pooled = pooled_coefficients(matrices);
    const std::vector<std::pair<std::string, const std::vector<double>*>> pops{
        {"all", &pooled.all}, {"ind_ind", &pooled.ind_ind}, {"ind_ins", &pooled.ind_ins}, {"ins_ins", &pooled.ins_ins}};

    json fits = json::array();
    std::string counts = "population,upper_edge,positive,negative,log_positive,log_negative\n";
    for (const auto& [name, sample] : pops) {
        if (sample->empty()) continue;
        for (auto side : {Side::positive, Side::negative}) {
            fits.push_back(fit_entry(name, [&] { return fit_exponential_tail(*sample, side, cfg.exp_range, cfg.exp_bins); }));
            fits.push_back(fit_entry(name, [&] { return fit_power_bulk(*sample, side, cfg.power_range, cfg.power_bins); }));
        }
        const auto ic = interval_counts(*sample);
        for (std::size_t k = 0; k < ic.upper_edges.size(); ++k)
            counts += csv_row({name, num(ic.upper_edges[k]), num(ic.positive[k]), num(ic.negative[k]),
                               num(ic.log_positive[k]), num(ic.log_negative[k])});
    }
    if (!shuffled.empty())
        fits.push_back(fit_entry("shuffled", [&] {
            return fit_shuffled_exponential(shuffled, std::nullopt, cfg.shuffled_bins);
        }));
    files.write_json("distfit/fits.json", fits);
    files.write("distfit/interval_counts.csv", counts);
}

void write_xcorr_pooled(Outputs& files, const std::vector<StockResult>& results) {
    std::vector<CorrelationMatrix> matrices;
    for (const auto& r : results)
        if (r.corr) matrices.push_back(*r.corr);
    const auto pooled = pooled_coefficients(matrices);
    files.write("xcorr/pooled_all.csv", one_column_csv("C", pooled.all));
    files.write("xcorr/pooled_ind_ind.csv", one_column_csv("C", pooled.ind_ind));
    files.write("xcorr/pooled_ind_ins.csv", one_column_csv("C", pooled.ind_ins));
    files.write("xcorr/pooled_ins_ins.csv", one_column_csv("C", pooled.ins_ins));
    std::string means = "population,n,mean\n";
    means += csv_row({"all", num(pooled.all.size()), num(sample_mean(pooled.all))});
    means += csv_row({"ind_ind", num(pooled.ind_ind.size()), num(sample_mean(pooled.ind_ind))});
    means += csv_row({"ind_ins", num(pooled.ind_ins.size()), num(sample_mean(pooled.ind_ins))});
    means += csv_row({"ins_ins", num(pooled.ins_ins.size()), num(sample_mean(pooled.ins_ins))});
    files.write("xcorr/pooled_means.csv", means);
}

void write_factor_table(Outputs& files, const std::vector<StockResult>& results) {
    std::string csv = "stock,k,k_se,k_ind,k_ind_se,k_ins,k_ins_se,orientation\n";
    auto opt = [](const std::optional<SlopeFit>& f, bool se) {
        return f ? num(se ? f->stderr_ : f->k) : std::string();
    };
    for (const auto& r : results)
        if (r.slopes)
            csv += csv_row({r.code, num(r.slopes->all.k), num(r.slopes->all.stderr_), opt(r.slopes->individuals, false),
                            opt(r.slopes->individuals, true), opt(r.slopes->institutions, false),
                            opt(r.slopes->institutions, true), std::to_string(r.slopes->orientation_sign)});
    files.write("factor/slopes.csv", csv);
}

void write_classify_summary(Outputs& files, const std::vector<StockResult>& results) {
    std::string csv = "stock,type,method,N_tr,N_re,N_un\n";
    for (const auto& r : results) {
        for (auto type : {InvestorType::individual, InvestorType::institution}) {
            for (auto method : {CategoryMethod::threshold, CategoryMethod::bootstrap}) {
                std::size_t n[3] = {0, 0, 0};
                for (const auto& l : r.labels) {
                    if (l.type != type) continue;
                    const Category c = method == CategoryMethod::threshold ? l.threshold : l.bootstrap.label;
                    ++n[static_cast<int>(c)];
                }
                csv += csv_row({r.code, type_name(type), method == CategoryMethod::threshold ? "threshold" : "bootstrap",
                                num(n[0]), num(n[1]), num(n[2])});
            }
        }
    }
    files.write("classify/summary.csv", csv);
}

void write_leadlag(Outputs& files, const std::vector<StockResult>& results, const PipelineConfig& cfg) {
    std::vector<IndicatorRecord> records;
    std::vector<LaggedCorrelation> ac, cc;
    std::vector<std::string> keys;
    for (const auto& r : results) {
        records.insert(records.end(), r.indicators.begin(), r.indicators.end());
        ac.insert(ac.end(), r.autocorr.begin(), r.autocorr.end());
        cc.insert(cc.end(), r.crosscorr.begin(), r.crosscorr.end());
        keys.insert(keys.end(), r.lag_keys.begin(), r.lag_keys.end());
    }
    std::vector<std::string> expected;
    for (auto c : {Category::reversing, Category::trending, Category::uncategorized})
        for (const char* pop : {"all", "ind", "ins"}) expected.push_back(category_name(c) + "/" + pop);

    json notes = json::object();
    auto lagged = [&](const std::vector<LaggedCorrelation>& fs, const char* name) {
        const auto avg = group_average_correlation(fs, keys, expected);
        std::string csv = "group,lag,value,band\n";
        for (const auto& g : avg.groups)
            for (std::size_t k = 0; k < g.lags.size(); ++k)
                csv += csv_row({g.group, std::to_string(g.lags[k]), num(g.values[k]), num(g.band[k])});
        files.write(fs::path("leadlag") / (std::string(name) + ".csv"), csv);
        notes[std::string(name) + "_omitted_groups"] = avg.omitted;
    };
    lagged(ac, "autocorrelation");
    lagged(cc, "crosscorrelation");

    std::string by_h = "direction,population,dT,n,fired,E_I\n";
    for (const auto& a : aggregate_indicators(records, IndicatorGrouping::horizon))
        by_h += csv_row({std::string(to_string(a.direction)), a.population, std::to_string(a.group), num(a.n),
                         num(a.fired), num(a.expected)});
    files.write("leadlag/aggregate_horizon.csv", by_h);

    std::string by_c = "direction,population,bin_lo_sigma,bin_hi_sigma,uncategorized_band,n,fired,E_I\n";
    for (const auto& a : aggregate_indicators(records, IndicatorGrouping::cvr_bin, cfg.cvr_bin_horizon))
        by_c += csv_row({std::string(to_string(a.direction)), a.population, std::to_string(a.group),
                         std::to_string(a.group + 1), a.uncategorized_band ? "1" : "0", num(a.n), num(a.fired),
                         num(a.expected)});
    files.write("leadlag/aggregate_cvr_bin.csv", by_c);
    files.write_json("leadlag/notes.json", notes);
}

json versions() {
    return {{"invcorr", std::string(kVersion)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"compiler", __VERSION__},
            {"cxx", __cplusplus}};
}

std::string utc_now() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    return format_timestamp(now) + "Z";
}

void write_manifest(Outputs& files, std::string_view sub, const PipelineConfig& cfg,
                    const std::vector<std::string>& inputs, const RunSummary& summary) {
    json in = json::array();
    for (const auto& p : inputs)
        in.push_back({{"path", p}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    auto written = files.written();
    std::sort(written.begin(), written.end());
    json out = json::array();
    for (const auto& rel : written)
        out.push_back({{"path", rel.generic_string()}, {"sha256", sha256_file(files.root() / rel)}});
    const json manifest{{"subcommand", std::string(sub)},
                        {"seed", cfg.seed},
                        {"config", config_to_json(cfg)},
                        {"versions", versions()},
                        {"inputs", in},
                        {"outputs", out},
                        {"stocks", summary.stocks},
                        {"skipped_stocks", summary.skipped},
                        {"created_at", utc_now()}};
    write_text_file(files.root() / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

RunSummary run(std::string_view sub, const PipelineConfig& cfg) {
    if (!is_subcommand(sub)) throw Error(ErrorKind::config, "unknown subcommand '" + std::string(sub) + "'", "subcommand");
    validate(cfg);
    Outputs files(cfg.output_dir);
    RunSummary summary;

    if (sub == "synth") {
        auto spec = cfg.synth;
        spec.seed = cfg.seed;
        spec.schedule = cfg.schedule;
        const auto market = gen_planted_market(spec);
        std::ostringstream csv;
        write_trades(csv, market.trades);
        files.write("synth/trades.csv", csv.str());
        files.write_json("synth/ground_truth.json", planted_truth_json(market));
        for (const auto& log : market.logs) summary.stocks.push_back(log.stock_code);
        write_manifest(files, sub, cfg, {}, summary);
        summary.outputs = files.written();
        return summary;
    }

    if (cfg.inputs.empty()) throw Error(ErrorKind::missing_input, "no trade log given", "inputs");
    std::vector<TradeRecord> trades;
    json parse_reports = json::array();
    for (const auto& path : cfg.inputs) {
        auto parsed = parse_trades_file(path, ParseOptions{cfg.strict});
        json rejected = json::array();
        for (const auto& r : parsed.report.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
        parse_reports.push_back({{"path", path},
                                 {"rows_read", parsed.report.rows_read},
                                 {"rows_accepted", parsed.report.rows_accepted},
                                 {"rejected", rejected},
                                 {"out_of_order", parsed.report.out_of_order},
                                 {"reordered", parsed.report.reordered()}});
        trades.insert(trades.end(), std::make_move_iterator(parsed.trades.begin()),
                      std::make_move_iterator(parsed.trades.end()));
    }
    if (cfg.inputs.size() > 1)
        std::stable_sort(trades.begin(), trades.end(), [](const TradeRecord& a, const TradeRecord& b) {
            return std::tie(a.stock_code, a.timestamp) < std::tie(b.stock_code, b.timestamp);
        });

    const auto by_stock = split_by_stock(trades);
    const std::set<std::string> wanted(cfg.stocks.begin(), cfg.stocks.end());
    for (const auto& w : wanted)
        if (!by_stock.contains(w)) throw Error(ErrorKind::missing_input, "stock " + w + " not in the trade log", "--stocks");

    const auto profiles = count_profiles(trades);
    const auto retained = filter_profiles(profiles, cfg.filter);
    const bool emit_all = sub == "all";

    if (emit_all || sub == "ingest") {
        files.write_json("ingest/parse_report.json", parse_reports);
        for (const auto& [code, list] : profiles) {
            if (!wanted.empty() && !wanted.contains(code)) continue;
            const auto it = retained.find(code);
            files.write_json(fs::path(code) / "profiles.json",
                             profile_report(code, list, it == retained.end() ? nullptr : &it->second));
        }
    }

    std::vector<std::string> codes;
    for (const auto& [code, span] : by_stock) {
        if (!wanted.empty() && !wanted.contains(code)) continue;
        if (retained.contains(code)) codes.push_back(code);
        else summary.skipped.push_back(code);
    }
    summary.stocks = codes;

    const unsigned stages = stages_for(sub);
    std::vector<StockResult> results;
    results.reserve(codes.size());
    for (const auto& c : codes) results.push_back(StockResult{c, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, Outputs(cfg.output_dir)});

    if (stages != 0) {
        parallel_for(codes.size(), cfg.jobs, [&](std::size_t i) {
            auto& r = results[i];
            try {
                analyse_stock(r, by_stock.at(r.code), retained.at(r.code), cfg, stages, emit_all, sub);
            } catch (const Error& e) {
                throw Error(e.kind(), r.code + ": " + e.what(), e.field());
            }
        });
    }
    for (const auto& r : results) files.absorb(r.files);

    json notes = json::object();
    for (const auto& r : results)
        if (!r.notes.empty()) notes[r.code] = r.notes;

    if ((emit_all || sub == "xcorr") && !results.empty()) write_xcorr_pooled(files, results);
    if ((emit_all || sub == "distfit") && !results.empty()) write_distfit(files, results, cfg);
    if (emit_all || sub == "factor") write_factor_table(files, results);
    if (emit_all || sub == "classify") write_classify_summary(files, results);
    if (emit_all || sub == "leadlag") write_leadlag(files, results, cfg);
    if (emit_all || sub == "herding") {
        std::vector<HerdingReport> reports;
        for (const auto& r : results)
            if (r.herding) reports.push_back(*r.herding);
        std::ostringstream csv;
        write_herding_table(csv, reports);
        files.write("herding/herding_table.csv", csv.str());
    }
    if (stages != 0) files.write_json("notes.json", notes);

    write_manifest(files, sub, cfg, cfg.inputs, summary);
    summary.outputs = files.written();
    summary.outputs.push_back("manifest.json");
    return summary;
}

}  // namespace invcorr
