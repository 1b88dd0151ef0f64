#include "invcorr/spectra.hpp"
#include "invcorr/parallel.hpp"
#include "invcorr/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace invcorr {

MpBounds mp_bounds(double Q, double sigma2) {
    if (!(Q >= 1.0)) throw Error(ErrorKind::invalid_argument, "Marchenko-Pastur bounds need Q = T/N >= 1");
    const double r = std::sqrt(1.0 / Q);
    return {sigma2 * (1.0 + 1.0 / Q - 2.0 * r), sigma2 * (1.0 + 1.0 / Q + 2.0 * r)};
}

double mp_density(double lambda, double Q, double sigma2) {
    const auto b = mp_bounds(Q, sigma2);
    if (!(lambda > b.lower && lambda < b.upper)) return 0.0;
    return Q / (2.0 * std::numbers::pi * sigma2) * std::sqrt((b.upper - lambda) * (lambda - b.lower)) / lambda;
}

Vector eigenvalues_descending(const Matrix& C) {
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(C, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::non_convergence, "eigenvalue solver failed");
    return solver.eigenvalues().reverse();
}

SpectralResult eigendecompose(const Matrix& C, std::size_t T) {
    const Eigen::Index n = C.rows();
    if (n < 2 || C.cols() != n) throw Error(ErrorKind::invalid_argument, "eigendecompose needs a square matrix with N >= 2");
    if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw Error(ErrorKind::invalid_argument, "matrix is not symmetric");
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(C);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::non_convergence, "eigenvalue solver failed");

    SpectralResult out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index arg = 0;
        out.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
        if (out.eigenvectors(arg, k) < 0.0) out.eigenvectors.col(k) *= -1.0;
    }
    if (T > 0) {
        out.Q = static_cast<double>(T) / static_cast<double>(n);
        if (out.Q >= 1.0) out.mp = mp_bounds(out.Q);
    }
    return out;
}

SpectralResult eigendecompose(const CorrelationMatrix& C) { return eigendecompose(C.values, C.T); }

std::vector<TradeRecord> shuffle_counterparties(std::span<const TradeRecord> trades, Rng& rng) {
    std::vector<std::size_t> buyers(trades.size()), sellers(trades.size());
    std::iota(buyers.begin(), buyers.end(), 0);
    std::iota(sellers.begin(), sellers.end(), 0);
    std::shuffle(buyers.begin(), buyers.end(), rng);
    std::shuffle(sellers.begin(), sellers.end(), rng);
    std::vector<TradeRecord> out(trades.begin(), trades.end());
    for (std::size_t i = 0; i < trades.size(); ++i) {
        out[i].buyer_id = trades[buyers[i]].buyer_id;
        out[i].buyer_type = trades[buyers[i]].buyer_type;
        out[i].seller_id = trades[sellers[i]].seller_id;
        out[i].seller_type = trades[sellers[i]].seller_type;
    }
    return out;
}

namespace {

void append_upper(const Matrix& C, std::vector<double>& out) {
    for (Eigen::Index i = 0; i < C.rows(); ++i)
        for (Eigen::Index j = i + 1; j < C.cols(); ++j) out.push_back(C(i, j));
}

Matrix drop_degenerate(const Matrix& X) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const Vector col = X.col(j);
        if (!stats::is_degenerate(std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))))
            keep.push_back(j);
    }
    if (keep.size() == static_cast<std::size_t>(X.cols())) return X;
    Matrix out(X.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(keep[k]);
    return out;
}

// Pre-indexed trades so each replica only permutes two integer columns.
struct IndexedTrades {
    std::vector<std::size_t> period;
    std::vector<double> value;
    std::vector<std::ptrdiff_t> buyer, seller;  // retained-investor column or -1
    std::size_t periods = 0;
    std::size_t investors = 0;
};

IndexedTrades index_trades(const TradeLevelData& data) {
    IndexedTrades it;
    it.periods = data.grid.size();
    it.investors = data.investors.size();
    std::unordered_map<std::string, std::ptrdiff_t> col;
    for (std::size_t j = 0; j < data.investors.size(); ++j)
        col.emplace(data.investors[j].investor_id, static_cast<std::ptrdiff_t>(j));
    auto lookup = [&](const std::string& id) {
        const auto f = col.find(id);
        return f == col.end() ? std::ptrdiff_t{-1} : f->second;
    };
    for (const auto& t : data.trades) {
        it.period.push_back(data.grid.index_of(t));
        it.value.push_back(static_cast<double>(t.value_ticks()));
        it.buyer.push_back(lookup(t.buyer_id));
        it.seller.push_back(lookup(t.seller_id));
    }
    return it;
}

}  // namespace

NullResult shuffle_null(const Matrix& panel, const TradeLevelData* trades, NullMode mode, const NullOptions& options) {
    if (options.replicas < 100)
        throw Error(ErrorKind::invalid_argument, "shuffle null needs at least 100 replicas", "spectra.null_replicas");
    if (mode == NullMode::trade_shuffle && trades == nullptr)
        throw Error(ErrorKind::invalid_argument, "trade_shuffle needs trade-level data");

    NullResult out;
    out.mode = mode;
    out.spectra.resize(options.replicas);
    std::vector<std::vector<double>> coefficients(options.collect_coefficients ? options.replicas : 0);

    IndexedTrades indexed;
    if (mode == NullMode::trade_shuffle) indexed = index_trades(*trades);

    parallel_for(options.replicas, options.jobs, [&](std::size_t k) {
        Rng rng(replica_seed(options.seed, k));
        Matrix X;
        if (mode == NullMode::series_permute) {
            X = panel;
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                auto col = X.col(j);
                std::shuffle(col.data(), col.data() + col.size(), rng);
            }
        } else {
            const std::size_t n = indexed.period.size();
            std::vector<std::size_t> b(n), s(n);
            std::iota(b.begin(), b.end(), 0);
            std::iota(s.begin(), s.end(), 0);
            std::shuffle(b.begin(), b.end(), rng);
            std::shuffle(s.begin(), s.end(), rng);
            X = Matrix::Zero(static_cast<Eigen::Index>(indexed.periods), static_cast<Eigen::Index>(indexed.investors));
            for (std::size_t i = 0; i < n; ++i) {
                const auto row = static_cast<Eigen::Index>(indexed.period[i]);
                if (const auto j = indexed.buyer[b[i]]; j >= 0) X(row, j) += indexed.value[i];
                if (const auto j = indexed.seller[s[i]]; j >= 0) X(row, j) -= indexed.value[i];
            }
            X = drop_degenerate(X);
        }
        if (X.cols() < 2) throw Error(ErrorKind::insufficient_data, "shuffled panel has fewer than two usable series");
        const Matrix C = correlation_of_columns(X);
        out.spectra[k] = eigenvalues_descending(C);
        if (options.collect_coefficients) append_upper(C, coefficients[k]);
    });

    out.largest.reserve(options.replicas);
    for (const auto& s : out.spectra) out.largest.push_back(s(0));
    for (auto& c : coefficients) out.coefficients.insert(out.coefficients.end(), c.begin(), c.end());
    out.threshold = stats::quantile(out.largest, options.quantile);
    return out;
}

std::vector<DeviatingEigenvalue> deviating_eigenvalues(const SpectralResult& spectrum) {
    if (!spectrum.mp || !spectrum.null_threshold)
        throw Error(ErrorKind::invalid_argument, "deviation test needs both the Marchenko-Pastur and null thresholds");
    const double cut = std::max(spectrum.mp->upper, *spectrum.null_threshold);
    std::vector<DeviatingEigenvalue> out;
    for (Eigen::Index k = 0; k < spectrum.eigenvalues.size(); ++k)
        if (spectrum.eigenvalues(k) > cut) out.push_back({static_cast<std::size_t>(k) + 1, spectrum.eigenvalues(k)});
    return out;
}

std::vector<double> eigenvector_component_sample(std::span<const SpectralResult> spectra, ComponentSelector selector) {
    std::vector<double> out;
    for (const auto& s : spectra) {
        std::vector<Eigen::Index> picks;
        const Eigen::Index n = s.eigenvalues.size();
        switch (selector) {
            case ComponentSelector::bulk:
                if (!s.mp) throw Error(ErrorKind::invalid_argument, "bulk selection needs Marchenko-Pastur bounds");
                for (Eigen::Index k = 0; k < n; ++k)
                    if (s.eigenvalues(k) > s.mp->lower && s.eigenvalues(k) < s.mp->upper) picks.push_back(k);
                break;
            case ComponentSelector::rank1:
                if (n >= 1) picks.push_back(0);
                break;
            case ComponentSelector::rank2:
                if (n >= 2) picks.push_back(1);
                break;
        }
        for (const auto k : picks) {
            const Vector u = s.eigenvectors.col(k);
            const std::span<const double> view(u.data(), static_cast<std::size_t>(u.size()));
            if (stats::is_degenerate(view)) continue;
            const auto z = stats::standardize(view);
            out.insert(out.end(), z.begin(), z.end());
        }
    }
    if (out.empty()) throw Error(ErrorKind::insufficient_data, "no eigenvectors selected");
    return out;
}

GaussianityTest gaussian_component_test(std::span<const double> sample, double alpha) {
    if (sample.size() < 20) throw Error(ErrorKind::insufficient_data, "Gaussianity test needs at least 20 values");
    GaussianityTest t;
    t.n = sample.size();
    t.statistic = stats::ks_statistic(sample, stats::normal_cdf);
    t.p_value = stats::ks_pvalue(t.statistic, t.n);
    t.pass = t.p_value >= alpha;
    return t;
}

nlohmann::json spectrum_json(const SpectralResult& spectrum) {
    nlohmann::json j;
    j["eigenvalues"] = std::vector<double>(spectrum.eigenvalues.data(),
                                           spectrum.eigenvalues.data() + spectrum.eigenvalues.size());
    j["Q"] = spectrum.Q;
    j["mp_bounds"] = spectrum.mp ? nlohmann::json::array({spectrum.mp->lower, spectrum.mp->upper}) : nlohmann::json();
    j["null_threshold"] = spectrum.null_threshold ? nlohmann::json(*spectrum.null_threshold) : nlohmann::json();
    nlohmann::json ranks = nlohmann::json::array();
    if (spectrum.mp && spectrum.null_threshold)
        for (const auto& d : deviating_eigenvalues(spectrum)) ranks.push_back(d.rank);
    j["deviating_ranks"] = ranks;
    return j;
}

}  // namespace invcorr
