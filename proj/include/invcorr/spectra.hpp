#pragma once

// Eigen-spectra of correlation matrices against random-matrix and shuffling nulls.

#include "invcorr/inventory.hpp"
#include "invcorr/random.hpp"
#include "invcorr/xcorr.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace invcorr {

struct MpBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Edges sigma2 (1 + 1/Q -+ 2 sqrt(1/Q)) of the Marchenko-Pastur law, Q = T/N >= 1.
[[nodiscard]] MpBounds mp_bounds(double Q, double sigma2 = 1.0);

/// Marchenko-Pastur eigenvalue density; zero outside the support.
[[nodiscard]] double mp_density(double lambda, double Q, double sigma2 = 1.0);

struct SpectralResult {
    Vector eigenvalues;      // descending
    Matrix eigenvectors;     // column k belongs to eigenvalues[k]; orthonormal
    double Q = 0.0;          // T / N, 0 when T is unknown
    std::optional<MpBounds> mp;
    std::optional<double> null_threshold;
};

/// Full symmetric eigendecomposition with eigenvalues in descending order and each
/// eigenvector oriented so its largest-magnitude component is positive. With
/// T > 0, Q = T/N and the Marchenko-Pastur bounds are filled in when Q >= 1.
[[nodiscard]] SpectralResult eigendecompose(const Matrix& C, std::size_t T = 0);
[[nodiscard]] SpectralResult eigendecompose(const CorrelationMatrix& C);

/// Eigenvalues only, descending.
[[nodiscard]] Vector eigenvalues_descending(const Matrix& C);

enum class NullMode { series_permute, trade_shuffle };

struct NullOptions {
    std::size_t replicas = 1000;
    std::uint64_t seed = 0;
    double quantile = 0.97725;
    bool collect_coefficients = false;
    unsigned jobs = 1;
};

struct NullResult {
    NullMode mode = NullMode::series_permute;
    std::vector<Vector> spectra;       // per replica, descending
    std::vector<double> largest;       // largest eigenvalue per replica
    std::vector<double> coefficients;  // pooled upper-triangle null coefficients (optional)
    double threshold = 0.0;            // `quantile` of `largest`
};

/// Trade-level input for the counterparty-shuffling null.
struct TradeLevelData {
    std::span<const TradeRecord> trades;
    std::vector<InvestorProfile> investors;
    PeriodGrid grid;
};

/// Shuffling null. series_permute independently permutes every column of `panel`
/// (T x N); trade_shuffle permutes the buyer column and, independently, the seller
/// column of the trades, then rebuilds the retained investors' inventories. Replica
/// k draws from seed `replica_seed(options.seed, k)`. Requires replicas >= 100.
[[nodiscard]] NullResult shuffle_null(const Matrix& panel, const TradeLevelData* trades, NullMode mode,
                                      const NullOptions& options);

/// Independent permutations of the buyer side and the seller side across trades.
/// Each investor keeps its number of purchases and of sales.
[[nodiscard]] std::vector<TradeRecord> shuffle_counterparties(std::span<const TradeRecord> trades, Rng& rng);

struct DeviatingEigenvalue {
    std::size_t rank = 0;  // 1-based
    double value = 0.0;
};

/// Eigenvalues strictly above both the Marchenko-Pastur edge and the null threshold.
[[nodiscard]] std::vector<DeviatingEigenvalue> deviating_eigenvalues(const SpectralResult& spectrum);

enum class ComponentSelector { bulk, rank1, rank2 };

/// Standardized (zero mean, unit variance) eigenvector components pooled over spectra.
[[nodiscard]] std::vector<double> eigenvector_component_sample(std::span<const SpectralResult> spectra,
                                                               ComponentSelector selector);

struct GaussianityTest {
    double statistic = 0.0;
    double p_value = 1.0;
    bool pass = true;
    std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1). Needs at least 20 values.
[[nodiscard]] GaussianityTest gaussian_component_test(std::span<const double> sample, double alpha = 0.05);

[[nodiscard]] nlohmann::json spectrum_json(const SpectralResult& spectrum);

}  // namespace invcorr
