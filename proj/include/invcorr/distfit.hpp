#pragma once

// Densities of coefficient samples and the exponential / power-law fits to them.

#include "invcorr/common.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace invcorr {

enum class Binning { linear, logarithmic };

struct DensityEstimate {
    std::vector<double> bin_edges;   // n_bins + 1
    std::vector<double> bin_centers; // arithmetic (linear) or geometric (log) centers
    std::vector<double> bin_widths;
    std::vector<std::size_t> counts;
    std::vector<double> density;     // count / (sample_size * width)
    Binning binning = Binning::linear;
    std::size_t sample_size = 0;
};

inline constexpr std::size_t kDefaultLinearBins = 50;
inline constexpr std::size_t kDefaultLogBins = 20;

/// Normalized histogram over [min, max] of the sample. Log binning needs strictly
/// positive values. A sample with a single distinct value becomes one bin of unit
/// relative width around it.
[[nodiscard]] DensityEstimate estimate_density(std::span<const double> sample, Binning binning,
                                               std::size_t n_bins = 0);

/// Histogram over an explicit range [lo, hi]; values outside are not binned but
/// still count towards the normalization, so the density is that of the whole sample.
[[nodiscard]] DensityEstimate estimate_density(std::span<const double> sample, Binning binning,
                                               std::size_t n_bins, double lo, double hi);

enum class FitModel { exp_tail_pos, exp_tail_neg, power_pos, power_neg, exp_shuffled };
enum class Side { positive, negative };
enum class RegressionMethod { ordinary, huber };

[[nodiscard]] std::string to_string(FitModel model);

/// Half-open range (lo, hi] on |C|.
struct FitRange {
    double lo = 0.0;
    double hi = 0.0;
};

inline constexpr FitRange kExpTailRange{0.1, 0.6};
inline constexpr FitRange kPowerBulkRange{1e-5, 0.01};

struct FitResult {
    FitModel model = FitModel::exp_tail_pos;
    double estimate = 0.0;   // lambda or gamma
    double stderr_ = 0.0;
    FitRange range;
    double r2 = 0.0;
    std::size_t n = 0;       // sample points inside the range
    std::size_t bins_used = 0;
    int iterations = 0;      // robust fits only
};

[[nodiscard]] nlohmann::json to_json(const FitResult& fit);

/// lambda from least squares of ln P(C) on C over the signed range (negative
/// coefficients are reflected). Needs at least 50 points in range.
[[nodiscard]] FitResult fit_exponential_tail(std::span<const double> sample, Side side,
                                             FitRange range = kExpTailRange, std::size_t n_bins = 25);

/// gamma from least squares of ln P(C) on ln C over log bins of the signed range.
[[nodiscard]] FitResult fit_power_bulk(std::span<const double> sample, Side side,
                                       FitRange range = kPowerBulkRange, std::size_t n_bins = 20);

/// lambda_shuf of P(C) = lambda exp(-lambda C) for |C| from a shuffling null,
/// by Huber IRLS on (C, ln P). Without an explicit range the fit covers
/// (0, 6 / lambda0] with lambda0 = ln 2 / median|C|.
[[nodiscard]] FitResult fit_shuffled_exponential(std::span<const double> sample,
                                                 std::optional<FitRange> range = std::nullopt,
                                                 std::size_t n_bins = 25,
                                                 RegressionMethod method = RegressionMethod::huber,
                                                 double tuning = 1.345, int max_iterations = 100);

struct IntervalCounts {
    std::vector<double> upper_edges;  // k / n for k = 1..n
    std::vector<std::size_t> positive;
    std::vector<std::size_t> negative;
    std::vector<double> log_positive; // log10(1 + N)
    std::vector<double> log_negative;
    std::size_t zeros = 0;
};

/// Positive / negative counts over n equal |C| intervals of (0, 1].
[[nodiscard]] IntervalCounts interval_counts(std::span<const double> sample, std::size_t n_intervals = 10);

/// Maximum-likelihood cross-checks on the same signed ranges: truncated exponential
/// rate and truncated power-law exponent.
[[nodiscard]] double mle_exponential_tail(std::span<const double> sample, Side side, FitRange range = kExpTailRange);
[[nodiscard]] double mle_power_bulk(std::span<const double> sample, Side side, FitRange range = kPowerBulkRange);

}  // namespace invcorr
