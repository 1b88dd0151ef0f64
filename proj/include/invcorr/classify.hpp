#pragma once

// Trending / reversing / uncategorized investors from the inventory-return correlation.

#include "invcorr/random.hpp"
#include "invcorr/xcorr.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invcorr {

enum class Category { trending, reversing, uncategorized };
enum class CategoryMethod { threshold, bootstrap };

[[nodiscard]] std::string_view to_string(Category c) noexcept;

struct CategoryLabel {
    std::string investor_id;
    InvestorType investor_type = InvestorType::individual;
    double cvr = 0.0;
    CategoryMethod method = CategoryMethod::threshold;
    Category label = Category::uncategorized;
    double gamma = 0.0;  // linear-model loading, equal to cvr
};

/// Pearson coefficient between an inventory series and the return series.
[[nodiscard]] double corr_with_return(std::span<const double> V, std::span<const double> R);

/// 2 sigma band with sigma = 1/sqrt(N_T); a value on the band edge is uncategorized.
[[nodiscard]] Category threshold_categorize(double cvr, std::size_t n_t);
[[nodiscard]] double significance_band(std::size_t n_t);

struct BootstrapOptions {
    std::size_t replicas = 1000;
    std::size_t block_length = 20;
    double lower_quantile = 0.02275;
    double upper_quantile = 0.97725;
    std::uint64_t seed = 0;
};

struct BootstrapOutcome {
    Category label = Category::uncategorized;
    double cvr = 0.0;
    double lower = 0.0;  // replica-distribution quantiles
    double upper = 0.0;
};

/// Indices of one circular moving-block bootstrap resample of length n.
[[nodiscard]] std::vector<std::size_t> circular_block_indices(std::size_t n, std::size_t block_length, Rng& rng);

/// Resamples V and R independently by circular moving blocks, compares the observed
/// coefficient with the replica quantiles. Needs length >= 2 * block_length.
[[nodiscard]] BootstrapOutcome bootstrap_categorize(std::span<const double> V, std::span<const double> R,
                                                    const BootstrapOptions& options);

struct SortedMatrix {
    std::vector<std::size_t> order;   // original index of each sorted row
    std::vector<std::string> labels;
    Matrix values;
    std::vector<double> cvr;          // descending
    double band = 0.0;                // 2 / sqrt(N_T)
};

/// Rows and columns ordered by descending C_VR (stable for ties).
[[nodiscard]] SortedMatrix sort_matrix_by_cvr(const CorrelationMatrix& C, std::span<const double> cvr, std::size_t n_t);

/// gamma_i gamma_j off the diagonal, 1 on it.
[[nodiscard]] Matrix linear_model_matrix(std::span<const double> gammas);

}  // namespace invcorr
