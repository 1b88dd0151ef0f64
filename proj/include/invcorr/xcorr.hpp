#pragma once

// Equal-time cross-correlation of inventory variations.

#include "invcorr/inventory.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace invcorr {

struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<InvestorType> types;
    Matrix values;
    std::size_t T = 0;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

/// Pearson correlation of the columns of a T x N matrix with the population
/// convention. The result has an exact unit diagonal, exact symmetry and entries
/// clamped to [-1, 1]. Throws ErrorKind::degenerate for a constant column.
[[nodiscard]] Matrix correlation_of_columns(const Matrix& X);

/// Correlation matrix of a panel sharing one time index. Requires N >= 2, T >= 3,
/// identical `times` and no degenerate series.
[[nodiscard]] CorrelationMatrix correlation_matrix(std::span<const InventorySeries> panel);

/// Upper-triangle coefficients pooled over stocks and split by investor-type pair.
struct PooledCoefficients {
    std::vector<double> ind_ind;
    std::vector<double> ind_ins;
    std::vector<double> ins_ins;
    std::vector<double> all;
};

[[nodiscard]] PooledCoefficients pooled_coefficients(std::span<const CorrelationMatrix> matrices);

/// Mean of a sample, NaN when empty.
[[nodiscard]] double sample_mean(std::span<const double> sample);

/// Mean off-diagonal coefficient of a correlation matrix.
[[nodiscard]] double mean_off_diagonal(const Matrix& C);

struct RollingPoint {
    std::size_t end_index = 0;     // index of the window's last period
    double mean = 0.0;             // NaN when fewer than two usable series
    std::size_t series_used = 0;
    std::size_t series_dropped = 0;  // degenerate within this window
};

/// Mean correlation recomputed inside each window of `window` periods over the
/// columns of X (raw or standardized series; correlations are scale free).
[[nodiscard]] std::vector<RollingPoint> rolling_mean_correlation(const Matrix& X, std::size_t window);
[[nodiscard]] std::vector<RollingPoint> rolling_mean_correlation(std::span<const InventorySeries> panel,
                                                                 std::size_t window);

/// Matrix CSV: header row "investor_id,<ids...>", one row per investor.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& labels, const Matrix& values);

}  // namespace invcorr
