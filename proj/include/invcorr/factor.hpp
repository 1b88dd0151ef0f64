#pragma once

// Projection of the standardized panel on the leading eigenvector and its
// regression against returns.

#include "invcorr/common.hpp"

#include <optional>
#include <span>
#include <vector>

namespace invcorr {

enum class FactorSubset { all, individuals, institutions };

struct FactorSeries {
    std::vector<double> G;
    FactorSubset subset = FactorSubset::all;
    int orientation_sign = 1;
};

/// +1 or -1 such that corr(G_all, R) >= 0 with G_all = V (sign * u1).
/// V is T x N (standardized columns), R has length T.
[[nodiscard]] int factor_orientation(const Matrix& V, const Vector& u1, std::span<const double> R);

/// G(t) = sign * sum_{i in subset} V_i(t) u1_i.
[[nodiscard]] FactorSeries project_factor(const Matrix& V, const Vector& u1, std::span<const InvestorType> types,
                                          FactorSubset subset, int orientation_sign = 1);

struct SlopeFit {
    double k = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    double intercept = 0.0;
};

/// OLS slope of G on R with intercept. G is used as given.
[[nodiscard]] SlopeFit regress_factor_return(std::span<const double> G, std::span<const double> R);

struct TypeSlopes {
    SlopeFit all;
    std::optional<SlopeFit> individuals;
    std::optional<SlopeFit> institutions;
    int orientation_sign = 1;
};

/// Slopes k, k_ind, k_ins of the oriented subset projections, each standardized to
/// unit variance, regressed on the standardized R. A type absent from the panel
/// leaves its slope empty.
[[nodiscard]] TypeSlopes type_slopes(const Matrix& V, const Vector& u1, std::span<const InvestorType> types,
                                     std::span<const double> R);

}  // namespace invcorr
