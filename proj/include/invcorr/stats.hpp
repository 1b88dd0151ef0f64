#pragma once

// Small numerical toolbox shared by the analysis modules.

#include "invcorr/common.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace invcorr::stats {

[[nodiscard]] double mean(std::span<const double> x);
/// Population (1/T) variance.
[[nodiscard]] double variance(std::span<const double> x);
[[nodiscard]] double stddev(std::span<const double> x);

/// True when the population standard deviation is zero relative to the data scale.
[[nodiscard]] bool is_degenerate(std::span<const double> x);

/// (x - mean) / sd with the population convention. Throws ErrorKind::degenerate.
[[nodiscard]] std::vector<double> standardize(std::span<const double> x);

/// Pearson coefficient. Throws on length mismatch or zero variance.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Linear-interpolation quantile (Hyndman-Fan type 7). `values` need not be sorted.
[[nodiscard]] double quantile(std::vector<double> values, double p);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
    int iterations = 0;
};

/// Ordinary least squares y = intercept + slope * x.
[[nodiscard]] LineFit ols_line(std::span<const double> x, std::span<const double> y);

/// Huber M-estimate of a line by iteratively reweighted least squares. The residual
/// scale is re-estimated each pass from the normalized MAD. Throws
/// ErrorKind::non_convergence after `max_iterations`.
[[nodiscard]] LineFit huber_line(std::span<const double> x, std::span<const double> y,
                                 double tuning = 1.345, int max_iterations = 100);

[[nodiscard]] double normal_cdf(double x);

/// Survival function of the Kolmogorov distribution, Q(t) = 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
[[nodiscard]] double kolmogorov_sf(double t);

/// One-sample KS statistic sup |F_n - F|.
[[nodiscard]] double ks_statistic(std::span<const double> sample,
                                  const std::function<double(double)>& cdf);

/// Asymptotic p-value for a one-sample KS statistic with Stephens' small-n correction.
[[nodiscard]] double ks_pvalue(double statistic, std::size_t n);

/// Two-sample KS statistic sup |F_a - F_b|.
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Upper tail P(F > f) of Fisher's F distribution.
[[nodiscard]] double fisher_f_sf(double f, double df1, double df2);

}  // namespace invcorr::stats
