#include "invcorr/classify.hpp"
#include "invcorr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace invcorr {

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::trending: return "trending";
        case Category::reversing: return "reversing";
        case Category::uncategorized: return "uncategorized";
    }
    return "uncategorized";
}

double corr_with_return(std::span<const double> V, std::span<const double> R) { return stats::pearson(V, R); }

double significance_band(std::size_t n_t) { return 2.0 / std::sqrt(static_cast<double>(n_t)); }

Category threshold_categorize(double cvr, std::size_t n_t) {
    if (n_t < 4) throw Error(ErrorKind::invalid_argument, "threshold test needs N_T >= 4");
    const double band = significance_band(n_t);
    if (cvr > band) return Category::trending;
    if (cvr < -band) return Category::reversing;
    return Category::uncategorized;
}

std::vector<std::size_t> circular_block_indices(std::size_t n, std::size_t block_length, Rng& rng) {
    std::uniform_int_distribution<std::size_t> start(0, n - 1);
    std::vector<std::size_t> idx;
    idx.reserve(n + block_length);
    while (idx.size() < n) {
        const std::size_t s = start(rng);
        for (std::size_t j = 0; j < block_length && idx.size() < n; ++j) idx.push_back((s + j) % n);
    }
    return idx;
}

namespace {

// Pearson coefficient of x[ix] and y[iy] without materializing the resamples.
double gathered_pearson(std::span<const double> x, std::span<const double> y, std::span<const std::size_t> ix,
                        std::span<const std::size_t> iy) {
    const double n = static_cast<double>(ix.size());
    double sx = 0, sy = 0;
    for (std::size_t t = 0; t < ix.size(); ++t) {
        sx += x[ix[t]];
        sy += y[iy[t]];
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t t = 0; t < ix.size(); ++t) {
        const double dx = x[ix[t]] - mx, dy = y[iy[t]] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

BootstrapOutcome bootstrap_categorize(std::span<const double> V, std::span<const double> R,
                                      const BootstrapOptions& options) {
    if (V.size() != R.size()) throw Error(ErrorKind::misaligned, "inventory and return lengths differ");
    if (options.block_length == 0)
        throw Error(ErrorKind::invalid_argument, "block length must be positive", "classify.block_length");
    if (V.size() < 2 * options.block_length)
        throw Error(ErrorKind::insufficient_data, "series shorter than two bootstrap blocks");
    if (options.replicas == 0)
        throw Error(ErrorKind::invalid_argument, "need at least one bootstrap replica", "classify.bootstrap_replicas");

    BootstrapOutcome out;
    out.cvr = corr_with_return(V, R);
    Rng rng(options.seed);
    std::vector<double> replicas(options.replicas);
    for (auto& r : replicas) {
        const auto iv = circular_block_indices(V.size(), options.block_length, rng);
        const auto ir = circular_block_indices(R.size(), options.block_length, rng);
        r = gathered_pearson(V, R, iv, ir);
    }
    out.lower = stats::quantile(replicas, options.lower_quantile);
    out.upper = stats::quantile(std::move(replicas), options.upper_quantile);
    if (out.cvr > out.upper) out.label = Category::trending;
    else if (out.cvr < out.lower) out.label = Category::reversing;
    return out;
}

SortedMatrix sort_matrix_by_cvr(const CorrelationMatrix& C, std::span<const double> cvr, std::size_t n_t) {
    if (cvr.size() != C.size()) throw Error(ErrorKind::misaligned, "C_VR list does not cover the matrix");
    SortedMatrix out;
    out.order.resize(cvr.size());
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) { return cvr[a] > cvr[b]; });
    const auto n = static_cast<Eigen::Index>(cvr.size());
    out.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto oi = static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j)
            out.values(i, j) = C.values(oi, static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(j)]));
        out.labels.push_back(C.labels[static_cast<std::size_t>(oi)]);
        out.cvr.push_back(cvr[static_cast<std::size_t>(oi)]);
    }
    out.band = n_t > 0 ? significance_band(n_t) : 0.0;
    return out;
}

Matrix linear_model_matrix(std::span<const double> gammas) {
    for (double g : gammas)
        if (!(std::abs(g) <= 1.0)) throw Error(ErrorKind::invalid_argument, "linear-model loadings must lie in [-1, 1]");
    const auto n = static_cast<Eigen::Index>(gammas.size());
    const Eigen::Map<const Vector> g(gammas.data(), n);
    Matrix M = g * g.transpose();
    M.diagonal().setOnes();
    return M;
}

}  // namespace invcorr
