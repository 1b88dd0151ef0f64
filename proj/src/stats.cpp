#include "invcorr/stats.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace invcorr::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorKind::insufficient_data, "mean of an empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

bool is_degenerate(std::span<const double> x) {
    if (x.size() < 2) return true;
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return true;
    return stddev(x) <= 1e-12 * scale;
}

std::vector<double> standardize(std::span<const double> x) {
    if (is_degenerate(x)) throw Error(ErrorKind::degenerate, "series has zero variance");
    const double m = mean(x);
    const double s = stddev(x);
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return (v - m) / s; });
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(ErrorKind::misaligned, "pearson: series lengths differ (" +
                                               std::to_string(x.size()) + " vs " +
                                               std::to_string(y.size()) + ")");
    if (is_degenerate(x) || is_degenerate(y))
        throw Error(ErrorKind::degenerate, "pearson: zero-variance series");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - mx;
        const double dy = y[t] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::invalid_argument, "quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct WeightedSums {
    double w = 0, wx = 0, wy = 0, wxx = 0, wxy = 0;
};

LineFit weighted_line(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w) {
    WeightedSums s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s.w += w[i];
        s.wx += w[i] * x[i];
        s.wy += w[i] * y[i];
        s.wxx += w[i] * x[i] * x[i];
        s.wxy += w[i] * x[i] * y[i];
    }
    const double det = s.w * s.wxx - s.wx * s.wx;
    if (!(std::abs(det) > 0.0)) throw Error(ErrorKind::degenerate, "line fit: abscissae have zero spread");
    LineFit fit;
    fit.n = x.size();
    fit.slope = (s.w * s.wxy - s.wx * s.wy) / det;
    fit.intercept = (s.wy - fit.slope * s.wx) / s.w;

    double wrss = 0.0, rss = 0.0, tss = 0.0;
    const double ybar = mean(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        wrss += w[i] * r * r;
        rss += r * r;
        tss += (y[i] - ybar) * (y[i] - ybar);
    }
    const double dof = static_cast<double>(x.size()) - 2.0;
    const double sigma2 = dof > 0 ? wrss / dof : 0.0;
    fit.slope_se = std::sqrt(sigma2 * s.w / det);
    fit.intercept_se = std::sqrt(sigma2 * s.wxx / det);
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    return fit;
}

double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

LineFit ols_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::misaligned, "line fit: x and y lengths differ");
    if (x.size() < 2) throw Error(ErrorKind::insufficient_data, "line fit needs at least two points");
    const std::vector<double> ones(x.size(), 1.0);
    return weighted_line(x, y, ones);
}

LineFit huber_line(std::span<const double> x, std::span<const double> y, double tuning,
                   int max_iterations) {
    LineFit fit = ols_line(x, y);
    std::vector<double> w(x.size(), 1.0);
    std::vector<double> r(x.size());
    for (int iter = 1; iter <= max_iterations; ++iter) {
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = y[i] - fit.intercept - fit.slope * x[i];
        std::vector<double> tmp = r;
        const double med = median_inplace(tmp);
        for (auto& v : tmp) v = std::abs(v - med);
        const double scale = median_inplace(tmp) / 0.6744897501960817;
        if (scale <= 0.0) {
            fit.iterations = iter;
            return fit;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = std::abs(r[i]);
            w[i] = a <= tuning * scale ? 1.0 : tuning * scale / a;
        }
        LineFit next = weighted_line(x, y, w);
        const bool done =
            std::abs(next.slope - fit.slope) <= 1e-10 * (1.0 + std::abs(fit.slope)) &&
            std::abs(next.intercept - fit.intercept) <= 1e-10 * (1.0 + std::abs(fit.intercept));
        fit = next;
        fit.iterations = iter;
        if (done) return fit;
    }
    throw Error(ErrorKind::non_convergence,
                "Huber regression did not converge in " + std::to_string(max_iterations) + " iterations");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.18) {
        // Jacobi theta form converges fast for small t.
        const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * t * t));
        double sum = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const int odd = 2 * k - 1;
            sum += std::pow(y, odd * odd);
        }
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / t * sum;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw Error(ErrorKind::insufficient_data, "KS statistic of an empty sample");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_pvalue(double statistic, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * statistic);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::insufficient_data, "KS statistic of an empty sample");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double fisher_f_sf(double f, double df1, double df2) {
    if (!(f > 0.0)) return 1.0;
    if (!std::isfinite(f)) return 0.0;
    const boost::math::fisher_f_distribution<double> dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

}  // namespace invcorr::stats
