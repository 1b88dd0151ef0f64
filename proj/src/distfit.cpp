#include "invcorr/distfit.hpp"
#include "invcorr/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace invcorr {

namespace {

DensityEstimate histogram(std::span<const double> values, Binning binning, std::size_t n_bins, double lo, double hi,
                          std::size_t normalizer) {
    if (n_bins == 0) throw Error(ErrorKind::invalid_argument, "histogram needs at least one bin");
    if (!(hi > lo)) throw Error(ErrorKind::invalid_argument, "histogram range is empty");
    if (binning == Binning::logarithmic && !(lo > 0.0))
        throw Error(ErrorKind::invalid_argument, "logarithmic binning needs a strictly positive range");
    DensityEstimate d;
    d.binning = binning;
    d.sample_size = normalizer;
    const bool log = binning == Binning::logarithmic;
    const double a = log ? std::log(lo) : lo;
    const double b = log ? std::log(hi) : hi;
    const double step = (b - a) / static_cast<double>(n_bins);
    d.bin_edges.resize(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        const double e = k == n_bins ? b : a + step * static_cast<double>(k);
        d.bin_edges[k] = log ? std::exp(e) : e;
    }
    d.bin_edges.front() = lo;
    d.bin_edges.back() = hi;
    d.counts.assign(n_bins, 0);
    for (double x : values) {
        if (x < lo || x > hi) continue;
        const double pos = ((log ? std::log(x) : x) - a) / step;
        auto k = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
        k = std::min(k, n_bins - 1);
        ++d.counts[k];
    }
    d.bin_centers.resize(n_bins);
    d.bin_widths.resize(n_bins);
    d.density.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double l = d.bin_edges[k], r = d.bin_edges[k + 1];
        d.bin_widths[k] = r - l;
        d.bin_centers[k] = log ? std::sqrt(l * r) : 0.5 * (l + r);
        d.density[k] = normalizer == 0 ? 0.0
                                       : static_cast<double>(d.counts[k]) /
                                             (static_cast<double>(normalizer) * d.bin_widths[k]);
    }
    return d;
}

std::vector<double> signed_window(std::span<const double> sample, Side side, FitRange range) {
    std::vector<double> out;
    for (double c : sample) {
        const double x = side == Side::positive ? c : -c;
        if (x > range.lo && x <= range.hi) out.push_back(x);
    }
    return out;
}

void require_points(std::size_t n, const char* what) {
    if (n < 50)
        throw Error(ErrorKind::insufficient_data,
                    std::string(what) + ": only " + std::to_string(n) + " points in the fit range (need 50)");
}

stats::LineFit regress_nonempty(const DensityEstimate& d, bool log_x, RegressionMethod method, double tuning,
                                int max_iterations, std::size_t& used) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < d.counts.size(); ++k) {
        if (d.counts[k] == 0) continue;
        x.push_back(log_x ? std::log(d.bin_centers[k]) : d.bin_centers[k]);
        y.push_back(std::log(d.density[k]));
    }
    used = x.size();
    if (x.size() < 3) throw Error(ErrorKind::insufficient_data, "fewer than three non-empty bins in the fit range");
    return method == RegressionMethod::huber ? stats::huber_line(x, y, tuning, max_iterations) : stats::ols_line(x, y);
}

// Mean of an exponential with rate `rate` truncated to (0, w], shifted to start at 0.
double truncated_exp_mean(double rate, double w) {
    const double z = rate * w;
    if (std::abs(z) < 1e-6) return w / 2.0 - rate * w * w / 12.0;
    return 1.0 / rate - w / std::expm1(z);
}

double solve_truncated_exp_rate(std::span<const double> shifted, double w) {
    if (shifted.empty()) throw Error(ErrorKind::insufficient_data, "MLE on an empty window");
    const double target = stats::mean(shifted);
    double lo = -2000.0 / w, hi = 2000.0 / w;  // truncated_exp_mean is decreasing in rate
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (truncated_exp_mean(mid, w) > target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DensityEstimate estimate_density(std::span<const double> sample, Binning binning, std::size_t n_bins) {
    if (sample.empty()) throw Error(ErrorKind::insufficient_data, "density of an empty sample");
    if (n_bins == 0) n_bins = binning == Binning::linear ? kDefaultLinearBins : kDefaultLogBins;
    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    double lo = *mn, hi = *mx;
    if (binning == Binning::logarithmic && !(lo > 0.0))
        throw Error(ErrorKind::invalid_argument, "logarithmic binning needs strictly positive values");
    if (lo == hi) {
        if (binning == Binning::logarithmic) {
            lo /= std::sqrt(10.0);
            hi *= std::sqrt(10.0);
        } else {
            lo -= 0.5;
            hi += 0.5;
        }
        n_bins = 1;
    }
    return histogram(sample, binning, n_bins, lo, hi, sample.size());
}

DensityEstimate estimate_density(std::span<const double> sample, Binning binning, std::size_t n_bins, double lo,
                                 double hi) {
    if (sample.empty()) throw Error(ErrorKind::insufficient_data, "density of an empty sample");
    return histogram(sample, binning, n_bins, lo, hi, sample.size());
}

std::string to_string(FitModel model) {
    switch (model) {
        case FitModel::exp_tail_pos: return "exp_tail_pos";
        case FitModel::exp_tail_neg: return "exp_tail_neg";
        case FitModel::power_pos: return "power_pos";
        case FitModel::power_neg: return "power_neg";
        case FitModel::exp_shuffled: return "exp_shuffled";
    }
    return "unknown";
}

nlohmann::json to_json(const FitResult& fit) {
    return {{"model", to_string(fit.model)},
            {"estimate", fit.estimate},
            {"stderr", fit.stderr_},
            {"range", {fit.range.lo, fit.range.hi}},
            {"r2", fit.r2},
            {"n", fit.n},
            {"bins", fit.bins_used},
            {"iterations", fit.iterations}};
}

FitResult fit_exponential_tail(std::span<const double> sample, Side side, FitRange range, std::size_t n_bins) {
    const auto window = signed_window(sample, side, range);
    require_points(window.size(), "exponential tail fit");
    const auto d = histogram(window, Binning::linear, n_bins, range.lo, range.hi, sample.size());
    FitResult r;
    const auto line = regress_nonempty(d, false, RegressionMethod::ordinary, 0, 0, r.bins_used);
    r.model = side == Side::positive ? FitModel::exp_tail_pos : FitModel::exp_tail_neg;
    r.estimate = -line.slope;
    r.stderr_ = line.slope_se;
    r.range = range;
    r.r2 = line.r2;
    r.n = window.size();
    return r;
}

FitResult fit_power_bulk(std::span<const double> sample, Side side, FitRange range, std::size_t n_bins) {
    if (!(range.lo > 0.0)) throw Error(ErrorKind::invalid_argument, "power-law range must start above zero");
    const auto window = signed_window(sample, side, range);
    require_points(window.size(), "power-law bulk fit");
    const auto d = histogram(window, Binning::logarithmic, n_bins, range.lo, range.hi, sample.size());
    FitResult r;
    const auto line = regress_nonempty(d, true, RegressionMethod::ordinary, 0, 0, r.bins_used);
    r.model = side == Side::positive ? FitModel::power_pos : FitModel::power_neg;
    r.estimate = -line.slope;
    r.stderr_ = line.slope_se;
    r.range = range;
    r.r2 = line.r2;
    r.n = window.size();
    return r;
}

FitResult fit_shuffled_exponential(std::span<const double> sample, std::optional<FitRange> range, std::size_t n_bins,
                                   RegressionMethod method, double tuning, int max_iterations) {
    std::vector<double> mags;
    mags.reserve(sample.size());
    for (double c : sample)
        if (c != 0.0) mags.push_back(std::abs(c));
    require_points(mags.size(), "shuffled exponential fit");
    if (!range) {
        const double med = stats::quantile(mags, 0.5);
        const double lambda0 = std::log(2.0) / med;
        range = FitRange{0.0, std::min(6.0 / lambda0, *std::max_element(mags.begin(), mags.end()))};
    }
    const auto window = signed_window(mags, Side::positive, *range);
    require_points(window.size(), "shuffled exponential fit");
    const auto d = histogram(window, Binning::linear, n_bins, range->lo, range->hi, mags.size());
    FitResult r;
    const auto line = regress_nonempty(d, false, method, tuning, max_iterations, r.bins_used);
    r.model = FitModel::exp_shuffled;
    r.estimate = -line.slope;
    r.stderr_ = line.slope_se;
    r.range = *range;
    r.r2 = line.r2;
    r.n = window.size();
    r.iterations = line.iterations;
    return r;
}

IntervalCounts interval_counts(std::span<const double> sample, std::size_t n_intervals) {
    if (n_intervals == 0) throw Error(ErrorKind::invalid_argument, "need at least one interval");
    IntervalCounts out;
    out.positive.assign(n_intervals, 0);
    out.negative.assign(n_intervals, 0);
    const double n = static_cast<double>(n_intervals);
    for (std::size_t k = 1; k <= n_intervals; ++k) out.upper_edges.push_back(static_cast<double>(k) / n);
    for (double c : sample) {
        const double a = std::abs(c);
        if (!(a <= 1.0)) throw Error(ErrorKind::invalid_argument, "coefficient outside [-1, 1]");
        if (a == 0.0) {
            ++out.zeros;
            continue;
        }
        const auto k = static_cast<std::size_t>(
            std::lower_bound(out.upper_edges.begin(), out.upper_edges.end(), a) - out.upper_edges.begin());
        (c > 0 ? out.positive : out.negative)[std::min(k, n_intervals - 1)]++;
    }
    for (std::size_t k = 0; k < n_intervals; ++k) {
        out.log_positive.push_back(std::log10(1.0 + static_cast<double>(out.positive[k])));
        out.log_negative.push_back(std::log10(1.0 + static_cast<double>(out.negative[k])));
    }
    return out;
}

double mle_exponential_tail(std::span<const double> sample, Side side, FitRange range) {
    auto window = signed_window(sample, side, range);
    for (double& x : window) x -= range.lo;
    return solve_truncated_exp_rate(window, range.hi - range.lo);
}

double mle_power_bulk(std::span<const double> sample, Side side, FitRange range) {
    // ln C of a truncated power law C^-gamma is a truncated exponential with rate gamma - 1.
    auto window = signed_window(sample, side, range);
    const double lo = std::log(range.lo);
    for (double& x : window) x = std::log(x) - lo;
    return 1.0 + solve_truncated_exp_rate(window, std::log(range.hi) - lo);
}

}  // namespace invcorr
