#include "support.hpp"

#include "invcorr/distfit.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace invcorr;
using Catch::Approx;

namespace {

// Inverse-CDF draws from lambda*exp(-lambda*x) truncated to [lo, hi].
std::vector<double> truncated_exp(std::size_t n, double lambda, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = std::exp(-lambda * lo), b = std::exp(-lambda * hi);
    std::vector<double> out(n);
    for (auto& x : out) x = -std::log(a - u(rng) * (a - b)) / lambda;
    return out;
}

// Inverse-CDF draws from x^-gamma on [lo, hi], gamma != 1.
std::vector<double> truncated_power(std::size_t n, double gamma, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double e = 1.0 - gamma;
    const double a = std::pow(lo, e), b = std::pow(hi, e);
    std::vector<double> out(n);
    for (auto& x : out) x = std::pow(a + u(rng) * (b - a), 1.0 / e);
    return out;
}

double integral(const DensityEstimate& d) {
    double s = 0;
    for (std::size_t k = 0; k < d.density.size(); ++k) s += d.density[k] * d.bin_widths[k];
    return s;
}

}  // namespace

TEST_CASE("uniform draws give a flat density") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(100'000);
    for (auto& v : x) v = u(rng);
    // 10 bins keep 10^4 draws per bin, so 5% is five standard errors
    const auto d = estimate_density(x, Binning::linear, 10);
    for (double p : d.density) CHECK(p == Approx(1.0).epsilon(0.05));
    CHECK(integral(d) == Approx(1.0).margin(1e-6));
    CHECK(std::accumulate(d.counts.begin(), d.counts.end(), std::size_t{0}) == x.size());
}

TEST_CASE("default bin counts") {
    const auto x = testing::normal_draws(500, 2);
    CHECK(estimate_density(x, Binning::linear).density.size() == kDefaultLinearBins);
    std::vector<double> pos;
    for (double v : x) pos.push_back(std::abs(v) + 1e-3);
    CHECK(estimate_density(pos, Binning::logarithmic).density.size() == kDefaultLogBins);
}

TEST_CASE("a point mass lands in one bin") {
    const std::vector<double> x(200, 0.25);
    for (auto b : {Binning::linear, Binning::logarithmic}) {
        const auto d = estimate_density(x, b);
        REQUIRE(d.counts.size() == 1);
        CHECK(d.counts[0] == 200);
        CHECK(integral(d) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("log bins grow geometrically") {
    const auto x = truncated_power(5000, 0.5, 1e-5, 1e-2, 3);
    const auto d = estimate_density(x, Binning::logarithmic, 12);
    for (std::size_t k = 1; k < d.bin_widths.size(); ++k)
        CHECK(d.bin_widths[k] / d.bin_widths[k - 1] == Approx(d.bin_widths[1] / d.bin_widths[0]).epsilon(1e-9));
    CHECK(d.bin_widths[1] > d.bin_widths[0]);
    CHECK(integral(d) == Approx(1.0).margin(1e-6));
}

TEST_CASE("density estimation rejects bad input") {
    CHECK_THROWS_AS(estimate_density(std::vector<double>{}, Binning::linear), Error);
    CHECK_THROWS_AS(estimate_density(std::vector<double>{-1.0, 2.0}, Binning::logarithmic), Error);
}

TEST_CASE("exponential tail rate is recovered") {
    const auto x = truncated_exp(100'000, 10.0, 0.1, 0.6, 4);
    const auto f = fit_exponential_tail(x, Side::positive);
    CHECK(f.estimate == Approx(10.0).margin(0.3));
    CHECK(f.n == x.size());
    CHECK(f.model == FitModel::exp_tail_pos);
    CHECK(mle_exponential_tail(x, Side::positive) == Approx(10.0).margin(0.3));
}

TEST_CASE("mirrored samples give equal tails") {
    auto x = truncated_exp(20'000, 9.0, 0.0, 1.0, 5);
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) x.push_back(-x[i]);
    const auto pos = fit_exponential_tail(x, Side::positive);
    const auto neg = fit_exponential_tail(x, Side::negative);
    CHECK(std::abs(pos.estimate - neg.estimate) <= std::hypot(pos.stderr_, neg.stderr_));
    CHECK(neg.model == FitModel::exp_tail_neg);
}

TEST_CASE("tail fits need fifty points") {
    const auto x = truncated_exp(40, 10.0, 0.1, 0.6, 6);
    try {
        (void)fit_exponential_tail(x, Side::positive);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_data);
        CHECK(std::string(e.what()).find("40") != std::string::npos);
    }
}

TEST_CASE("scaling the sample rescales lambda") {
    const auto x = truncated_exp(30'000, 8.0, 0.0, 1.0, 7);
    const double s = 0.5;
    std::vector<double> y;
    for (double v : x) y.push_back(s * v);
    const auto a = fit_exponential_tail(x, Side::positive, {0.1, 0.6});
    const auto b = fit_exponential_tail(y, Side::positive, {0.1 * s, 0.6 * s});
    CHECK(b.estimate == Approx(a.estimate / s).epsilon(1e-6));
}

TEST_CASE("power-law exponent is recovered") {
    const auto x = truncated_power(100'000, 0.7, 1e-5, 1e-2, 8);
    const auto f = fit_power_bulk(x, Side::positive);
    CHECK(f.estimate == Approx(0.7).margin(0.02));
    CHECK(mle_power_bulk(x, Side::positive) == Approx(0.7).margin(0.02));
}

TEST_CASE("a flat density has exponent zero, a log-uniform one exponent one") {
    const auto flat = truncated_power(100'000, 0.0, 1e-5, 1e-2, 9);
    const auto f = fit_power_bulk(flat, Side::positive);
    CHECK(std::abs(f.estimate) < 3 * f.stderr_ + 0.02);

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(std::log(1e-5), std::log(1e-2));
    std::vector<double> lu(100'000);
    for (auto& v : lu) v = -std::exp(u(rng));
    CHECK(fit_power_bulk(lu, Side::negative).estimate == Approx(1.0).margin(0.02));
}

TEST_CASE("the power exponent is scale invariant") {
    const auto x = truncated_power(50'000, 0.6, 1e-6, 1.0, 11);
    std::vector<double> y;
    for (double v : x) y.push_back(3 * v);
    const auto a = fit_power_bulk(x, Side::positive, {1e-5, 1e-2});
    const auto b = fit_power_bulk(y, Side::positive, {3e-5, 3e-2});
    CHECK(b.estimate == Approx(a.estimate).epsilon(1e-6));
}

TEST_CASE("shuffled exponential rate is recovered") {
    std::mt19937_64 rng(12);
    std::exponential_distribution<double> e(23.3);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<double> x(100'000);
    for (auto& v : x) v = (coin(rng) ? 1 : -1) * std::min(e(rng), 1.0);
    const auto f = fit_shuffled_exponential(x);
    CHECK(f.estimate == Approx(23.3).margin(0.5));
    CHECK(f.model == FitModel::exp_shuffled);
    CHECK(f.iterations >= 1);
    CHECK(f.iterations <= 100);

    SECTION("ordinary and robust agree on clean data") {
        const auto o = fit_shuffled_exponential(x, std::nullopt, 25, RegressionMethod::ordinary);
        CHECK(std::abs(o.estimate - f.estimate) <= std::max(o.stderr_, f.stderr_));
    }

    SECTION("one percent gross outliers barely move the robust fit") {
        auto y = x;
        for (std::size_t i = 0; i < y.size() / 100; ++i) y[i] = 0.9;
        const auto r = fit_shuffled_exponential(y);
        CHECK(std::abs(r.estimate - f.estimate) < 0.02 * f.estimate);
    }

    SECTION("outliers inside the window sway plain least squares far more") {
        auto y = x;
        for (std::size_t i = 0; i < y.size() / 100; ++i) y[i] = 0.9;
        const FitRange wide{0.0, 1.0};
        const auto rc = fit_shuffled_exponential(x, wide, 50);
        const auto rd = fit_shuffled_exponential(y, wide, 50);
        const auto oc = fit_shuffled_exponential(x, wide, 50, RegressionMethod::ordinary);
        const auto od = fit_shuffled_exponential(y, wide, 50, RegressionMethod::ordinary);
        CHECK(std::abs(rd.estimate - rc.estimate) < 0.05 * rc.estimate);
        CHECK(std::abs(od.estimate - oc.estimate) > 0.5 * oc.estimate);
    }
}

TEST_CASE("interval counts place coefficients by magnitude") {
    const auto c = interval_counts(std::vector<double>{0.05, -0.05, 0.95});
    REQUIRE(c.positive.size() == 10);
    CHECK(c.positive[0] == 1);
    CHECK(c.negative[0] == 1);
    CHECK(c.positive[9] == 1);
    CHECK(c.negative[9] == 0);
    CHECK(c.log_positive[9] == Approx(std::log10(2.0)));
    CHECK(c.log_negative[5] == 0.0);
}

TEST_CASE("interval counts conserve the sample and respect symmetry") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(5000);
    for (auto& v : x) v = u(rng);
    x.push_back(0.0);
    x.push_back(0.0);
    const auto c = interval_counts(x);
    const auto total = std::accumulate(c.positive.begin(), c.positive.end(), std::size_t{0}) +
                       std::accumulate(c.negative.begin(), c.negative.end(), std::size_t{0});
    CHECK(total == x.size() - 2);
    CHECK(c.zeros == 2);

    std::vector<double> sym(x.begin(), x.begin() + 1000);
    for (std::size_t i = 0; i < 1000; ++i) sym.push_back(-sym[i]);
    const auto s = interval_counts(sym);
    CHECK(s.positive == s.negative);
    CHECK_THROWS_AS(interval_counts(std::vector<double>{1.5}), Error);
}

TEST_CASE("fit results serialize") {
    const auto x = truncated_exp(5000, 10.0, 0.1, 0.6, 14);
    const auto j = to_json(fit_exponential_tail(x, Side::positive));
    CHECK(j["model"] == "exp_tail_pos");
    CHECK(j["n"] == 5000);
    CHECK(j["range"][1].get<double>() == 0.6);
}
