#include "support.hpp"

#include "invcorr/stats.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace invcorr;
using Catch::Approx;

TEST_CASE("population moments") {
    const std::vector<double> x{1, 2, 3};
    CHECK(stats::mean(x) == 2.0);
    CHECK(stats::variance(x) == Approx(2.0 / 3.0).epsilon(1e-15));
    const auto z = stats::standardize(x);
    CHECK(z[0] == Approx(-std::sqrt(1.5)).epsilon(1e-14));
    CHECK(z[1] == Approx(0.0).margin(1e-15));
    CHECK(z[2] == Approx(std::sqrt(1.5)).epsilon(1e-14));
}

TEST_CASE("degenerate series are detected relative to their scale") {
    CHECK(stats::is_degenerate(std::vector<double>{5, 5, 5}));
    CHECK(stats::is_degenerate(std::vector<double>{1e9, 1e9, 1e9}));
    CHECK_FALSE(stats::is_degenerate(std::vector<double>{1e-9, 2e-9}));
    CHECK_THROWS_AS(stats::standardize(std::vector<double>{2, 2}), Error);
}

TEST_CASE("pearson matches the long-double oracle") {
    const auto x = testing::normal_draws(500, 1);
    auto y = testing::normal_draws(500, 2);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.4 * x[i];
    CHECK(stats::pearson(x, y) == Approx(testing::ref_corr(x, y)).margin(1e-13));
    CHECK(stats::pearson(x, x) == 1.0);
    CHECK_THROWS_AS(stats::pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("pearson is symmetric bit for bit") {
    const auto x = testing::normal_draws(300, 3);
    const auto y = testing::normal_draws(300, 4);
    CHECK(stats::pearson(x, y) == stats::pearson(y, x));
}

TEST_CASE("type 7 quantile") {
    std::vector<double> v{4, 1, 3, 2};
    CHECK(stats::quantile(v, 0.0) == 1.0);
    CHECK(stats::quantile(v, 1.0) == 4.0);
    CHECK(stats::quantile(v, 0.5) == 2.5);
    CHECK(stats::quantile(v, 1.0 / 3.0) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("OLS recovers a noiseless line") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(1.5 - 0.25 * v);
    const auto f = stats::ols_line(x, y);
    CHECK(f.slope == Approx(-0.25).epsilon(1e-14));
    CHECK(f.intercept == Approx(1.5).epsilon(1e-14));
    CHECK(f.r2 == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Huber line ignores gross outliers") {
    std::vector<double> x, y;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 0.05);
    for (int i = 0; i < 200; ++i) {
        x.push_back(i * 0.01);
        y.push_back(2.0 - 3.0 * x.back() + z(rng));
    }
    for (int i = 0; i < 10; ++i) y[static_cast<std::size_t>(i * 19)] += 5.0;
    const auto robust = stats::huber_line(x, y);
    const auto plain = stats::ols_line(x, y);
    CHECK(std::abs(robust.slope + 3.0) < 0.05);
    CHECK(std::abs(robust.slope + 3.0) < std::abs(plain.slope + 3.0));
    CHECK(robust.iterations >= 1);
}

TEST_CASE("normal cdf against erf") {
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0})
        CHECK(stats::normal_cdf(x) == Approx(0.5 * (1.0 + std::erf(x / std::sqrt(2.0)))).epsilon(1e-13));
}

TEST_CASE("Kolmogorov survival function against its alternating series") {
    for (double t : {0.3, 0.6, 1.0, 1.36, 2.0}) {
        double s = 0;
        for (int k = 1; k < 200; ++k) s += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
        CHECK(stats::kolmogorov_sf(t) == Approx(std::clamp(s, 0.0, 1.0)).margin(1e-10));
    }
    CHECK(stats::kolmogorov_sf(1.358) == Approx(0.05).margin(5e-4));
}

TEST_CASE("KS self test gives zero") {
    const auto x = testing::normal_draws(100, 9);
    CHECK(stats::ks_two_sample(x, x) == 0.0);
}

TEST_CASE("KS statistic of a uniform grid") {
    std::vector<double> u;
    for (int i = 1; i <= 10; ++i) u.push_back((i - 0.5) / 10.0);
    CHECK(stats::ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) == Approx(0.05).epsilon(1e-12));
}

TEST_CASE("F survival function against quadrature of the density") {
    const double d1 = 3, d2 = 40;
    auto pdf = [&](double x) {
        const double lb = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
        return std::exp(0.5 * d1 * std::log(d1 / d2) + (0.5 * d1 - 1) * std::log(x) -
                        0.5 * (d1 + d2) * std::log1p(d1 * x / d2) - lb);
    };
    for (double f : {0.5, 1.0, 2.84, 5.0}) {
        const double tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            pdf, f, std::numeric_limits<double>::infinity(), 15, 1e-12);
        CHECK(stats::fisher_f_sf(f, d1, d2) == Approx(tail).epsilon(1e-8));
    }
}
