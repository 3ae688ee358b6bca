#include <doctest.h>

#include <algorithm>

#include "sle/rng.hpp"
#include "sle/stats.hpp"

using namespace sle;

namespace {

double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pts = a;
    pts.insert(pts.end(), b.begin(), b.end());
    double d = 0.0;
    for (double x : pts) {
        const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [x](double v) { return v <= x; })) /
                          static_cast<double>(a.size());
        const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [x](double v) { return v <= x; })) /
                          static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed, double shift = 0.0) {
    RngStream rng(seed, 0);
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal() + shift;
    return v;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("unit-weight KS statistic equals the classical one") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto a = normals(50 + s, s);
        const auto b = normals(70, s + 100, 0.3);
        const double d = brute_ks(a, b);
        CHECK(ks_statistic(a, b) == doctest::Approx(d));
        CHECK(ks_statistic(a, b, std::vector<double>(a.size(), 2.0), std::vector<double>(b.size(), 0.5)) ==
              doctest::Approx(d));
        CHECK(ks_statistic(b, a) == doctest::Approx(d));
    }
}

TEST_CASE("KS handles ties") {
    const std::vector<double> a{1.0, 1.0, 2.0, 2.0};
    CHECK(ks_statistic(a, a) == 0.0);
    CHECK(ks_statistic({1.0, 1.0}, {1.0, 2.0}) == doctest::Approx(0.5));
}

TEST_CASE("KS p-values") {
    const auto a = normals(400, 1);
    const auto b = normals(400, 2);
    const auto c = normals(400, 3, 1.0);
    const TwoSampleResult same = ks_permutation_test(a, b, 199, 5);
    CHECK(same.p_value > 0.01);
    CHECK(same.p_value <= 1.0);
    CHECK(ks_permutation_test(a, c, 199, 5).p_value < 0.01);
    CHECK(ks_permutation_test(a, c, 0, 5).p_value < 1e-6);
    const TwoSampleResult w = ks_weighted_test(a, std::vector<double>(400, 1.0), b, {});
    CHECK(w.p_value >= 0.0);
    CHECK(w.p_value <= 1.0);
    CHECK(w.n_eff1 == doctest::Approx(400.0));
    CHECK(kolmogorov_sf(1.358) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(kolmogorov_sf(0.0) == doctest::Approx(1.0));
}

TEST_CASE("effective sample size") {
    CHECK(effective_sample_size(std::vector<double>(10, 3.0)) == doctest::Approx(10.0));
    CHECK(effective_sample_size({1.0, 0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("chi-square goodness of fit") {
    const ChiSquareResult perfect = chi_square_gof({25, 25, 50}, {0.25, 0.25, 0.5});
    CHECK(perfect.statistic == doctest::Approx(0.0));
    CHECK(perfect.dof == 2.0);
    CHECK(perfect.p_value == doctest::Approx(1.0));
    CHECK(chi_square_gof({90, 10}, {0.5, 0.5}).p_value < 1e-6);
    CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("Wilson interval") {
    const Interval zero = wilson_interval(0, 10);
    CHECK(zero.lo == doctest::Approx(0.0));
    CHECK(zero.hi > 0.2);
    const Interval half = wilson_interval(50, 100);
    CHECK(half.lo + half.hi == doctest::Approx(1.0));
    CHECK(half.lo < 0.5);
    const Interval all = wilson_interval(10, 10);
    CHECK(all.hi == doctest::Approx(1.0));
}

TEST_CASE("mean and standard error") {
    const MeanSe m = mean_se({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

}  // TEST_SUITE
