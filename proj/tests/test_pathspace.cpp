#include <doctest.h>

#include <algorithm>

#include "sle/drivers.hpp"
#include "sle/pathspace.hpp"
#include "sle/stats.hpp"

using namespace sle;

namespace {

RealPath identity_path(double dt, double lifetime, bool limit = true) {
    return sample_function<double>(dt, lifetime, [](double t) { return t; }, limit);
}

}  // namespace

TEST_SUITE("pathspace") {

TEST_CASE("grid_count counts points strictly below the span") {
    CHECK(grid_count(1.0, 0.1) == 10);
    CHECK(grid_count(1.05, 0.1) == 11);
    CHECK(grid_count(0.3, 0.1) == 3);
    CHECK(grid_count(2.0, 1e-3) == 2000);
}

TEST_CASE("kill shortens to the kill time") {
    const RealPath f = identity_path(0.01, 2.0);
    const RealPath g = kill(f, 1.0);
    CHECK(g.lifetime == doctest::Approx(1.0));
    CHECK(g.size() == 100);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.values[k] == f.values[k]);
    REQUIRE(g.terminal_limit);
    CHECK(*g.terminal_limit == doctest::Approx(1.0));
}

TEST_CASE("kill after the lifetime leaves the path unchanged") {
    const RealPath f = identity_path(0.01, 2.0);
    const RealPath g = kill(f, 3.0);
    CHECK(g.lifetime == f.lifetime);
    CHECK(g.values == f.values);
}

TEST_CASE("kill rejects non-positive times and times past a truncation horizon") {
    const RealPath f = identity_path(0.01, 2.0);
    CHECK_THROWS_AS(kill(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kill(f, -1.0), std::invalid_argument);
    const RealPath tr = make_truncated_path(0.1, std::vector<double>(10, 0.0), 1.0);
    CHECK_THROWS_AS(kill(tr, 1.5), std::out_of_range);
}

TEST_CASE("concat of affine pieces") {
    const RealPath f = identity_path(0.01, 1.0);
    const RealPath g = sample_function<double>(0.01, 1.0, [](double s) { return s; }, true);
    const RealPath h = concat(f, g);
    CHECK(h.lifetime == doctest::Approx(2.0));
    CHECK(h.value_at(1.5) == doctest::Approx(1.5));
}

TEST_CASE("concat with a zero path gives a plateau") {
    const RealPath f = sample_function<double>(0.01, 0.7, [](double t) { return std::sin(5 * t); }, true);
    const RealPath g = sample_function<double>(0.01, 1.0, [](double) { return 0.0; }, true);
    const RealPath h = concat(f, g);
    for (double t = 0.71; t < 1.69; t += 0.05) CHECK(h.value_at(t) == doctest::Approx(std::sin(3.5)));
}

TEST_CASE("concat of t^2 and -s") {
    const RealPath f = sample_function<double>(0.01, 1.0, [](double t) { return t * t; }, true);
    const RealPath g = sample_function<double>(0.01, 1.0, [](double s) { return -s; }, true);
    CHECK(concat(f, g).value_at(1.25) == doctest::Approx(0.75));
}

TEST_CASE("concat errors") {
    const RealPath f = identity_path(0.01, 1.0);
    const RealPath nolimit = identity_path(0.01, 1.0, false);
    const RealPath g = identity_path(0.01, 1.0);
    const RealPath shifted = sample_function<double>(0.01, 1.0, [](double s) { return 1.0 + s; }, true);
    const RealPath other_dt = identity_path(0.02, 1.0);
    CHECK_THROWS_AS(concat(nolimit, g), std::invalid_argument);
    CHECK_THROWS_AS(concat(f, shifted), std::invalid_argument);
    CHECK_THROWS_AS(concat(f, other_dt), std::invalid_argument);
}

TEST_CASE("concat_marked reports the junction") {
    const RealPath f = identity_path(0.01, 1.0);
    const RealPath g = identity_path(0.01, 0.3);
    CHECK(concat_marked(f, g).junction == 1.0);
    const RealPath f2 = identity_path(0.01, 0.5);
    const RealPath g2 = identity_path(0.01, 0.5);
    const MarkedPath<double> m = concat_marked(f2, g2);
    CHECK(m.path.lifetime == doctest::Approx(1.0));
    CHECK(m.junction == 0.5);
}

TEST_CASE("shift_restart examples") {
    const RealPath f = identity_path(0.01, 2.0);
    const RealPath g = shift_restart(f, 1.0);
    CHECK(g.lifetime == doctest::Approx(1.0));
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.values[k] == doctest::Approx(g.time(k)));
    const RealPath c = sample_function<double>(0.01, 1.0, [](double) { return 3.0; }, true);
    for (double v : shift_restart(c, 0.37).values) CHECK(v == 0.0);
    const RealPath s = sample_function<double>(0.01, 1.0, [](double t) { return 2.0 + std::cos(t); }, true);
    const RealPath s0 = shift_restart(s, 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s0.values[k] == doctest::Approx(s.values[k] - s.values[0]));
    CHECK_THROWS_AS(shift_restart(f, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(shift_restart(f, 2.5), std::invalid_argument);
}

TEST_CASE("lifetime additivity, junction continuity and split inverse on random paths") {
    RngStream rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double dt = 0.01;
        const std::size_t nf = 1 + static_cast<std::size_t>(rng.uniform() * 200);
        const std::size_t ng = 1 + static_cast<std::size_t>(rng.uniform() * 200);
        std::vector<double> fv(nf), gv(ng);
        double x = rng.normal();
        for (double& v : fv) v = (x += 0.1 * rng.normal());
        gv[0] = 0.0;
        for (std::size_t k = 1; k < ng; ++k) gv[k] = gv[k - 1] + 0.1 * rng.normal();
        const RealPath f = make_finite_path<double>(dt, fv, dt * static_cast<double>(nf), fv.back() + 0.1 * rng.normal());
        const RealPath g = make_finite_path<double>(dt, gv, dt * static_cast<double>(ng), gv.back() + 0.1 * rng.normal());
        const MarkedPath<double> m = concat_marked(f, g);
        CHECK(m.path.size() == nf + ng);
        CHECK(m.path.lifetime == doctest::Approx(f.lifetime + g.lifetime).epsilon(1e-14));
        // Left limit at the junction equals the first right value.
        CHECK(m.path.values[nf] == *f.terminal_limit + g.values[0]);
        const auto [f2, g2] = split_marked(m);
        REQUIRE(f2.size() == f.size());
        REQUIRE(g2.size() == g.size());
        for (std::size_t k = 0; k < nf; ++k) CHECK(f2.values[k] == f.values[k]);
        CHECK(*f2.terminal_limit == doctest::Approx(*f.terminal_limit).epsilon(1e-12));
        for (std::size_t k = 0; k < ng; ++k) CHECK(g2.values[k] == doctest::Approx(g.values[k]).epsilon(1e-12));
    }
}

TEST_CASE("weight process inverse and validation") {
    const WeightProcess w = linear_weight(2.0);
    CHECK(w.total() == 2.0);
    CHECK(w.inverse(1.0) == doctest::Approx(1.0));
    const WeightProcess s = step_weight(1.0);
    CHECK(s.total() == 1.0);
    CHECK(s.inverse(0.3) == doctest::Approx(1.0));
    WeightProcess bad;
    bad.times = {0.0, 1.0};
    bad.cumulative = {0.0, -1.0};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("sample_killed with a Dirac weight kills at the atom") {
    const RealPath f = identity_path(0.01, 3.0);
    RngStream rng(1, 0);
    const KilledSample<double> k = sample_killed(f, step_weight(1.0), rng);
    CHECK(k.weight == 1.0);
    CHECK(k.kill_time == doctest::Approx(1.0));
    CHECK(k.path.lifetime == doctest::Approx(1.0));
}

TEST_CASE("sample_killed with t^2 weight on Brownian paths is uniform on [0, 2]") {
    DriverConfig c;
    c.kappa = 1.0;
    c.dt = 1e-3;
    c.horizon = 3.0;
    std::vector<double> times;
    for (int i = 0; i < 2000; ++i) {
        RngStream rng(5, static_cast<std::uint64_t>(i));
        const KilledSample<double> k = sample_killed<double>(
            [&](RngStream& r) { return simulate_brownian_driver(c, r); },
            [](const RealPath&) { return linear_weight(2.0); }, rng);
        CHECK(k.weight == 2.0);
        times.push_back(k.kill_time);
    }
    std::vector<double> uni(2000);
    RngStream u(6, 0);
    for (double& x : uni) x = 2.0 * u.uniform();
    CHECK(ks_permutation_test(times, uni, 0, 1).p_value > 0.01);
    CHECK(*std::max_element(times.begin(), times.end()) <= 2.0);
}

TEST_CASE("zero and infinite weights") {
    const RealPath f = identity_path(0.01, 1.0);
    RngStream rng(2, 0);
    WeightProcess zero;
    zero.times = {0.0, 1.0};
    zero.cumulative = {0.0, 0.0};
    const KilledSample<double> k = sample_killed(f, zero, rng);
    CHECK(k.weight == 0.0);
    CHECK(k.path.values == f.values);
    WeightProcess inf;
    inf.times = {0.0, 1.0};
    inf.cumulative = {0.0, kInf};
    CHECK_THROWS(sample_killed(f, inf, rng));
}

TEST_CASE("occupation-weighted kill times match a brute-force resampling oracle") {
    // theta_t = time spent in the strip [0.2, 0.8] up to t, for sqrt(1) B on [0, 2).
    const double dt = 1e-3;
    DriverConfig c;
    c.kappa = 1.0;
    c.dt = dt;
    c.horizon = 2.0;
    std::vector<double> a, wa, b, wb;
    for (int i = 0; i < 1000; ++i) {
        RngStream rng(9, static_cast<std::uint64_t>(i));
        const RealPath p = simulate_brownian_driver(c, rng);
        WeightProcess w;
        w.times = {0.0};
        w.cumulative = {0.0};
        std::vector<std::size_t> inside;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const bool in = p.values[k] >= 0.2 && p.values[k] <= 0.8;
            if (in) inside.push_back(k);
            w.times.push_back(p.time(k) + dt);
            w.cumulative.push_back(w.cumulative.back() + (in ? dt : 0.0));
        }
        const KilledSample<double> ks = sample_killed(p, w, rng);
        if (ks.weight == 0.0) continue;
        a.push_back(ks.kill_time);
        wa.push_back(ks.weight);
        RngStream oracle(10, static_cast<std::uint64_t>(i));
        const std::size_t pick = inside[static_cast<std::size_t>(oracle.uniform() * inside.size())];
        b.push_back(p.time(pick) + dt * oracle.uniform());
        wb.push_back(dt * static_cast<double>(inside.size()));
    }
    REQUIRE(a.size() > 200);
    CHECK(ks_weighted_test(a, wa, b, wb).p_value > 0.01);
}

}  // TEST_SUITE
