#include <doctest.h>

#include <cmath>

#include "sle/drivers.hpp"
#include "sle/loewner.hpp"
#include "sle/observables.hpp"

using namespace sle;

namespace {

RealPath constant_driver(double c, double dt, double lifetime) {
    return sample_function<double>(dt, lifetime, [c](double) { return c; }, true);
}

RealPath brownian(double kappa, double dt, double horizon, std::uint64_t seed) {
    DriverConfig c;
    c.kappa = kappa;
    c.dt = dt;
    c.horizon = horizon;
    RngStream rng(seed, 0);
    return simulate_brownian_driver(c, rng);
}

}  // namespace

TEST_SUITE("loewner") {

TEST_CASE("evolve_points under a zero driver follows sqrt(z^2 + 4t)") {
    const RealPath d = constant_driver(0.0, 0.01, 1.0);
    const auto states = evolve_points(d, {{0.0, 3.0}, {1.0, 1.0}, {3.0, 0.0}});
    const LoewnerFlowState& end = states.back();
    CHECK(end.t == doctest::Approx(1.0));
    CHECK(std::abs(end.points[0].g - Complex(0.0, std::sqrt(5.0))) < 1e-12);
    CHECK(std::abs(end.points[0].gprime - Complex(3.0 / std::sqrt(5.0), 0.0)) < 1e-12);
    CHECK(std::abs(end.points[1].g - std::sqrt(Complex(4.0, 2.0))) < 1e-12);
    CHECK(end.points[2].g.real() == doctest::Approx(std::sqrt(13.0)));
    CHECK(end.points[2].gprime.real() == doctest::Approx(3.0 / std::sqrt(13.0)));
    CHECK(states.front().points[0].g == Complex(0.0, 3.0));
    CHECK(states.size() == d.size() + 1);
}

TEST_CASE("a point on the zero-driver slit is swallowed at time |z|^2 / 4") {
    const RealPath d = constant_driver(0.0, 0.01, 1.0);
    const auto states = evolve_points(d, {{0.0, 1.0}});
    CHECK(!states.back().points[0].alive);
    CHECK(states.back().points[0].swallow_time == doctest::Approx(0.25));
    CHECK(martingale_of_point(states.back().points[0], 0.0, 2.0, 1.0) == 0.0);
}

TEST_CASE("record_every thins the recorded states") {
    const RealPath d = constant_driver(0.0, 0.01, 1.0);
    const auto states = evolve_points(d, {{0.0, 3.0}}, 10);
    CHECK(states.size() == 11);
    CHECK(states[1].t == doctest::Approx(0.1));
    CHECK_THROWS_AS(evolve_points(d, {{0.0, 3.0}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(evolve_points(d, {{0.0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(evolve_points(d, {{0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("half-plane capacity of the hull is 2t") {
    const RealPath d = brownian(4.0, 1e-3, 1.0, 3);
    const Complex z(0.0, 1e4);
    const auto states = evolve_points(d, {z}, d.size() + 1);
    const Complex g = states.back().points[0].g;
    CHECK(((g - z) * z).real() == doctest::Approx(2.0 * states.back().t).epsilon(1e-3));
}

TEST_CASE("constant drivers trace vertical segments") {
    for (double c : {0.0, -1.5}) {
        TraceOptions exact;
        exact.exact = true;
        for (const TraceOptions& opt : {TraceOptions{}, exact}) {
            const TracedCurve curve = trace_curve(constant_driver(c, 1e-3, 1.0), opt);
            CHECK(curve.end_time() == doctest::Approx(1.0));
            CHECK(std::abs(curve.points.back() - Complex(c, 2.0)) < 1e-9);
            for (std::size_t i = 0; i < curve.size(); i += 97)
                CHECK(std::abs(curve.points[i] - Complex(c, 2.0 * std::sqrt(curve.times[i]))) < 1e-9);
        }
    }
}

TEST_CASE("zipper trace agrees with exact composition") {
    const RealPath d = brownian(3.0, 1e-3, 1.0, 5);
    TraceOptions exact;
    exact.exact = true;
    const TracedCurve a = trace_curve(d);
    const TracedCurve b = trace_curve(d, exact);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.points[i] - b.points[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("Brownian scaling maps the curve by the same factor") {
    const RealPath d = brownian(2.0, 1e-3, 0.5, 7);
    RealPath s = d;
    s.dt = 4.0 * d.dt;
    s.horizon = 4.0 * d.horizon;
    for (double& v : s.values) v *= 2.0;
    TraceOptions exact;
    exact.exact = true;
    const TracedCurve a = trace_curve(d, exact);
    const TracedCurve b = trace_curve(s, exact);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); i += 11) CHECK(std::abs(b.points[i] - 2.0 * a.points[i]) < 1e-9);
}

TEST_CASE("renewal: mapping out the first piece gives the curve of the shifted driver") {
    const RealPath full = brownian(2.0, 1e-3, 1.0, 9);
    const double T = 0.4;
    const RealPath first = kill(full, T);
    const RealPath rest = shift_restart(full, T);
    const double lamT = full.value_at(T);
    TraceOptions exact;
    exact.exact = true;
    const TracedCurve whole = trace_curve(full, exact);
    const TracedCurve tail = trace_curve(rest, exact);
    int checked = 0;
    for (std::size_t i = 0; i < whole.size(); ++i) {
        if (whole.times[i] < T + 0.1) continue;
        const auto st = evolve_points(first, {whole.points[i]}, first.size() + 1, 1e-12);
        const Complex mapped = st.back().points[0].g - lamT;
        const std::size_t j = static_cast<std::size_t>(std::llround((whole.times[i] - T) / rest.dt));
        CHECK(std::abs(mapped - tail.points[j]) < 1e-8);
        if (++checked == 20) break;
    }
    CHECK(checked == 20);
}

TEST_CASE("occupation time of the vertical slit") {
    const TracedCurve c = trace_curve(constant_driver(0.0, 1e-3, 1.0));
    const Region U = parse_region("-1,1,1,3");
    CHECK(occupation_time(c, U) == doctest::Approx(0.75).epsilon(2e-3));
    CHECK(occupation_time(c, parse_region("5,6,0,1")) == 0.0);
    CHECK(occupation_weight(c, parse_region("5,6,0,1")).total() == 0.0);
    double prev = 0.0;
    for (double upto = 0.1; upto <= 1.0; upto += 0.1) {
        const double o = occupation_time(c, U, upto);
        CHECK(o >= prev);
        prev = o;
    }
    const WeightProcess w = occupation_weight(c, U);
    CHECK_NOTHROW(w.validate());
    CHECK(w.total() == doctest::Approx(occupation_time(c, U)));
    CHECK(w.inverse(1e-9) == doctest::Approx(0.25).epsilon(5e-3));
}

TEST_CASE("tube area around a vertical segment") {
    const TracedCurve c = trace_curve(constant_driver(0.0, 1e-3, 1.0));
    const Region U = parse_region("-2,2,0,4");
    for (double r : {0.05, 0.1, 0.2}) {
        const double expected = 2.0 * r * 2.0 + kPi * r * r / 2.0;
        CHECK(neighborhood_area(c, U, r) == doctest::Approx(expected).epsilon(0.05));
    }
    const Region small = parse_region("-1,1,0,1");
    CHECK(neighborhood_area(c, small, 10.0) == doctest::Approx(2.0));
    CHECK(neighborhood_area(c, parse_region("5,6,0,1"), 0.1) == 0.0);
    CHECK_THROWS_AS(neighborhood_area(c, U, 0.0), std::invalid_argument);
    NeighborhoodOptions coarse;
    coarse.pitch_fraction = 0.5;
    CHECK_THROWS_AS(neighborhood_area(c, U, 0.1, coarse), std::invalid_argument);
}

TEST_CASE("tube area converges under grid refinement") {
    const TracedCurve c = trace_curve(brownian(8.0 / 3.0, 1e-4, 1.0, 2));
    const Region U = parse_region("-1,1,0.25,1.25");
    NeighborhoodOptions fine;
    fine.pitch_fraction = 0.0625;
    const double a = neighborhood_area(c, U, 0.05);
    const double b = neighborhood_area(c, U, 0.05, fine);
    CHECK(a == doctest::Approx(b).epsilon(0.02));
}

TEST_CASE("tube raster time marks lie on the curve") {
    const TracedCurve c = trace_curve(constant_driver(0.0, 1e-3, 1.0));
    const TubeRaster t = rasterize_tube(c, parse_region("-1,1,0.5,1.5"), 0.1);
    REQUIRE(!t.centers.empty());
    for (std::size_t i = 0; i < t.centers.size(); i += 13) {
        const double y = std::min(2.0, std::max(0.0, t.centers[i].imag()));
        CHECK(t.times[i] == doctest::Approx(y * y / 4.0).epsilon(1e-2));
    }
}

TEST_CASE("Minkowski content") {
    const TracedCurve seg = trace_curve(constant_driver(0.0, 1e-3, 1.0));
    const Region U = parse_region("-1,1,0.5,1.5");
    // A segment of length 1 has r^(d-2) area = 2 r^(d-1).
    const double kappa = 1e-9;
    CHECK(minkowski_content(seg, U, kappa, 0.05) == doctest::Approx(2.0).epsilon(0.03));
    CHECK_THROWS_AS(minkowski_content(seg, U, 8.0, 0.05), PreconditionError);
    const TracedCurve sle = trace_curve(brownian(8.0 / 3.0, 1e-4, 2.0, 4));
    const Region V = parse_region("-0.5,0.5,0.5,1");
    const double m1 = minkowski_content(sle, V, 8.0 / 3.0, 0.02);
    const double m2 = minkowski_content(sle, V, 8.0 / 3.0, 0.01);
    if (m1 > 0.0) CHECK(std::abs(m2 / m1 - 1.0) < 0.2);
    CHECK(minkowski_content(seg, parse_region("5,6,0,1"), 2.0, 0.05) == 0.0);
}

}  // TEST_SUITE
