#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "sle/drivers.hpp"
#include "sle/loewner.hpp"
#include "sle/observables.hpp"
#include "sle/quadrature.hpp"

using namespace sle;

TEST_SUITE("observables") {

TEST_CASE("Green's function examples") {
    CHECK(green_interior(2.0, 3.0, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(green_interior(2.0, 2.0, {1.0, 1.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(green_capacity_shape(4.0, {0.0, 2.0}) == doctest::Approx(1.0));
    CHECK(green_capacity_shape(4.0, {1.0, 1.0}) == doctest::Approx(0.5));
    CHECK(green_capacity_shape(4.0, {3.0, 0.0}) == 0.0);
    CHECK(green_boundary(2.0, 4.0, -3.0) == doctest::Approx(9.0));
}

TEST_CASE("Green's function homogeneity and shape identities") {
    for (double kappa : {1.0, 8.0 / 3.0, 6.0}) {
        for (Complex z : {Complex(0.3, 0.7), Complex(-2.0, 0.1), Complex(0.0, 5.0)}) {
            const double rho = 1.7;
            const double a = 2.5;
            CHECK(green_interior(kappa, rho, a * z) ==
                  doctest::Approx(std::pow(a, rho / kappa + rho * rho / (8.0 * kappa)) *
                                  green_interior(kappa, rho, z)));
            CHECK(green_sle_shape(kappa, z) == doctest::Approx(green_interior(kappa, kappa - 8.0, z)));
            CHECK(green_capacity_shape(kappa, z) == doctest::Approx(green_interior(kappa, -8.0, z)));
            CHECK(green_capacity_shape(kappa, a * z) == doctest::Approx(green_capacity_shape(kappa, z)));
        }
    }
}

TEST_CASE("Green's function domain errors") {
    CHECK_THROWS_AS(green_interior(0.0, 1.0, {0.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(green_interior(2.0, 1.0, {0.0, -1.0}), PreconditionError);
    CHECK_THROWS_AS(green_sle_shape(8.0, {0.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(green_capacity_shape(2.0, {0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(green_boundary(2.0, 1.0, 0.0), PreconditionError);
}

TEST_CASE("martingale starts at the Green's function and vanishes after swallowing") {
    DriverConfig c;
    c.kappa = 6.0;
    c.rho = -2.0;
    c.force_point = InteriorForce{{0.2, 0.3}};
    c.horizon = 2.0;
    int swallowed = 0;
    for (std::uint64_t i = 0; i < 30; ++i) {
        RngStream rng(1, i);
        const DriverRun run = simulate_sle_rho(c, rng);
        const auto m = martingale_M_interior(run.track, 6.0, -2.0, grid_count(2.0, c.dt));
        CHECK(m.front() == doctest::Approx(green_interior(6.0, -2.0, {0.2, 0.3})));
        if (run.track.swallowed()) {
            ++swallowed;
            CHECK(m.back() == 0.0);
            CHECK(martingale_final(run.track, 6.0, -2.0) == 0.0);
        }
        CHECK_THROWS_AS(martingale_M_boundary(run.track, 6.0, -2.0), std::invalid_argument);
    }
    CHECK(swallowed > 0);
}

TEST_CASE("psi_U at time zero equals the quadrature of the Green's function") {
    const Region U = parse_region("-1,1,0.25,1.25");
    const QuadratureGrid grid = make_grid(U, 0.1);
    DriverConfig c;
    c.kappa = 4.0;
    c.horizon = 0.5;
    RngStream rng(2, 0);
    const RealPath d = simulate_brownian_driver(c, rng);
    const auto states = evolve_points(d, grid.nodes, 100);
    const auto psi = psi_U(states, grid.weights, 4.0, -4.0);
    CHECK(psi.front() ==
          doctest::Approx(integrate(grid, [](Complex z) { return green_interior(4.0, -4.0, z); })));
    CHECK(psi.size() == states.size());
    CHECK_THROWS_AS(psi_U(states, {1.0}, 4.0, -4.0), std::invalid_argument);
}

TEST_CASE("psi0 quadrature agrees with adaptive Gauss-Kronrod") {
    // kappa = 4, rho = -4: G = Im z^(1/2) / |z|.
    const Region U = parse_region("-1,1,0.5,1.5");
    const QuadratureResult q = psi0_interior(4.0, -4.0, U, 0.02);
    using boost::math::quadrature::gauss_kronrod;
    const double oracle = gauss_kronrod<double, 31>::integrate(
        [](double y) {
            return gauss_kronrod<double, 31>::integrate(
                [y](double x) { return std::sqrt(y) / std::hypot(x, y); }, -1.0, 1.0, 10, 1e-12);
        },
        0.5, 1.5, 10, 1e-12);
    CHECK(q.value == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(!q.too_coarse);
}

TEST_CASE("psi0 is additive over disjoint rectangles") {
    const double a = psi0_interior(3.0, 1.0, parse_region("-1,0,0.5,1"), 0.01).value;
    const double b = psi0_interior(3.0, 1.0, parse_region("0,1,0.5,1"), 0.01).value;
    const double ab = psi0_interior(3.0, 1.0, parse_region("-1,0,0.5,1;0,1,0.5,1"), 0.01).value;
    CHECK(ab == doctest::Approx(a + b).epsilon(1e-9));
    CHECK_THROWS_AS(psi0_interior(0.5, -4.0, parse_region("-1,1,0,1"), 0.01), PreconditionError);
    CHECK_NOTHROW(psi0_interior(0.5, -4.0, parse_region("1,2,0,1"), 0.01));
}

TEST_CASE("boundary interval grid") {
    const IntervalGrid g = make_interval_grid(0.5, 2.0, 30);
    CHECK(g.nodes.size() == 30);
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    CHECK(sum == doctest::Approx(1.5));
    for (Complex z : g.nodes) CHECK(z.imag() == 0.0);
    CHECK_THROWS_AS(make_interval_grid(-1.0, 1.0, 10), PreconditionError);
    CHECK_THROWS_AS(make_interval_grid(2.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("capacity Green estimate vanishes when the point cannot be reached by time t") {
    const EstimateReport r = capacity_green_mc(6.0, {0.0, 3.0}, 1.0, 200, 1);
    CHECK(r.value == 0.0);
    CHECK(r.ci_lo < 1e-12);
    CHECK_THROWS_AS(capacity_green_mc(6.0, {0.0, 3.0}, 0.0, 10, 1), PreconditionError);
    CHECK_THROWS_AS(capacity_green_mc(6.0, {0.0, 3.0}, 1.0, 0, 1), PreconditionError);
}

TEST_CASE("capacity Green estimate is scale invariant and tends to G for large t") {
    const EstimateReport a = capacity_green_mc(6.0, {0.3, 0.5}, 1.0, 600, 3);
    const EstimateReport b = capacity_green_mc(6.0, {0.6, 1.0}, 4.0, 600, 4);
    const double se = std::hypot(a.stderr_, b.stderr_);
    CHECK(std::abs(a.value - b.value) < 3.0 * se);
    CapacityGreenOptions radial;
    radial.simulator = SwallowSimulator::radial;
    const EstimateReport big = capacity_green_mc(4.0, {0.1, 0.5}, 200.0, 400, 5, radial);
    const double g = green_capacity_shape(4.0, {0.1, 0.5});
    CHECK(big.value == doctest::Approx(g).epsilon(0.02));
}

TEST_CASE("lattice capacity constant is positive and linear in t") {
    CKappaConfig cfg;
    cfg.lattice_pitch = 0.25;
    cfg.lattice_xmax = 6.0;
    cfg.per_cell = 4;
    const EstimateReport one = capacity_constant_lattice(6.0, 1.0, cfg, 11);
    const EstimateReport four = capacity_constant_lattice(6.0, 4.0, cfg, 11);
    CHECK(one.value > 0.0);
    CHECK(four.value / one.value == doctest::Approx(4.0).epsilon(1e-6));
    cfg.max_rel_ci = 1e-6;
    CHECK(capacity_constant_lattice(6.0, 1.0, cfg, 11).has_flag("undersampled"));
}

TEST_CASE("occupation route capacity constant is positive") {
    CKappaConfig cfg;
    cfg.n_curves = 40;
    cfg.horizon = 2.0;
    cfg.dt = 2e-3;
    cfg.quad_h = 0.1;
    const EstimateReport r = capacity_constant_occupation(6.0, cfg, 3);
    CHECK(r.value > 0.0);
    CHECK(r.ci_lo < r.value);
    CHECK(r.value < r.ci_hi);
    cfg.U = parse_region("-1,1,0,0");
    CHECK_THROWS(capacity_constant_occupation(6.0, cfg, 3));
}

}  // TEST_SUITE
