#include <doctest.h>

#include <cmath>

#include "sle/drivers.hpp"
#include "sle/stats.hpp"

using namespace sle;

namespace {

DriverConfig interior(double kappa, double rho, Complex z0, double horizon) {
    DriverConfig c;
    c.kappa = kappa;
    c.rho = rho;
    c.force_point = InteriorForce{z0};
    c.horizon = horizon;
    return c;
}

}  // namespace

TEST_SUITE("drivers") {

TEST_CASE("drift examples") {
    CHECK(interior_drift(3.0, {0.0, 1.0}) == 0.0);
    CHECK(interior_drift(3.0, {1.0, 1.0}) == doctest::Approx(-1.5));
    CHECK(interior_drift(-2.0, {-2.0, 0.0}) == doctest::Approx(-1.0));
    CHECK(boundary_drift(2.0, 1.0) == doctest::Approx(-2.0));
    CHECK(boundary_drift(2.0, -1.0) == doctest::Approx(2.0));
}

TEST_CASE("Brownian driver has variance kappa t and is reproducible") {
    DriverConfig c;
    c.kappa = 3.0;
    c.dt = 0.01;
    c.horizon = 1.0;
    std::vector<double> end;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        RngStream rng(3, i);
        const RealPath p = simulate_brownian_driver(c, rng);
        CHECK(p.values.front() == 0.0);
        end.push_back(p.values.back());
    }
    const MeanSe m = mean_se(end);
    // Last grid point is t = 0.99.
    CHECK(std::abs(m.mean) < 4.0 * m.se);
    CHECK(m.sd * m.sd == doctest::Approx(3.0 * 0.99).epsilon(0.05));
    RngStream a(3, 0), b(3, 0);
    CHECK(simulate_brownian_driver(c, a).values == simulate_brownian_driver(c, b).values);
    c.force_point = InteriorForce{{0.0, 1.0}};
    RngStream r(0, 0);
    CHECK_THROWS_AS(simulate_brownian_driver(c, r), PreconditionError);
}

TEST_CASE("zero-noise interior flow matches the slit map") {
    // kappa -> 0 and rho = 0 leaves lambda = 0, so Z_t = sqrt(z0^2 + 4t).
    DriverConfig c = interior(1e-12, 0.0, {0.0, 3.0}, 1.0);
    RngStream rng(1, 0);
    const DriverRun run = simulate_sle_rho(c, rng);
    CHECK(run.outcome == Outcome::horizon);
    CHECK(std::abs(run.track.final_z - Complex(0.0, std::sqrt(5.0))) < 1e-5);
    CHECK(run.track.final_log_d == doctest::Approx(std::log(3.0 / std::sqrt(5.0))).epsilon(1e-5));
}

TEST_CASE("zero-noise boundary flow solves the Bessel ODE") {
    // dZ = (2 + rho) / Z dt and d log D = -2 / Z^2 dt.
    const double rho = 1.0;
    DriverConfig c;
    c.kappa = 1e-12;
    c.rho = rho;
    c.force_point = BoundaryForce{1.0};
    c.horizon = 1.0;
    RngStream rng(1, 0);
    const DriverRun run = simulate_sle_rho(c, rng);
    REQUIRE(run.outcome == Outcome::horizon);
    const double z2 = 1.0 + 2.0 * (2.0 + rho);
    CHECK(run.track.final_z.real() == doctest::Approx(std::sqrt(z2)).epsilon(1e-4));
    CHECK(run.track.final_log_d == doctest::Approx(-std::log(z2) / (2.0 + rho)).epsilon(2e-3));
    // lambda = -rho (Z - x0) / (2 + rho) along the same ODE.
    CHECK(run.track.final_lambda == doctest::Approx(-rho * (std::sqrt(z2) - 1.0) / (2.0 + rho)).epsilon(2e-3));
}

TEST_CASE("tracks satisfy the flow ODEs when re-integrated on the grid") {
    // Interior: d log Y = -2 / |Z|^2 dt. Boundary: d log D = -2 / Z^2 dt.
    DriverConfig in = interior(2.0, 1.0, {1.0, 1.0}, 0.1);
    in.dt = 1e-4;
    DriverConfig bd;
    bd.kappa = 6.0;
    bd.rho = -2.0;
    bd.force_point = BoundaryForce{1.0};
    bd.dt = 1e-4;
    bd.horizon = 0.05;
    for (std::uint64_t i = 0; i < 20; ++i) {
        RngStream r1(12, i), r2(13, i);
        const DriverRun a = simulate_sle_rho(in, r1);
        REQUIRE(a.outcome == Outcome::horizon);
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < a.track.z.size(); ++k)
            sum -= in.dt * (1.0 / std::norm(a.track.z[k]) + 1.0 / std::norm(a.track.z[k + 1]));
        const double logy = std::log(a.track.z.back().imag() / a.track.z.front().imag());
        CHECK(logy == doctest::Approx(sum).epsilon(0.02));
        const DriverRun b = simulate_sle_rho(bd, r2);
        if (b.outcome != Outcome::horizon) continue;
        double sb = 0.0;
        for (std::size_t k = 0; k + 1 < b.track.z.size(); ++k)
            sb -= bd.dt * (1.0 / std::norm(b.track.z[k]) + 1.0 / std::norm(b.track.z[k + 1]));
        CHECK(b.track.log_d.back() == doctest::Approx(sb).epsilon(0.05));
    }
}

TEST_CASE("direct swallow times scale with the square of the force point") {
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < 300; ++i) {
        RngStream r1(14, i), r2(15, i);
        const DriverRun x = simulate_sle_rho(interior(6.0, -8.0, {0.0, 1.0}, 100.0), r1);
        const DriverRun y = simulate_sle_rho(interior(6.0, -8.0, {0.0, 2.0}, 400.0), r2);
        if (x.track.swallowed()) a.push_back(x.track.swallow_time);
        if (y.track.swallowed()) b.push_back(y.track.swallow_time / 4.0);
    }
    CHECK(a.size() > 290);
    CHECK(b.size() > 290);
    CHECK(ks_permutation_test(a, b, 0, 1).p_value > 0.01);
}

TEST_CASE("interior force point height decreases and runs are reproducible") {
    const DriverConfig c = interior(2.0, 1.0, {0.5, 1.0}, 1.0);
    for (std::uint64_t i = 0; i < 20; ++i) {
        RngStream rng(7, i);
        const DriverRun run = simulate_sle_rho(c, rng);
        for (std::size_t k = 1; k < run.track.z.size(); ++k)
            CHECK(run.track.z[k].imag() <= run.track.z[k - 1].imag());
        CHECK(run.track.z.size() == run.driver.size());
        RngStream again(7, i);
        CHECK(simulate_sle_rho(c, again).driver.values == run.driver.values);
    }
}

TEST_CASE("swallowed runs end with a finite lifetime") {
    const DriverConfig c = interior(6.0, 0.0, {0.0, 0.3}, 2.0);
    int swallowed = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        RngStream rng(2, i);
        const DriverRun run = simulate_sle_rho(c, rng);
        if (run.outcome != Outcome::swallowed) continue;
        ++swallowed;
        CHECK(run.driver.lifetime == run.track.swallow_time);
        CHECK(run.track.swallow_time >= 0.09 / 4.0 - 1e-12);
        CHECK_NOTHROW(run.driver.validate());
    }
    CHECK(swallowed > 10);
}

TEST_CASE("substep budget exhaustion is reported as unresolved") {
    DriverConfig c = interior(2.0, 0.0, {0.0, 1.0}, 1.0);
    c.max_substeps = 10;
    RngStream rng(1, 0);
    const DriverRun run = simulate_sle_rho(c, rng);
    CHECK(run.outcome == Outcome::unresolved);
    CHECK(run.note == "substep budget exhausted");
    CHECK(to_string(run.outcome) == "unresolved");
}

TEST_CASE("missing or invalid configuration is rejected") {
    RngStream rng(0, 0);
    DriverConfig c = interior(2.0, 0.0, {0.0, 1.0}, 1.0);
    c.rho.reset();
    CHECK_THROWS_AS(simulate_sle_rho(c, rng), PreconditionError);
    c = interior(-1.0, 0.0, {0.0, 1.0}, 1.0);
    CHECK_THROWS_AS(simulate_sle_rho(c, rng), PreconditionError);
    c = interior(2.0, 0.0, {0.0, -1.0}, 1.0);
    CHECK_THROWS_AS(simulate_sle_rho(c, rng), PreconditionError);
    c.force_point = BoundaryForce{0.0};
    CHECK_THROWS_AS(simulate_sle_rho(c, rng), PreconditionError);
}

TEST_CASE("extended simulation rejects rho above kappa/2 - 4") {
    RngStream rng(0, 0);
    const DriverConfig c = interior(2.0, -2.0, {0.0, 1.0}, 1.0);
    try {
        simulate_extended(c, rng);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("rho <= kappa/2 - 4") != std::string::npos);
    }
}

TEST_CASE("extended paths switch to Brownian motion at the junction") {
    const DriverConfig c = interior(2.0, -6.0, {0.0, 1.0}, 3.0);
    std::vector<double> incr;
    int joined = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        RngStream rng(4, i);
        const ExtendedRun run = simulate_extended(c, rng);
        if (!std::isfinite(run.junction)) continue;
        CHECK(run.junction >= 0.25 - 1e-12);
        CHECK(run.driver.values.size() == grid_count(std::min(c.horizon, run.driver.span()), c.dt));
        if (run.junction >= c.horizon - 0.5) continue;
        ++joined;
        const std::size_t j = static_cast<std::size_t>(std::ceil(run.junction / c.dt)) + 1;
        for (std::size_t k = j; k + 1 < run.driver.size(); ++k)
            incr.push_back(run.driver.values[k + 1] - run.driver.values[k]);
    }
    REQUIRE(joined > 50);
    const MeanSe m = mean_se(incr);
    CHECK(m.sd * m.sd == doctest::Approx(2.0 * c.dt).epsilon(0.03));
    CHECK(std::abs(m.mean) < 4.0 * m.se);
}

TEST_CASE("radial diffusion basics") {
    const DriverConfig c = interior(3.0, -1.0, {0.0, 1.5}, 1.0);
    RadialOptions opt;
    opt.keep_path = true;
    opt.s_max = 6.0;
    RngStream rng(1, 0);
    const RadialDiffusionSample s = simulate_radial_diffusion(c, rng, opt);
    REQUIRE(!s.v.empty());
    CHECK(s.v.front() == 0.0);
    CHECK(s.swallow_time >= 1.5 * 1.5 / 4.0);
    CHECK(s.tail_bound >= 0.0);
}

TEST_CASE("radial swallow time scales with the square of the force point") {
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < 1500; ++i) {
        RngStream r1(8, i), r2(9, i);
        a.push_back(simulate_radial_diffusion(interior(4.0, 0.0, {0.5, 1.0}, 1.0), r1).swallow_time);
        b.push_back(simulate_radial_diffusion(interior(4.0, 0.0, {1.0, 2.0}, 1.0), r2).swallow_time / 4.0);
    }
    CHECK(ks_permutation_test(a, b, 0, 1).p_value > 0.01);
}

}  // TEST_SUITE
