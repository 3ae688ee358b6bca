#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sle/drivers.hpp"
#include "sle/observables.hpp"
#include "sle/region.hpp"
#include "sle/stats.hpp"

namespace sle {

/// Outcome of one statistical check. `passed` is decided only by the
/// thresholds recorded in the report.
struct TestReport {
    std::string name;
    std::string hypotheses;
    nlohmann::ordered_json statistics = nlohmann::ordered_json::object();
    nlohmann::ordered_json thresholds = nlohmann::ordered_json::object();
    nlohmann::ordered_json sample_sizes = nlohmann::ordered_json::object();
    bool passed = false;
    double runtime_s = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;

    nlohmann::ordered_json to_json() const;
};

nlohmann::ordered_json to_json(const TwoSampleResult& r);

struct SlitExactnessOptions {
    double dt = 1e-4;
    double tol = 1e-3;
};

/// Constant driver lambda = 0: g_1(i) = sqrt(3) and gamma(1) = 2i.
TestReport test_slit_exactness(const SlitExactnessOptions& opt, std::uint64_t seed);

struct GirsanovOptions {
    double kappa = 8.0 / 3.0;
    double rho = 8.0 / 3.0 - 8.0;
    Complex z0{0.0, 1.0};
    double t = 0.25;
    std::size_t n = 10000;
    double dt = 1e-3;
    double swallow_eps = 1e-3;
    double alpha = 0.01;
    double min_ess = 100.0;
};

/// Brownian drivers weighted by M_t(z0)/G(z0) against SLE_kappa(rho) drivers
/// alive at t; KS on lambda_t and Im Z_t, plus the mean-weight identity.
TestReport test_girsanov_reweighting(const GirsanovOptions& opt, std::uint64_t seed);

struct CapacityDecompositionOptions {
    double kappa = 6.0;
    Region U{{{-1.0, 1.0, 0.25, 1.25}}};
    std::size_t n = 1000;
    double dt = 1e-3;
    double horizon = 8.0;
    double swallow_eps = 1e-3;
    double alpha = 0.01;
    double max_truncation = 0.05;
};

/// Force point drawn from 1_U G dA followed by SLE_kappa(-8) to swallowing,
/// against chordal curves marked by their occupation measure of U.
TestReport test_capacity_decomposition(const CapacityDecompositionOptions& opt, std::uint64_t seed);

struct OccupationIdentityOptions {
    double kappa = 6.0;
    Region U1{{{-1.0, 1.0, 0.25, 0.75}}};
    Region U2{{{-1.0, 1.0, 0.75, 1.25}}};
    std::size_t n = 1000;
    double dt = 1e-3;
    double horizon = 8.0;
    /// Pitch of the flow grid used to report the occupation left after the horizon.
    double tail_grid_h = 0.1;
    double quad_h = 0.01;
};

/// Ratio of mean occupation times of two regions against the ratio of
/// integrals of the capacity Green's function.
TestReport test_occupation_identity(const OccupationIdentityOptions& opt, std::uint64_t seed);

struct NaturalDecompositionOptions {
    double kappa = 8.0 / 3.0;
    Region U{{{-0.5, 0.5, 0.5, 1.0}}};
    /// Boxes for the content ratio check.
    Region Ua{{{-0.5, 0.5, 0.5, 0.75}}};
    Region Ub{{{-0.5, 0.5, 0.75, 1.0}}};
    std::size_t n = 1000;
    double r = 0.02;
    double dt = 1e-4;
    double horizon = 2.0;
    double swallow_eps = 1e-3;
    double pitch_fraction = 0.125;
    double alpha = 0.01;
    double ratio_tol = 0.15;
    double min_ess = 100.0;
    double max_truncation = 0.05;
};

/// Force point drawn from 1_U times the SLE Green's function followed by
/// SLE_kappa(kappa-8), against chordal curves weighted by fixed-r Minkowski
/// content in U.
TestReport test_natural_decomposition(const NaturalDecompositionOptions& opt, std::uint64_t seed);

struct TailBoundOptions {
    double kappa = 2.0;
    double rho = -8.0;
    Complex z0{0.0, 1.0};
    std::vector<double> b_list{1.0, 2.0, 3.0};
    std::size_t n = 1000;
    double dt = 1e-2;
    double swallow_eps = 1e-3;
};

/// P[T <= 2|z0|^2 e^{2b}] >= 1 - 2 e^{-2b/kappa} and T >= Im(z0)^2/4.
TestReport test_tail_bound(const TailBoundOptions& opt, std::uint64_t seed);

struct BrownianBoundOptions {
    double kappa = 1.0;
    double a = 1.0;
    double b = 1.0;
    std::size_t n = 10000;
    double dt = 1e-2;
    double horizon = 50.0;
};

/// P[|sqrt(kappa) B_t| <= a t + b for all t] >= 1 - 2 e^{-2ab/kappa}.
TestReport test_brownian_bound(const BrownianBoundOptions& opt, std::uint64_t seed);

struct StrongMarkovOptions {
    double kappa = 1.0;
    double level = 0.5;
    double horizon = 2.0;
    double dt = 1e-3;
    double t_fixed = 1.0;
    double tau_fixed = 0.5;
    std::size_t n = 10000;
    std::size_t permutations = 999;
    double alpha = 0.01;
};

/// Killing followed by concatenation with a fresh Brownian path: hitting
/// time, uniform weight on [0, 2], and a deterministic time.
TestReport test_strong_markov_concat(const StrongMarkovOptions& opt, std::uint64_t seed);

struct BmDiskOptions {
    std::size_t n = 10000;
    double dt = 1e-4;
    Complex start_far{0.8, 0.0};
    Complex martingale_start{0.3, 0.0};
    double s = 0.05;
    double t = 0.1;
    Complex pole{0.5, 0.0};
    double target_radius = 0.05;
    double min_hit_fraction = 0.99;
    /// h-transform substep: dt_h = min(dt, step_factor * d^2), d = distance to
    /// the circle or the pole.
    double step_factor = 0.01;
    double min_step = 1e-12;
};

/// Planar Brownian motion in the unit disk: expected exit time, martingale
/// M_t = f(B_t) + t/2, and the h-transform towards an interior point.
TestReport test_bm_disk(const BmDiskOptions& opt, std::uint64_t seed);

struct BoundaryMartingaleOptions {
    double kappa = 6.0;
    double rho = -2.0;
    double x0 = 1.0;
    double t = 0.25;
    double I_lo = 0.5;
    double I_hi = 2.0;
    std::size_t n = 10000;
    std::size_t n_trend = 400;
    std::vector<double> trend_times{0.25, 0.5, 1.0};
    std::size_t interval_nodes = 60;
    double dt = 1e-3;
    double swallow_eps = 1e-3;
    double alpha = 0.01;
    double min_ess = 100.0;
};

/// Boundary force point: reweighting check, Psi_0(I) closed form, and the
/// supermartingale trend of E[Psi_t(I)].
TestReport test_boundary_martingale(const BoundaryMartingaleOptions& opt, std::uint64_t seed);

struct PsiDecayOptions {
    double kappa = 8.0 / 3.0;
    double rho = 8.0 / 3.0 - 8.0;
    Region U{{{-1.0, 1.0, 0.1, 1.1}}};
    std::vector<double> times{1.0, 4.0, 16.0};
    std::size_t n = 200;
    double dt = 4e-3;
    double quad_h = 0.1;
};

/// E[Psi_t(U)] <= pi 2^{1/kappa} R^{2 + (rho+2)/kappa + rho^2/(8 kappa)} t^{-1/kappa}.
TestReport test_psi_decay(const PsiDecayOptions& opt, std::uint64_t seed);

struct CrossSimulatorOptions {
    double kappa = 6.0;
    double rho = -8.0;
    Complex z0{0.0, 1.0};
    std::size_t n = 1000;
    double dt = 1e-3;
    double horizon = 1000.0;
    double swallow_eps = 1e-3;
    std::size_t permutations = 999;
    double alpha = 0.01;
};

/// Swallow times from the driver SDE against the time-changed diffusion.
TestReport test_cross_simulator(const CrossSimulatorOptions& opt, std::uint64_t seed);

struct CapacityGreenTestOptions {
    double kappa = 6.0;
    std::size_t n = 1000;
    std::vector<double> scales{0.5, 1.0};
    CapacityGreenOptions mc;
};

/// G_1(3i) = 0 and G_4(2ic) = G_1(ic).
TestReport test_capacity_green(const CapacityGreenTestOptions& opt, std::uint64_t seed);

struct CKappaTestOptions {
    double kappa = 6.0;
    CKappaConfig cfg;
    double max_rel_diff = 0.10;
};

/// Occupation route and lattice route for C_{kappa,1}.
TestReport test_c_kappa1(const CKappaTestOptions& opt, std::uint64_t seed);

/// Parameters of named tests as flat key/value overrides.
using ParamMap = std::map<std::string, std::string>;

struct NamedTest {
    std::string name;
    std::string summary;
    std::function<TestReport(const ParamMap&, bool quick, std::uint64_t seed)> run;
};

/// All registered tests in a fixed order.
const std::vector<NamedTest>& test_registry();
const NamedTest& find_test(const std::string& name);

}  // namespace sle
