#include "sle/verify.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sle/loewner.hpp"
#include "sle/zipper.hpp"

namespace sle {

nlohmann::ordered_json TestReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["hypotheses"] = hypotheses;
    j["passed"] = passed;
    j["statistics"] = statistics;
    j["thresholds"] = thresholds;
    j["sample_sizes"] = sample_sizes;
    j["runtime_s"] = runtime_s;
    j["seed"] = seed;
    j["notes"] = notes;
    return j;
}

nlohmann::ordered_json to_json(const TwoSampleResult& r) {
    return {{"statistic", r.statistic}, {"p_value", r.p_value}, {"n1", r.n1},
            {"n2", r.n2},               {"n_eff1", r.n_eff1},   {"n_eff2", r.n_eff2},
            {"weighted", r.weighted},   {"method", r.method}};
}

TestReport test_slit_exactness(const SlitExactnessOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const RealPath driver = sample_function<double>(opt.dt, 1.0, [](double) { return 0.0; }, true);
    const std::vector<SlitMap> maps = slit_maps(driver);
    Complex g(0.0, 1.0);
    for (const SlitMap& m : maps) g = slit_forward(m, g);
    const TracedCurve curve = trace_curve(driver);
    const Complex tip = curve.points.back();
    double lam_max = 0.0;
    for (double v : driver.values) lam_max = std::max(lam_max, std::abs(v));
    const double e_g = std::abs(g - Complex(std::sqrt(3.0), 0.0));
    const double e_tip = std::abs(tip - Complex(0.0, 2.0));
    TestReport r;
    r.name = "slit-map-exactness";
    r.hypotheses = "with lambda = 0, g_t(z) = sqrt(z^2 + 4t), so g_1(i) = sqrt(3) and gamma(1) = 2i";
    r.seed = seed;
    r.statistics["max_abs_lambda"] = lam_max;
    r.statistics["g1_i"] = {g.real(), g.imag()};
    r.statistics["g1_i_error"] = e_g;
    r.statistics["gamma_1"] = {tip.real(), tip.imag()};
    r.statistics["gamma_1_error"] = e_tip;
    r.statistics["curve_end_time"] = curve.end_time();
    r.thresholds["abs_tolerance"] = opt.tol;
    r.sample_sizes["maps"] = maps.size();
    r.passed = lam_max == 0.0 && e_g <= opt.tol && e_tip <= opt.tol && std::abs(curve.end_time() - 1.0) < 1e-12;
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

namespace {

/// Typed reads from a ParamMap; every key must be consumed.
class Params {
public:
    Params(const ParamMap& m, std::string test) : m_(m), test_(std::move(test)) {}

    void get(const char* key, double& v) {
        if (auto s = take(key)) v = parse_number(*s, key);
    }
    void get(const char* key, std::size_t& v) {
        if (auto s = take(key)) {
            const double d = parse_number(*s, key);
            if (!(d >= 1.0) || d != std::floor(d) || d > 1e12)
                throw std::invalid_argument(std::string(key) + " must be a positive integer");
            v = static_cast<std::size_t>(d);
        }
    }
    void get(const char* key, Complex& v) {
        if (auto s = take(key)) v = parse_complex(*s);
    }
    void get(const char* key, Region& v) {
        if (auto s = take(key)) v = parse_region(*s);
    }
    void get(const char* key, std::vector<double>& v) {
        if (auto s = take(key)) v = parse_number_list(*s, key);
    }
    void finish() const {
        for (const auto& [k, val] : m_)
            if (!used_.count(k)) throw std::invalid_argument("parameter '" + k + "' does not apply to test " + test_);
    }

private:
    std::optional<std::string> take(const char* key) {
        auto it = m_.find(key);
        if (it == m_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    const ParamMap& m_;
    std::string test_;
    std::set<std::string> used_;
};

std::vector<NamedTest> build_registry() {
    std::vector<NamedTest> v;
    v.push_back({"slit-map-exactness", "constant driver closed forms", [](const ParamMap& m, bool, std::uint64_t seed) {
                     SlitExactnessOptions o;
                     Params p(m, "slit-map-exactness");
                     p.get("dt", o.dt);
                     p.get("tol", o.tol);
                     p.finish();
                     return test_slit_exactness(o, seed);
                 }});
    v.push_back({"girsanov-reweighting", "Brownian drivers weighted by M_t/G against direct SLE_kappa(rho)",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     GirsanovOptions o;
                     if (quick) o.n = 2000;
                     Params p(m, "girsanov-reweighting");
                     p.get("kappa", o.kappa);
                     o.rho = o.kappa - 8.0;
                     p.get("rho", o.rho);
                     p.get("z0", o.z0);
                     p.get("t", o.t);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("swallow_eps", o.swallow_eps);
                     p.get("alpha", o.alpha);
                     p.get("min_ess", o.min_ess);
                     p.finish();
                     return test_girsanov_reweighting(o, seed);
                 }});
    v.push_back({"tail-bound", "swallow-time tail bound for rho <= kappa/2 - 4",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     TailBoundOptions o;
                     if (quick) o.n = 300;
                     Params p(m, "tail-bound");
                     p.get("kappa", o.kappa);
                     p.get("rho", o.rho);
                     p.get("z0", o.z0);
                     p.get("b_list", o.b_list);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("swallow_eps", o.swallow_eps);
                     p.finish();
                     return test_tail_bound(o, seed);
                 }});
    v.push_back({"cross-simulator", "driver SDE against the angle diffusion",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     CrossSimulatorOptions o;
                     if (quick) o.n = 300;
                     Params p(m, "cross-simulator");
                     p.get("kappa", o.kappa);
                     p.get("rho", o.rho);
                     p.get("z0", o.z0);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("horizon", o.horizon);
                     p.get("swallow_eps", o.swallow_eps);
                     p.get("permutations", o.permutations);
                     p.get("alpha", o.alpha);
                     p.finish();
                     return test_cross_simulator(o, seed);
                 }});
    v.push_back({"capacity-green", "zero set and scaling of G_t", [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     CapacityGreenTestOptions o;
                     if (quick) o.n = 300;
                     Params p(m, "capacity-green");
                     p.get("kappa", o.kappa);
                     p.get("n", o.n);
                     p.get("scales", o.scales);
                     p.get("dt", o.mc.dt);
                     p.get("swallow_eps", o.mc.swallow_eps);
                     p.finish();
                     return test_capacity_green(o, seed);
                 }});
    v.push_back({"c-kappa1", "occupation route against lattice route", [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     CKappaTestOptions o;
                     if (quick) {
                         o.cfg.n_curves = 100;
                         o.cfg.per_cell = 2;
                         o.max_rel_diff = 0.5;
                     }
                     Params p(m, "c-kappa1");
                     p.get("kappa", o.kappa);
                     p.get("region", o.cfg.U);
                     p.get("n", o.cfg.n_curves);
                     p.get("dt", o.cfg.dt);
                     p.get("horizon", o.cfg.horizon);
                     p.get("quad_h", o.cfg.quad_h);
                     p.get("per_cell", o.cfg.per_cell);
                     p.get("lattice_pitch", o.cfg.lattice_pitch);
                     p.get("lattice_xmax", o.cfg.lattice_xmax);
                     p.get("max_rel_diff", o.max_rel_diff);
                     p.finish();
                     return test_c_kappa1(o, seed);
                 }});
    v.push_back({"occupation-identity", "occupation ratio of two regions against the Green ratio",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     OccupationIdentityOptions o;
                     if (quick) o.n = 200;
                     Params p(m, "occupation-identity");
                     p.get("kappa", o.kappa);
                     p.get("U1", o.U1);
                     p.get("U2", o.U2);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("horizon", o.horizon);
                     p.get("quad_h", o.quad_h);
                     p.get("tail_grid_h", o.tail_grid_h);
                     p.finish();
                     return test_occupation_identity(o, seed);
                 }});
    v.push_back({"capacity-decomposition", "SLE_kappa(-8) arms against occupation-marked chordal curves",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     CapacityDecompositionOptions o;
                     if (quick) o.n = 200;
                     Params p(m, "capacity-decomposition");
                     p.get("kappa", o.kappa);
                     p.get("region", o.U);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("horizon", o.horizon);
                     p.get("swallow_eps", o.swallow_eps);
                     p.get("alpha", o.alpha);
                     p.get("max_truncation", o.max_truncation);
                     p.finish();
                     return test_capacity_decomposition(o, seed);
                 }});
    v.push_back({"natural-decomposition", "SLE_kappa(kappa-8) arms against content-weighted chordal curves",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     NaturalDecompositionOptions o;
                     if (quick) {
                         o.n = 200;
                         o.r = 0.04;
                         o.dt = 4e-4;
                         o.ratio_tol = 0.3;
                         o.min_ess = 30;
                     }
                     Params p(m, "natural-decomposition");
                     p.get("kappa", o.kappa);
                     p.get("region", o.U);
                     p.get("Ua", o.Ua);
                     p.get("Ub", o.Ub);
                     p.get("n", o.n);
                     p.get("r", o.r);
                     p.get("dt", o.dt);
                     p.get("horizon", o.horizon);
                     p.get("swallow_eps", o.swallow_eps);
                     p.get("pitch_fraction", o.pitch_fraction);
                     p.get("alpha", o.alpha);
                     p.get("ratio_tol", o.ratio_tol);
                     p.get("min_ess", o.min_ess);
                     p.get("max_truncation", o.max_truncation);
                     p.finish();
                     return test_natural_decomposition(o, seed);
                 }});
    v.push_back({"psi-decay", "decay bound for E[Psi_t(U)]", [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     PsiDecayOptions o;
                     if (quick) o.n = 50;
                     Params p(m, "psi-decay");
                     p.get("kappa", o.kappa);
                     o.rho = o.kappa - 8.0;
                     p.get("rho", o.rho);
                     p.get("region", o.U);
                     p.get("t_list", o.times);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("quad_h", o.quad_h);
                     p.finish();
                     return test_psi_decay(o, seed);
                 }});
    v.push_back({"strong-markov-concat", "killing and concatenation of Brownian paths",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     StrongMarkovOptions o;
                     if (quick) {
                         o.n = 2000;
                         o.permutations = 199;
                     }
                     Params p(m, "strong-markov-concat");
                     p.get("kappa", o.kappa);
                     p.get("level", o.level);
                     p.get("horizon", o.horizon);
                     p.get("dt", o.dt);
                     p.get("n", o.n);
                     p.get("permutations", o.permutations);
                     p.get("alpha", o.alpha);
                     p.finish();
                     return test_strong_markov_concat(o, seed);
                 }});
    v.push_back({"brownian-bound", "linear envelope bound for Brownian motion",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     BrownianBoundOptions o;
                     if (quick) o.n = 2000;
                     Params p(m, "brownian-bound");
                     p.get("kappa", o.kappa);
                     p.get("a", o.a);
                     p.get("b", o.b);
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("horizon", o.horizon);
                     p.finish();
                     return test_brownian_bound(o, seed);
                 }});
    v.push_back({"bm-disk", "planar Brownian motion in the unit disk", [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     BmDiskOptions o;
                     if (quick) o.n = 2000;
                     Params p(m, "bm-disk");
                     p.get("n", o.n);
                     p.get("dt", o.dt);
                     p.get("pole", o.pole);
                     p.get("target_radius", o.target_radius);
                     p.finish();
                     return test_bm_disk(o, seed);
                 }});
    v.push_back({"boundary-martingale", "boundary force point reweighting and Psi(I)",
                 [](const ParamMap& m, bool quick, std::uint64_t seed) {
                     BoundaryMartingaleOptions o;
                     if (quick) {
                         o.n = 2000;
                         o.n_trend = 100;
                     }
                     Params p(m, "boundary-martingale");
                     p.get("kappa", o.kappa);
                     o.rho = o.kappa - 8.0;
                     p.get("rho", o.rho);
                     p.get("x0", o.x0);
                     p.get("t", o.t);
                     p.get("I_lo", o.I_lo);
                     p.get("I_hi", o.I_hi);
                     p.get("n", o.n);
                     p.get("n_trend", o.n_trend);
                     p.get("t_list", o.trend_times);
                     p.get("dt", o.dt);
                     p.get("alpha", o.alpha);
                     p.finish();
                     return test_boundary_martingale(o, seed);
                 }});
    return v;
}

}  // namespace

const std::vector<NamedTest>& test_registry() {
    static const std::vector<NamedTest> r = build_registry();
    return r;
}

const NamedTest& find_test(const std::string& name) {
    for (const NamedTest& t : test_registry())
        if (t.name == name) return t;
    std::string known;
    for (const NamedTest& t : test_registry()) known += (known.empty() ? "" : ", ") + t.name;
    throw std::invalid_argument("unknown test '" + name + "' (known: " + known + ")");
}

}  // namespace sle
