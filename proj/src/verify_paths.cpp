#include <chrono>
#include <cmath>

#include "sle/parallel.hpp"
#include "sle/pathspace.hpp"
#include "sle/verify.hpp"

namespace sle {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RealPath brownian(double kappa, double dt, double horizon, RngStream& rng) {
    DriverConfig c;
    c.kappa = kappa;
    c.dt = dt;
    c.horizon = horizon;
    return simulate_brownian_driver(c, rng);
}

}  // namespace

TestReport test_strong_markov_concat(const StrongMarkovOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opt.t_fixed > 0.0) || opt.t_fixed >= opt.horizon) throw PreconditionError("need 0 < t_fixed < horizon");
    if (!(opt.tau_fixed > 0.0) || opt.tau_fixed >= opt.horizon) throw PreconditionError("need 0 < tau_fixed < horizon");
    const std::size_t n = opt.n;
    const double kappa = opt.kappa;
    const double cover = opt.horizon + 2.0 * opt.dt;
    std::vector<double> hit_value(n), ref_value(n), det_value(n);
    std::vector<double> w_value(n), w_time(n), w_weight(n), ref2_value(n), ref2_time(n), ref2_weight(n);
    const std::uint64_t s_hit = splitmix64(seed ^ 0x11);
    const std::uint64_t s_ref = splitmix64(seed ^ 0x22);
    const std::uint64_t s_w = splitmix64(seed ^ 0x33);
    const std::uint64_t s_ref2 = splitmix64(seed ^ 0x44);
    const std::uint64_t s_det = splitmix64(seed ^ 0x55);

    parallel_for(n, [&](std::size_t i) {
        {
            // Kill at the first grid time at or above the level (capped at the horizon).
            RngStream rng(s_hit, i);
            const RealPath f = brownian(kappa, opt.dt, opt.horizon, rng);
            double tau = opt.horizon;
            for (std::size_t k = 1; k < f.size(); ++k)
                if (f.values[k] >= opt.level) {
                    tau = f.time(k);
                    break;
                }
            const KilledSample<double> ks = sample_killed(f, step_weight(tau), rng);
            const RealPath g = brownian(kappa, opt.dt, cover - tau, rng);
            const RealPath h = concat(ks.path, g, brownian_bridge_evaluator(kappa, rng));
            hit_value[i] = h.value_at(opt.t_fixed);
        }
        {
            RngStream rng(s_ref, i);
            ref_value[i] = brownian(kappa, opt.dt, opt.horizon, rng).value_at(opt.t_fixed);
        }
        {
            // Kill time from d(t ^ 2): uniform on [0, 2] with total mass 2.
            RngStream rng(s_w, i);
            const RealPath f = brownian(kappa, opt.dt, opt.horizon, rng);
            KilledSample<double> ks = sample_killed(f, linear_weight(opt.horizon), rng);
            auto bridge = brownian_bridge_evaluator(kappa, rng);
            if (ks.kill_time < f.span()) ks.path.terminal_limit = bridge(f, ks.kill_time);
            const RealPath g = brownian(kappa, opt.dt, cover - ks.kill_time, rng);
            const MarkedPath<double> m = concat_marked(ks.path, g, bridge);
            w_value[i] = m.path.value_at(opt.t_fixed);
            w_time[i] = m.junction;
            w_weight[i] = ks.weight;
        }
        {
            RngStream rng(s_ref2, i);
            const RealPath f = brownian(kappa, opt.dt, opt.horizon, rng);
            const WeightProcess theta = linear_weight(opt.horizon);
            ref2_value[i] = f.value_at(opt.t_fixed);
            ref2_time[i] = theta.inverse(rng.uniform_open_left() * theta.total());
            ref2_weight[i] = theta.total();
        }
        {
            RngStream rng(s_det, i);
            const RealPath f = brownian(kappa, opt.dt, opt.horizon, rng);
            const RealPath k = kill(f, opt.tau_fixed);
            const RealPath g = brownian(kappa, opt.dt, cover - opt.tau_fixed, rng);
            det_value[i] = concat(k, g, brownian_bridge_evaluator(kappa, rng)).value_at(opt.t_fixed);
        }
    });

    const TwoSampleResult hit = ks_permutation_test(hit_value, ref_value, opt.permutations, splitmix64(seed ^ 0x66));
    const TwoSampleResult wv = ks_weighted_test(w_value, w_weight, ref2_value, ref2_weight);
    const TwoSampleResult wt = ks_weighted_test(w_time, w_weight, ref2_time, ref2_weight);
    const TwoSampleResult det = ks_permutation_test(det_value, ref_value, opt.permutations, splitmix64(seed ^ 0x77));

    TestReport r;
    r.name = "strong-markov-concat";
    r.hypotheses =
        "killing sqrt(kappa)B at a stopping time and continuing with an independent copy preserves the "
        "Brownian law; killing by the kernel d(t ^ 2) and continuing gives Brownian paths marked by a "
        "uniform time with weight 2";
    r.seed = seed;
    r.statistics["hitting_time"] = to_json(hit);
    r.statistics["weighted_value"] = to_json(wv);
    r.statistics["weighted_junction"] = to_json(wt);
    r.statistics["deterministic_time"] = to_json(det);
    r.thresholds["min_p_value"] = opt.alpha;
    r.sample_sizes["per_sample"] = n;
    r.passed = hit.p_value > opt.alpha && wv.p_value > opt.alpha && wt.p_value > opt.alpha && det.p_value > opt.alpha;
    r.runtime_s = seconds_since(t0);
    return r;
}

TestReport test_brownian_bound(const BrownianBoundOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opt.a > 0.0) || !(opt.b > 0.0)) throw PreconditionError("Brownian bound needs a, b > 0");
    if (!(opt.kappa > 0.0)) throw PreconditionError("kappa must be positive");
    const std::size_t steps = grid_count(opt.horizon, opt.dt);
    const double sd = std::sqrt(opt.kappa * opt.dt);
    const double var = opt.kappa * opt.dt;
    std::vector<int> inside(opt.n, 0);
    parallel_for(opt.n, [&](std::size_t i) {
        RngStream rng(seed, i);
        double x = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = static_cast<double>(k) * opt.dt;
            const double t1 = t + opt.dt;
            const double x1 = x + sd * rng.normal();
            const double lim0 = opt.a * t + opt.b;
            const double lim1 = opt.a * t1 + opt.b;
            if (std::abs(x1) > lim1) return;
            // The boundary is linear in t, so the bridge crossing probabilities are exact.
            const double p_up = std::exp(-2.0 * (lim0 - x) * (lim1 - x1) / var);
            const double p_low = std::exp(-2.0 * (lim0 + x) * (lim1 + x1) / var);
            if (rng.uniform() < std::min(1.0, p_up + p_low)) return;
            x = x1;
        }
        inside[i] = 1;
    });
    std::size_t count = 0;
    for (int v : inside) count += static_cast<std::size_t>(v);
    const double p = static_cast<double>(count) / static_cast<double>(opt.n);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(opt.n));
    const double bound = 1.0 - 2.0 * std::exp(-2.0 * opt.a * opt.b / opt.kappa);

    TestReport r;
    r.name = "brownian-bound";
    r.hypotheses = "P[|sqrt(kappa) B_t| <= a t + b for all t] >= 1 - 2 exp(-2ab/kappa)";
    r.seed = seed;
    r.statistics["never_exit_fraction"] = p;
    r.statistics["stderr"] = se;
    r.statistics["bound"] = bound;
    r.thresholds["rule"] = "fraction + 3 stderr >= bound";
    r.sample_sizes["paths"] = opt.n;
    r.passed = p + 3.0 * se >= bound;
    if (bound <= 0.0) r.notes.push_back("bound is vacuous");
    r.notes.push_back("exits after the horizon are not observed, which can only raise the fraction");
    r.runtime_s = seconds_since(t0);
    return r;
}

}  // namespace sle
