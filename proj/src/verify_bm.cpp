#include <chrono>
#include <cmath>

#include "sle/parallel.hpp"
#include "sle/verify.hpp"

namespace sle {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Solution of Laplace f = -1 in the unit disk with zero boundary values.
double disk_f(Complex w) { return (1.0 - std::norm(w)) / 4.0; }

struct DiskStep {
    Complex w;
    bool exited = false;
    double exit_fraction = 0.0;
};

/// One Euler step of planar BM with exit detection, including the
/// between-step crossing probability exp(-2 d0 d1 / dt) of the boundary.
DiskStep disk_step(Complex w, double dt, RngStream& rng) {
    const double sd = std::sqrt(dt);
    const double re = rng.normal();
    const double im = rng.normal();
    const Complex w1 = w + sd * Complex(re, im);
    const double d0 = 1.0 - std::abs(w);
    const double d1 = 1.0 - std::abs(w1);
    if (d1 <= 0.0) return {w1 / std::abs(w1), true, d0 / (d0 - d1)};
    if (rng.uniform() < std::exp(-2.0 * d0 * d1 / dt)) return {w1 / std::abs(w1), true, 0.5};
    return {w1, false, 0.0};
}

double exit_time(Complex w, double dt, RngStream& rng) {
    double t = 0.0;
    for (;;) {
        const DiskStep s = disk_step(w, dt, rng);
        if (s.exited) return t + s.exit_fraction * dt;
        t += dt;
        w = s.w;
    }
}

}  // namespace

TestReport test_bm_disk(const BmDiskOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    if (std::abs(opt.pole) >= 1.0 || std::abs(opt.start_far) >= 1.0 || std::abs(opt.martingale_start) >= 1.0)
        throw PreconditionError("disk points must lie inside the unit disk");
    if (!(opt.s > 0.0) || !(opt.t > opt.s)) throw PreconditionError("martingale check needs 0 < s < t");
    const std::size_t n = opt.n;
    std::vector<double> half_tau0(n), half_tau1(n);
    std::vector<double> dm(n), phi_re(n), phi_sq(n);
    std::vector<int> hit(n, 0), floor_hit(n, 0);
    const std::uint64_t sa = splitmix64(seed ^ 0xa1);
    const std::uint64_t sb = splitmix64(seed ^ 0xb2);
    const std::uint64_t sm = splitmix64(seed ^ 0xc3);
    const std::uint64_t sh = splitmix64(seed ^ 0xd4);
    const Complex z0 = opt.pole;

    parallel_for(n, [&](std::size_t i) {
        {
            RngStream rng(sa, i);
            half_tau0[i] = exit_time(Complex(0.0, 0.0), opt.dt, rng) / 2.0;
        }
        {
            RngStream rng(sb, i);
            half_tau1[i] = exit_time(opt.start_far, opt.dt, rng) / 2.0;
        }
        {
            // M_t = f(B_{t ^ tau}) + (t ^ tau)/2 at times s and t.
            RngStream rng(sm, i);
            Complex w = opt.martingale_start;
            double t = 0.0;
            double tau = kInf;
            double m_s = 0.0;
            Complex w_s = w;
            bool have_s = false;
            const std::size_t ks = static_cast<std::size_t>(std::llround(opt.s / opt.dt));
            const std::size_t kt = static_cast<std::size_t>(std::llround(opt.t / opt.dt));
            for (std::size_t k = 0; k < kt; ++k) {
                if (k == ks) {
                    m_s = disk_f(w) + std::min(t, tau) / 2.0;
                    w_s = w;
                    have_s = true;
                }
                if (std::isfinite(tau)) break;
                const DiskStep st = disk_step(w, opt.dt, rng);
                if (st.exited) {
                    tau = t + st.exit_fraction * opt.dt;
                    w = st.w;
                } else {
                    w = st.w;
                }
                t += opt.dt;
            }
            if (!have_s) {
                m_s = disk_f(w) + std::min(opt.s, tau) / 2.0;
                w_s = w;
            }
            const double m_t = disk_f(w) + std::min(opt.t, tau) / 2.0;
            dm[i] = m_t - m_s;
            phi_re[i] = w_s.real();
            phi_sq[i] = std::norm(w_s);
        }
        {
            // Brownian motion conditioned to reach the pole: drift grad G / G.
            RngStream rng(sh, i);
            Complex w(0.0, 0.0);
            const Complex zc = std::conj(z0);
            for (std::size_t step = 0; step < 100'000'000; ++step) {
                const double dpole = std::abs(w - z0);
                if (dpole < opt.target_radius) {
                    hit[i] = 1;
                    return;
                }
                const double dedge = 1.0 - std::abs(w);
                if (dedge <= 0.0) return;
                const double d = std::min(dpole, dedge);
                const double h = std::min(opt.dt, opt.step_factor * d * d);
                if (h < opt.min_step) {
                    floor_hit[i] = 1;
                    return;
                }
                const double G = std::log(std::abs(1.0 - zc * w)) - std::log(dpole);
                const Complex Fp = -zc / (1.0 - zc * w) - 1.0 / (w - z0);
                const Complex drift = std::conj(Fp) / G;
                w += drift * h + std::sqrt(h) * Complex(rng.normal(), rng.normal());
            }
        }
    });

    const MeanSe a0 = mean_se(half_tau0);
    const MeanSe a1 = mean_se(half_tau1);
    const double f0 = disk_f(Complex(0.0, 0.0));
    const double f1 = disk_f(opt.start_far);
    const bool pass_a0 = std::abs(a0.mean - f0) <= 3.0 * a0.se;
    const bool pass_a1 = std::abs(a1.mean - f1) <= 3.0 * a1.se;

    auto cov_check = [&](const std::vector<double>& phi) {
        const MeanSe mp = mean_se(phi);
        std::vector<double> prod(n);
        for (std::size_t i = 0; i < n; ++i) prod[i] = dm[i] * (phi[i] - mp.mean);
        return mean_se(prod);
    };
    const MeanSe mdm = mean_se(dm);
    const MeanSe c_re = cov_check(phi_re);
    const MeanSe c_sq = cov_check(phi_sq);
    const bool pass_b = std::abs(mdm.mean) <= 3.0 * mdm.se && std::abs(c_re.mean) <= 3.0 * c_re.se &&
                        std::abs(c_sq.mean) <= 3.0 * c_sq.se;

    std::size_t hits = 0;
    std::size_t floors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        hits += static_cast<std::size_t>(hit[i]);
        floors += static_cast<std::size_t>(floor_hit[i]);
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(n);
    const bool pass_c = frac >= opt.min_hit_fraction;

    TestReport r;
    r.name = "bm-disk";
    r.hypotheses =
        "planar BM in the unit disk: E[tau/2] = f(start) with f = (1 - |w|^2)/4, M_t = f(B_t) + t/2 is a "
        "martingale, and the h-transform by the Green's function reaches its pole before exiting";
    r.seed = seed;
    r.statistics["half_exit_time_origin"] = {{"mean", a0.mean}, {"stderr", a0.se}, {"expected", f0}};
    r.statistics["half_exit_time_far"] = {{"mean", a1.mean}, {"stderr", a1.se}, {"expected", f1}};
    r.statistics["martingale_increment"] = {{"mean", mdm.mean}, {"stderr", mdm.se}};
    r.statistics["cov_increment_re"] = {{"mean", c_re.mean}, {"stderr", c_re.se}};
    r.statistics["cov_increment_abs2"] = {{"mean", c_sq.mean}, {"stderr", c_sq.se}};
    r.statistics["h_transform_hit_fraction"] = frac;
    r.statistics["h_transform_step_floor_hits"] = floors;
    r.thresholds["mean_rule"] = "|mean - expected| <= 3 stderr";
    r.thresholds["min_hit_fraction"] = opt.min_hit_fraction;
    r.sample_sizes["paths"] = n;
    r.passed = pass_a0 && pass_a1 && pass_b && pass_c;
    if (floors > 0) r.notes.push_back(std::to_string(floors) + " h-transform paths hit the step-size floor");
    r.runtime_s = seconds_since(t0);
    return r;
}

}  // namespace sle
