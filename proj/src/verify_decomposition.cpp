#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sle/loewner.hpp"
#include "sle/parallel.hpp"
#include "sle/quadrature.hpp"
#include "sle/verify.hpp"

namespace sle {

namespace {

constexpr double kZ95 = 1.959963984540054;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Rejection sampler for the density proportional to 1_U f.
class RegionSampler {
public:
    RegionSampler(const Region& U, std::function<double(Complex)> f) : U_(U), f_(std::move(f)) {
        const Rect b = U.bounds();
        const double h = std::min(b.xmax - b.xmin, b.ymax - b.ymin) / 200.0;
        const QuadratureGrid g = make_grid(U, h);
        double m = 0.0;
        for (Complex z : g.nodes) m = std::max(m, f_(z));
        for (const Rect& r : U.rects)
            for (Complex z : {Complex(r.xmin, r.ymin), Complex(r.xmin, r.ymax), Complex(r.xmax, r.ymin),
                              Complex(r.xmax, r.ymax)})
                m = std::max(m, f_(z));
        if (!(m > 0.0)) throw PreconditionError("density vanishes on U");
        fmax_ = 1.25 * m;
        for (const Rect& r : U.rects) areas_.push_back(r.area());
    }

    Complex draw(RngStream& rng) const {
        double total = 0.0;
        for (double a : areas_) total += a;
        for (;;) {
            double u = rng.uniform() * total;
            std::size_t k = 0;
            while (k + 1 < areas_.size() && u >= areas_[k]) u -= areas_[k++];
            const Rect& r = U_.rects[k];
            const Complex z(r.xmin + rng.uniform() * (r.xmax - r.xmin), r.ymin + rng.uniform() * (r.ymax - r.ymin));
            bool earlier = false;
            for (std::size_t j = 0; j < k && !earlier; ++j) earlier = U_.rects[j].contains(z);
            if (earlier) continue;
            const double v = f_(z);
            if (v > fmax_) throw std::runtime_error("rejection bound exceeded; density is not bounded on U");
            if (rng.uniform() * fmax_ < v) return z;
        }
    }

private:
    Region U_;
    std::function<double(Complex)> f_;
    double fmax_ = 0.0;
    std::vector<double> areas_;
};

/// Quadrant of the bounding box of U, 0..3.
int quadrant(const Rect& b, Complex z) {
    const double xm = 0.5 * (b.xmin + b.xmax);
    const double ym = 0.5 * (b.ymin + b.ymax);
    return (z.real() >= xm ? 1 : 0) + (z.imag() >= ym ? 2 : 0);
}

/// chi-square of sampled marked points against quadrature masses of 1_U f
/// on the four quadrants of U's bounding box.
nlohmann::ordered_json quadrant_chi_square(const Region& U, const std::function<double(Complex)>& f,
                                           const std::vector<Complex>& pts, double h, bool& ok, double alpha) {
    const Rect b = U.bounds();
    const QuadratureGrid g = make_grid(U, h);
    std::vector<double> mass(4, 0.0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) mass[quadrant(b, g.nodes[i])] += g.weights[i] * f(g.nodes[i]);
    double total = 0.0;
    for (double m : mass) total += m;
    std::vector<std::size_t> counts(4, 0);
    for (Complex z : pts) ++counts[quadrant(b, z)];
    std::vector<std::size_t> c2;
    std::vector<double> p2;
    for (int q = 0; q < 4; ++q)
        if (mass[q] > 0.0) {
            c2.push_back(counts[q]);
            p2.push_back(mass[q] / total);
        }
    const ChiSquareResult r = chi_square_gof(c2, p2);
    ok = r.p_value > alpha;
    return {{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}, {"counts", counts}, {"probabilities", p2}};
}

struct FirstArmSample {
    /// Per sample; T = inf when the arm did not reach z within the horizon.
    std::vector<Complex> z;
    std::vector<double> T;
    std::vector<double> lambda;
    std::size_t unresolved = 0;

    std::size_t reached() const {
        return static_cast<std::size_t>(std::count_if(T.begin(), T.end(), [](double t) { return std::isfinite(t); }));
    }
};

/// z from 1_U f, then the SLE_kappa(rho) first arm up to the horizon.
FirstArmSample first_arm_samples(const Region& U, const std::function<double(Complex)>& f, double kappa, double rho,
                                 std::size_t n, double dt, double horizon, double eps, std::uint64_t seed) {
    const RegionSampler sampler(U, f);
    FirstArmSample s;
    s.z.resize(n);
    s.T.assign(n, kInf);
    s.lambda.assign(n, 0.0);
    std::vector<int> bad(n, 0);
    const std::uint64_t sz = splitmix64(seed ^ 0x21);
    const std::uint64_t sd = splitmix64(seed ^ 0x22);
    parallel_for(n, [&](std::size_t i) {
        RngStream rz(sz, i);
        s.z[i] = sampler.draw(rz);
        DriverConfig c;
        c.kappa = kappa;
        c.rho = rho;
        c.force_point = InteriorForce{s.z[i]};
        c.dt = dt;
        c.horizon = horizon;
        c.swallow_eps = eps;
        RngStream rng(sd, i);
        const DriverRun run = simulate_sle_rho_interior(c, rng);
        bad[i] = run.outcome == Outcome::unresolved;
        if (run.outcome == Outcome::swallowed && run.track.swallow_time <= horizon) {
            s.T[i] = run.track.swallow_time;
            s.lambda[i] = run.track.final_lambda;
        }
    });
    for (int b : bad) s.unresolved += static_cast<std::size_t>(b);
    return s;
}

TracedCurve chordal_curve(double kappa, double dt, double horizon, RngStream& rng) {
    DriverConfig c;
    c.kappa = kappa;
    c.dt = dt;
    c.horizon = horizon;
    return trace_curve(simulate_brownian_driver(c, rng));
}

std::size_t index_at(const TracedCurve& curve, double t) {
    auto it = std::upper_bound(curve.times.begin(), curve.times.end(), t);
    return it == curve.times.begin() ? 0 : static_cast<std::size_t>(it - curve.times.begin()) - 1;
}

}  // namespace

TestReport test_capacity_decomposition(const CapacityDecompositionOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    opt.U.validate();
    double area = 0.0;
    for (const Rect& rc : opt.U.rects) area += rc.area();
    if (!(area > 0.0)) throw PreconditionError("U has zero area, so the Green mass of U vanishes");
    const auto G = [k = opt.kappa](Complex z) { return green_capacity_shape(k, z); };

    const FirstArmSample first = first_arm_samples(opt.U, G, opt.kappa, -8.0, opt.n, opt.dt, opt.horizon,
                                                   opt.swallow_eps, splitmix64(seed ^ 0xa1));
    std::vector<double> t1, re1, im1;
    for (std::size_t i = 0; i < opt.n; ++i)
        if (std::isfinite(first.T[i])) {
            t1.push_back(first.T[i]);
            re1.push_back(first.z[i].real());
            im1.push_back(first.z[i].imag());
        }

    // Method (ii): chordal curves with a time drawn from the occupation of U.
    std::vector<double> occ(opt.n, 0.0), t2(opt.n, 0.0), re2(opt.n, 0.0), im2(opt.n, 0.0);
    const std::uint64_t sc = splitmix64(seed ^ 0xa2);
    parallel_for(opt.n, [&](std::size_t i) {
        RngStream rng(sc, i);
        const TracedCurve curve = chordal_curve(opt.kappa, opt.dt, opt.horizon, rng);
        const WeightProcess w = occupation_weight(curve, opt.U, opt.horizon);
        occ[i] = w.total();
        if (occ[i] > 0.0) {
            const double t = w.inverse(rng.uniform_open_left() * occ[i]);
            const Complex p = curve.points[index_at(curve, t)];
            t2[i] = t;
            re2[i] = p.real();
            im2[i] = p.imag();
        }
    });

    TestReport r;
    r.name = "capacity-decomposition";
    r.hypotheses =
        "z ~ 1_U G^{kappa,-8} dA followed by the SLE_kappa(-8) arm to z gives the same (junction time, marked point) "
        "law as a chordal SLE_kappa curve marked by its capacity-time occupation of U";
    r.seed = seed;
    const double truncation = 1.0 - static_cast<double>(t1.size()) / static_cast<double>(opt.n);
    r.statistics["truncation_fraction"] = truncation;
    r.statistics["mean_occupation"] = mean_se(occ).mean;
    r.statistics["occupation_ess"] = effective_sample_size(occ);
    r.thresholds["min_p_value"] = opt.alpha;
    r.thresholds["max_truncation"] = opt.max_truncation;
    r.sample_sizes["method_i"] = opt.n;
    r.sample_sizes["method_i_within_horizon"] = t1.size();
    r.sample_sizes["method_i_unresolved"] = first.unresolved;
    r.sample_sizes["method_ii"] = opt.n;
    if (truncation > opt.max_truncation)
        throw std::runtime_error("horizon truncation mass " + format_double(truncation) + " exceeds " +
                                 format_double(opt.max_truncation) + "; raise the horizon");
    const TwoSampleResult kt = ks_weighted_test(t1, {}, t2, occ);
    const TwoSampleResult kr = ks_weighted_test(re1, {}, re2, occ);
    const TwoSampleResult ki = ks_weighted_test(im1, {}, im2, occ);
    bool chi_ok = false;
    r.statistics["ks_junction_time"] = to_json(kt);
    r.statistics["ks_re_marked_point"] = to_json(kr);
    r.statistics["ks_im_marked_point"] = to_json(ki);
    r.statistics["chi_square_marked_point"] = quadrant_chi_square(opt.U, G, first.z, 0.01, chi_ok, opt.alpha);
    r.notes.push_back("method (i) is conditioned on reaching z by the horizon; method (ii) counts occupation up to it");
    r.passed = kt.p_value > opt.alpha && kr.p_value > opt.alpha && ki.p_value > opt.alpha && chi_ok;
    r.runtime_s = seconds_since(t0);
    return r;
}

TestReport test_occupation_identity(const OccupationIdentityOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    opt.U1.validate();
    opt.U2.validate();
    const auto G = [k = opt.kappa](Complex z) { return green_capacity_shape(k, z); };
    const QuadratureResult q1 = integrate_checked(opt.U1, opt.quad_h, G);
    const QuadratureResult q2 = integrate_checked(opt.U2, opt.quad_h, G);
    if (!(q1.value > 0.0 && q2.value > 0.0)) throw PreconditionError("both regions need positive Green mass");

    // Occupation after the horizon is reported through E[Psi_H(U)] / Psi_0(U),
    // with Psi the integral of the capacity martingale over U.
    const QuadratureGrid g1 = make_grid(opt.U1, opt.tail_grid_h);
    const QuadratureGrid g2 = make_grid(opt.U2, opt.tail_grid_h);
    std::vector<Complex> nodes = g1.nodes;
    nodes.insert(nodes.end(), g2.nodes.begin(), g2.nodes.end());
    std::vector<double> o1(opt.n), o2(opt.n), p1(opt.n), p2(opt.n);
    const std::uint64_t sc = splitmix64(seed ^ 0xb1);
    parallel_for(opt.n, [&](std::size_t i) {
        RngStream rng(sc, i);
        DriverConfig c;
        c.kappa = opt.kappa;
        c.dt = opt.dt;
        c.horizon = opt.horizon;
        const RealPath driver = simulate_brownian_driver(c, rng);
        const TracedCurve curve = trace_curve(driver);
        o1[i] = occupation_time(curve, opt.U1, opt.horizon);
        o2[i] = occupation_time(curve, opt.U2, opt.horizon);
        const auto states = evolve_points(driver, nodes, driver.size() + 1);
        LoewnerFlowState a = states.back();
        LoewnerFlowState b = a;
        a.points.resize(g1.size());
        b.points.erase(b.points.begin(), b.points.begin() + static_cast<std::ptrdiff_t>(g1.size()));
        p1[i] = psi_U({a}, g1.weights, opt.kappa, -8.0).front();
        p2[i] = psi_U({b}, g2.weights, opt.kappa, -8.0).front();
    });
    const MeanSe m1 = mean_se(o1);
    const MeanSe m2 = mean_se(o2);
    if (m2.mean - kZ95 * m2.se <= 0.0 || m1.mean - kZ95 * m1.se <= 0.0)
        throw std::runtime_error("occupation confidence interval contains 0; increase the number of curves");
    double cov = 0.0;
    for (std::size_t i = 0; i < opt.n; ++i) cov += (o1[i] - m1.mean) * (o2[i] - m2.mean);
    cov /= static_cast<double>(opt.n - 1);
    const double nn = static_cast<double>(opt.n);
    const double ratio = m1.mean / m2.mean;
    const double var = (m1.sd * m1.sd / (m2.mean * m2.mean) - 2.0 * m1.mean * cov / std::pow(m2.mean, 3) +
                        m1.mean * m1.mean * m2.sd * m2.sd / std::pow(m2.mean, 4)) /
                       nn;
    const double se = std::sqrt(std::max(var, 0.0));
    const double expected = q1.value / q2.value;
    const double expected_err = expected * (q1.rel_diff + q2.rel_diff);
    const double psi0_1 = integrate(g1, G);
    const double psi0_2 = integrate(g2, G);

    TestReport r;
    r.name = "occupation-identity";
    r.hypotheses = "E[occupation of U] is proportional to the integral of (Im z/|z|)^{8/kappa} over U";
    r.seed = seed;
    r.statistics["occupation_U1"] = {{"mean", m1.mean}, {"stderr", m1.se}};
    r.statistics["occupation_U2"] = {{"mean", m2.mean}, {"stderr", m2.se}};
    r.statistics["ratio"] = ratio;
    r.statistics["ratio_stderr"] = se;
    r.statistics["quadrature_ratio"] = expected;
    r.statistics["quadrature_relative_error"] = q1.rel_diff + q2.rel_diff;
    r.statistics["tail_fraction_U1"] = mean_se(p1).mean / psi0_1;
    r.statistics["tail_fraction_U2"] = mean_se(p2).mean / psi0_2;
    r.thresholds["rule"] = "|ratio - quadrature ratio| <= 1.96 stderr";
    r.sample_sizes["curves"] = opt.n;
    r.notes.push_back("occupation is counted up to the horizon; tail fractions give the expected remainder");
    r.passed = std::abs(ratio - expected) <= kZ95 * se + expected_err;
    r.runtime_s = seconds_since(t0);
    return r;
}

TestReport test_natural_decomposition(const NaturalDecompositionOptions& opt, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opt.kappa > 0.0 && opt.kappa < 8.0)) throw PreconditionError("natural decomposition needs kappa in (0, 8)");
    opt.U.validate();
    for (const Rect& rc : opt.U.rects)
        if (!(rc.ymin > 0.0)) throw PreconditionError("U must stay away from the real line");
    if (!(opt.r > 0.0)) throw PreconditionError("neighbourhood radius must be positive");
    const auto G = [k = opt.kappa](Complex z) { return green_sle_shape(k, z); };
    const double d = 1.0 + opt.kappa / 8.0;

    const FirstArmSample first = first_arm_samples(opt.U, G, opt.kappa, opt.kappa - 8.0, opt.n, opt.dt, opt.horizon,
                                                   opt.swallow_eps, splitmix64(seed ^ 0xc1));
    std::vector<double> t1, l1;
    for (std::size_t i = 0; i < opt.n; ++i)
        if (std::isfinite(first.T[i])) {
            t1.push_back(first.T[i]);
            l1.push_back(first.lambda[i]);
        }

    NeighborhoodOptions nopt;
    nopt.pitch_fraction = opt.pitch_fraction;
    std::vector<double> w(opt.n, 0.0), t2(opt.n, 0.0), l2(opt.n, 0.0), ca(opt.n, 0.0), cb(opt.n, 0.0);
    const std::uint64_t sc = splitmix64(seed ^ 0xc2);
    parallel_for(opt.n, [&](std::size_t i) {
        RngStream rng(sc, i);
        DriverConfig c;
        c.kappa = opt.kappa;
        c.dt = opt.dt;
        c.horizon = opt.horizon;
        const RealPath driver = simulate_brownian_driver(c, rng);
        const TracedCurve curve = trace_curve(driver);
        const TubeRaster tube = rasterize_tube(curve, opt.U, opt.r, nopt);
        const double scale = std::pow(opt.r, d - 2.0) * tube.cell_area;
        w[i] = scale * static_cast<double>(tube.centers.size());
        std::size_t na = 0;
        std::size_t nb = 0;
        for (Complex z : tube.centers) {
            na += opt.Ua.contains(z) ? 1 : 0;
            nb += opt.Ub.contains(z) ? 1 : 0;
        }
        ca[i] = scale * static_cast<double>(na);
        cb[i] = scale * static_cast<double>(nb);
        if (!tube.centers.empty()) {
            const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(tube.centers.size()));
            const std::size_t kk = std::min(k, tube.centers.size() - 1);
            t2[i] = tube.times[kk];
            l2[i] = driver.value_at(std::min(t2[i], driver.span()));
        }
    });

    TestReport r;
    r.name = "natural-decomposition";
    r.hypotheses =
        "z ~ 1_U G dA followed by the SLE_kappa(kappa-8) arm to z matches a chordal SLE_kappa curve weighted by "
        "its Minkowski content in U (fixed-r surrogate)";
    r.seed = seed;
    const double ess = effective_sample_size(w);
    const double truncation = 1.0 - static_cast<double>(t1.size()) / static_cast<double>(opt.n);
    r.statistics["effective_sample_size"] = ess;
    r.statistics["truncation_fraction"] = truncation;
    r.statistics["r"] = opt.r;
    r.thresholds["min_p_value"] = opt.alpha;
    r.thresholds["min_effective_sample_size"] = opt.min_ess;
    r.thresholds["max_truncation"] = opt.max_truncation;
    r.thresholds["content_ratio_tolerance"] = opt.ratio_tol;
    r.sample_sizes["method_i"] = opt.n;
    r.sample_sizes["method_i_within_horizon"] = t1.size();
    r.sample_sizes["method_i_unresolved"] = first.unresolved;
    r.sample_sizes["method_ii"] = opt.n;
    r.notes.push_back("content is the r-neighbourhood area times r^{d-2} at fixed r; its bias in r is not bounded here");
    if (ess < opt.min_ess) throw std::runtime_error("effective sample size " + format_double(ess) + " below minimum");
    if (truncation > opt.max_truncation)
        throw std::runtime_error("horizon truncation mass " + format_double(truncation) + " exceeds " +
                                 format_double(opt.max_truncation) + "; raise the horizon");
    const TwoSampleResult kt = ks_weighted_test(t1, {}, t2, w);
    const TwoSampleResult kl = ks_weighted_test(l1, {}, l2, w);
    bool chi_ok = false;
    r.statistics["ks_junction_time"] = to_json(kt);
    r.statistics["ks_driver_value"] = to_json(kl);
    r.statistics["chi_square_marked_point"] = quadrant_chi_square(opt.U, G, first.z, 0.005, chi_ok, opt.alpha);

    const QuadratureResult qa = integrate_checked(opt.Ua, 0.005, G);
    const QuadratureResult qb = integrate_checked(opt.Ub, 0.005, G);
    const double content_ratio = mean_se(ca).mean / mean_se(cb).mean;
    const double green_ratio = qa.value / qb.value;
    const double rel = std::abs(content_ratio / green_ratio - 1.0);
    r.statistics["content_ratio"] = content_ratio;
    r.statistics["green_ratio"] = green_ratio;
    r.statistics["content_ratio_relative_difference"] = rel;
    r.passed = kt.p_value > opt.alpha && kl.p_value > opt.alpha && chi_ok && rel <= opt.ratio_tol;
    r.runtime_s = seconds_since(t0);
    return r;
}

}  // namespace sle
