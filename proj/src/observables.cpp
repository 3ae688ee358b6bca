#include "sle/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "sle/parallel.hpp"
#include "sle/stats.hpp"

namespace sle {

namespace {

constexpr double kZ95 = 1.959963984540054;

void require_upper(Complex z, const char* what) {
    if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw PreconditionError(std::string(what) + ": point must lie in the open upper half-plane");
}

void require_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw PreconditionError("kappa must be positive");
}

}  // namespace

double green_interior(double kappa, double rho, Complex z) {
    require_kappa(kappa);
    require_upper(z, "green_interior");
    return std::pow(std::abs(z), rho / kappa) * std::pow(z.imag(), rho * rho / (8.0 * kappa));
}

double green_sle_shape(double kappa, Complex z) {
    if (!(kappa > 0.0 && kappa < 8.0)) throw PreconditionError("SLE Green's function needs kappa in (0, 8)");
    require_upper(z, "green_sle_shape");
    const double d = 1.0 + kappa / 8.0;
    const double r = std::abs(z);
    return std::pow(r, d - 2.0) * std::pow(z.imag() / r, kappa / 8.0 + 8.0 / kappa - 2.0);
}

double green_capacity_shape(double kappa, Complex z) {
    require_kappa(kappa);
    if (z == Complex(0.0, 0.0)) throw PreconditionError("capacity Green's function undefined at 0");
    if (z.imag() < 0.0) throw PreconditionError("capacity Green's function needs Im z >= 0");
    if (z.imag() == 0.0) return 0.0;
    return std::pow(z.imag() / std::abs(z), 8.0 / kappa);
}

double green_boundary(double kappa, double rho, double x) {
    require_kappa(kappa);
    if (x == 0.0 || !std::isfinite(x)) throw PreconditionError("boundary Green's function needs x != 0");
    return std::pow(std::abs(x), rho / kappa);
}

double martingale_interior_value(double kappa, double rho, Complex Z, double log_d) {
    const double a = rho / kappa;
    const double b = rho * rho / (8.0 * kappa);
    const double c = a * (1.0 - kappa / 4.0 + rho / 8.0);
    return std::exp(a * std::log(std::abs(Z)) + b * std::log(Z.imag()) + c * log_d);
}

double martingale_boundary_value(double kappa, double rho, double Z, double log_d) {
    const double a = rho / kappa;
    const double c = a * (1.0 - kappa / 4.0 + rho / 4.0);
    return std::exp(a * std::log(std::abs(Z)) + c * log_d);
}

namespace {

std::vector<double> track_martingale(const ForcePointTrack& track, double kappa, double rho, std::size_t length,
                                     bool boundary) {
    std::vector<double> m(std::max(length, track.z.size()), 0.0);
    for (std::size_t k = 0; k < track.z.size(); ++k)
        m[k] = boundary ? martingale_boundary_value(kappa, rho, track.z[k].real(), track.log_d[k])
                        : martingale_interior_value(kappa, rho, track.z[k], track.log_d[k]);
    if (track.swallowed()) {
        // Grid samples at or after the swallow time carry zero.
        const std::size_t alive = track.z.size();
        for (std::size_t k = alive; k < m.size(); ++k) m[k] = 0.0;
    }
    return m;
}

}  // namespace

std::vector<double> martingale_M_interior(const ForcePointTrack& track, double kappa, double rho,
                                          std::size_t length) {
    if (track.boundary) throw std::invalid_argument("interior martingale on a boundary track");
    return track_martingale(track, kappa, rho, length, false);
}

std::vector<double> martingale_M_boundary(const ForcePointTrack& track, double kappa, double rho,
                                          std::size_t length) {
    if (!track.boundary) throw std::invalid_argument("boundary martingale on an interior track");
    return track_martingale(track, kappa, rho, length, true);
}

double martingale_final(const ForcePointTrack& track, double kappa, double rho) {
    if (track.swallowed()) return 0.0;
    return track.boundary ? martingale_boundary_value(kappa, rho, track.final_z.real(), track.final_log_d)
                          : martingale_interior_value(kappa, rho, track.final_z, track.final_log_d);
}

double martingale_of_point(const PointFlow& p, double lambda, double kappa, double rho) {
    if (!p.alive) return 0.0;
    const Complex Z = p.g - lambda;
    if (p.g.imag() == 0.0) return martingale_boundary_value(kappa, rho, Z.real(), std::log(std::abs(p.gprime)));
    return martingale_interior_value(kappa, rho, Z, std::log(std::abs(p.gprime)));
}

std::vector<double> psi_U(const std::vector<LoewnerFlowState>& states, const std::vector<double>& weights,
                          double kappa, double rho) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) {
        if (s.points.size() != weights.size()) throw std::invalid_argument("psi_U: weights do not match points");
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            acc += weights[i] * martingale_of_point(s.points[i], s.lambda, kappa, rho);
        out.push_back(acc);
    }
    return out;
}

QuadratureResult psi0_interior(double kappa, double rho, const Region& U, double h) {
    // G is homogeneous of degree rho (8 + rho) / (8 kappa); the area integral diverges at 0 below -2.
    const double degree = rho * (8.0 + rho) / (8.0 * kappa);
    for (const Rect& r : U.rects)
        if (r.ymin <= 0.0 && r.xmin <= 0.0 && r.xmax >= 0.0 && degree <= -2.0)
            throw PreconditionError("integral of the Green's function over U diverges at 0");
    return integrate_checked(U, h, [&](Complex z) { return green_interior(kappa, rho, z); });
}

IntervalGrid make_interval_grid(double a, double b, std::size_t n) {
    if (!(b > a) || n == 0) throw std::invalid_argument("interval grid needs a < b and n > 0");
    if (a <= 0.0 && b >= 0.0) throw PreconditionError("boundary interval must stay away from 0");
    IntervalGrid g;
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes.emplace_back(a + (static_cast<double>(i) + 0.5) * h, 0.0);
        g.weights.push_back(h);
    }
    return g;
}

bool radial_swallowed_before(double kappa, double rho, Complex z0, double t, RngStream& rng,
                             const RadialOptions& opt) {
    require_upper(z0, "radial_swallowed_before");
    const double y2 = z0.imag() * z0.imag();
    const double target = t / y2;
    const double mu = rho + 4.0 - kappa / 2.0;
    const std::size_t n = static_cast<std::size_t>(std::llround(opt.s_max / opt.ds));
    const double ds = opt.s_max / static_cast<double>(n);
    const double sk = std::sqrt(kappa * ds);
    const double decay = std::exp(-4.0 * ds);
    double v = std::asinh(z0.real() / z0.imag());
    double ch = std::cosh(v);
    double sum = 0.5 * ch * ch * ds;
    double e = 1.0;
    double max_abs = std::abs(v);
    for (std::size_t i = 1; i <= n; ++i) {
        v += mu * std::tanh(v) * ds + sk * rng.normal();
        e *= decay;
        ch = std::cosh(v);
        max_abs = std::max(max_abs, std::abs(v));
        sum += (i == n ? 0.5 : 1.0) * e * ch * ch * ds;
        if (sum > target) return false;
        const double s = static_cast<double>(i) * ds;
        const double tail = std::exp(2.0 * max_abs - 4.0 * s) / 4.0;
        if (sum + 4.0 * tail < target) return true;
    }
    return sum <= target;
}

EstimateReport capacity_green_mc(double kappa, Complex z, double t, std::size_t n, std::uint64_t seed,
                                 const CapacityGreenOptions& opt) {
    require_kappa(kappa);
    require_upper(z, "capacity_green_mc");
    if (!(t > 0.0)) throw PreconditionError("capacity_green_mc needs t > 0");
    if (n == 0) throw PreconditionError("capacity_green_mc needs N > 0");
    const double rho = -8.0;
    std::vector<int> hit(n, 0);
    std::vector<int> unresolved(n, 0);
    parallel_for(n, [&](std::size_t i) {
        RngStream rng(seed, i);
        if (opt.simulator == SwallowSimulator::radial) {
            hit[i] = radial_swallowed_before(kappa, rho, z, t, rng, opt.radial) ? 1 : 0;
            return;
        }
        DriverConfig cfg;
        cfg.kappa = kappa;
        cfg.rho = rho;
        cfg.force_point = InteriorForce{z};
        cfg.dt = std::min(opt.dt, t / 10.0);
        cfg.horizon = t;
        cfg.swallow_eps = opt.swallow_eps;
        cfg.seed = seed;
        DriverRun run = simulate_sle_rho_interior(cfg, rng);
        if (run.outcome == Outcome::unresolved) {
            unresolved[i] = 1;
            return;
        }
        hit[i] = run.outcome == Outcome::swallowed && run.track.swallow_time <= t ? 1 : 0;
    });
    std::size_t hits = 0;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
        hits += static_cast<std::size_t>(hit[i]);
        bad += static_cast<std::size_t>(unresolved[i]);
    }
    if (static_cast<double>(bad) > opt.max_unresolved_fraction * static_cast<double>(n))
        throw std::runtime_error("capacity_green_mc: " + std::to_string(bad) + " of " + std::to_string(n) +
                                 " paths unresolved");
    const std::size_t m = n - bad;
    const double g = green_capacity_shape(kappa, z);
    const double p = static_cast<double>(hits) / static_cast<double>(m);
    const Interval ci = wilson_interval(hits, m);
    EstimateReport r;
    r.name = "capacity-green";
    r.kappa = kappa;
    r.rho = rho;
    r.value = g * p;
    r.stderr_ = g * std::sqrt(p * (1.0 - p) / static_cast<double>(m));
    r.ci_lo = g * ci.lo;
    r.ci_hi = g * ci.hi;
    r.n = m;
    r.seed = seed;
    r.extra["z"] = {z.real(), z.imag()};
    r.extra["t"] = t;
    r.extra["swallowed"] = hits;
    r.extra["unresolved"] = bad;
    r.extra["simulator"] = opt.simulator == SwallowSimulator::direct ? "direct" : "radial";
    return r;
}

EstimateReport capacity_constant_lattice(double kappa, double t, const CKappaConfig& cfg, std::uint64_t seed) {
    require_kappa(kappa);
    if (!(t > 0.0)) throw PreconditionError("capacity constant needs t > 0");
    if (!(cfg.lattice_pitch > 0.0) || cfg.per_cell < 2) throw PreconditionError("lattice needs pitch > 0, per_cell >= 2");
    const double sq = std::sqrt(t);
    const double ymax = 2.0 * sq;
    const double xmax = cfg.lattice_xmax * sq;
    const double pitch = cfg.lattice_pitch * sq;
    const auto nx = static_cast<std::size_t>(std::ceil(xmax / pitch - 1e-9));
    const auto ny = static_cast<std::size_t>(std::ceil(ymax / pitch - 1e-9));
    const double px = xmax / static_cast<double>(nx);
    const double py = ymax / static_cast<double>(ny);
    const double area = px * py;
    const std::size_t cells = nx * ny;
    std::vector<double> mean(cells), var(cells);
    parallel_for(cells, [&](std::size_t c) {
        const std::size_t i = c % nx;
        const std::size_t j = c / nx;
        std::vector<double> vals(cfg.per_cell);
        for (std::size_t s = 0; s < cfg.per_cell; ++s) {
            RngStream rng(seed, c * cfg.per_cell + s);
            const Complex z((static_cast<double>(i) + rng.uniform()) * px,
                            (static_cast<double>(j) + rng.uniform_open_left()) * py);
            vals[s] = radial_swallowed_before(kappa, -8.0, z, t, rng, cfg.radial) ? green_capacity_shape(kappa, z)
                                                                                  : 0.0;
        }
        const MeanSe ms = mean_se(vals);
        mean[c] = ms.mean;
        var[c] = ms.se * ms.se;
    });
    double total = 0.0;
    double v = 0.0;
    double last_column = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        total += mean[c];
        v += var[c];
        if (c % nx == nx - 1) last_column += mean[c];
    }
    // Symmetric in x, so the half-plane integral is twice the x > 0 part.
    total *= 2.0 * area;
    const double se = 2.0 * area * std::sqrt(v);
    EstimateReport r;
    r.name = "c-kappa-t-lattice";
    r.kappa = kappa;
    r.rho = -8.0;
    r.value = total;
    r.stderr_ = se;
    r.ci_lo = total - kZ95 * se;
    r.ci_hi = total + kZ95 * se;
    r.n = cells * cfg.per_cell;
    r.seed = seed;
    r.extra["t"] = t;
    r.extra["cells"] = cells;
    r.extra["last_column_fraction"] = total > 0.0 ? 2.0 * area * last_column / total : 0.0;
    if (total > 0.0 && 2.0 * area * last_column > 1e-3 * total) r.flags.push_back("lattice_truncated");
    if (r.ci_hi - r.ci_lo > cfg.max_rel_ci * std::abs(total)) r.flags.push_back("undersampled");
    return r;
}

EstimateReport capacity_constant_occupation(double kappa, const CKappaConfig& cfg, std::uint64_t seed) {
    require_kappa(kappa);
    cfg.U.validate();
    if (cfg.n_curves < 2) throw PreconditionError("occupation route needs at least two curves");
    const QuadratureGrid grid = make_grid(cfg.U, cfg.quad_h);
    const double psi0 = integrate(grid, [&](Complex z) { return green_capacity_shape(kappa, z); });
    if (!(psi0 > 0.0)) throw PreconditionError("integral of the capacity Green's function over U is zero");
    std::vector<double> occ(cfg.n_curves), psi_end(cfg.n_curves);
    parallel_for(cfg.n_curves, [&](std::size_t i) {
        RngStream rng(seed, i);
        DriverConfig dc;
        dc.kappa = kappa;
        dc.dt = cfg.dt;
        dc.horizon = cfg.horizon;
        const RealPath driver = simulate_brownian_driver(dc, rng);
        const TracedCurve curve = trace_curve(driver);
        occ[i] = occupation_time(curve, cfg.U, cfg.horizon);
        const auto states = evolve_points(driver, grid.nodes, driver.size() + 1);
        psi_end[i] = psi_U({states.back()}, grid.weights, kappa, -8.0).front();
    });
    const MeanSe mo = mean_se(occ);
    const MeanSe mp = mean_se(psi_end);
    double cov = 0.0;
    for (std::size_t i = 0; i < cfg.n_curves; ++i) cov += (occ[i] - mo.mean) * (psi_end[i] - mp.mean);
    cov /= static_cast<double>(cfg.n_curves - 1);
    const double nn = static_cast<double>(cfg.n_curves);
    const double num = psi0 - mp.mean;
    const double den = mo.mean;
    if (!(den > 0.0)) throw std::runtime_error("no curve visited U; occupation route undefined");
    const double c = num / den;
    // Delta method for (psi0 - mean psi_end) / mean occ.
    const double rel_var = (mp.sd * mp.sd / nn) / (num * num) + (mo.sd * mo.sd / nn) / (den * den) +
                           2.0 * (cov / nn) / (num * den);
    const double se = std::abs(c) * std::sqrt(std::max(0.0, rel_var));
    EstimateReport r;
    r.name = "c-kappa1-occupation";
    r.kappa = kappa;
    r.rho = -8.0;
    r.value = c;
    r.stderr_ = se;
    r.ci_lo = c - kZ95 * se;
    r.ci_hi = c + kZ95 * se;
    r.n = cfg.n_curves;
    r.seed = seed;
    r.extra["integral_G_U"] = psi0;
    r.extra["mean_occupation"] = mo.mean;
    r.extra["mean_psi_horizon"] = mp.mean;
    r.extra["horizon"] = cfg.horizon;
    if (r.ci_hi - r.ci_lo > cfg.max_rel_ci * std::abs(c)) r.flags.push_back("undersampled");
    return r;
}

std::pair<EstimateReport, EstimateReport> estimate_c_kappa1(double kappa, const CKappaConfig& cfg,
                                                            std::uint64_t seed) {
    EstimateReport a = capacity_constant_occupation(kappa, cfg, seed);
    CKappaConfig one = cfg;
    one.t = 1.0;
    EstimateReport b = capacity_constant_lattice(kappa, 1.0, one, splitmix64(seed ^ 0xB0B));
    b.name = "c-kappa1-lattice";
    const double ratio = b.value / a.value;
    const double rse = ratio * std::sqrt(std::pow(a.stderr_ / a.value, 2) + std::pow(b.stderr_ / b.value, 2));
    b.extra["ratio_to_occupation_route"] = ratio;
    b.extra["ratio_stderr"] = rse;
    return {a, b};
}

double minkowski_content(const TracedCurve& curve, const Region& U, double kappa, double r,
                         const NeighborhoodOptions& opt) {
    if (!(kappa > 0.0 && kappa < 8.0)) throw PreconditionError("Minkowski content needs kappa in (0, 8)");
    const double d = 1.0 + kappa / 8.0;
    return std::pow(r, d - 2.0) * neighborhood_area(curve, U, r, opt);
}

}  // namespace sle
