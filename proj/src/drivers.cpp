#include "sle/drivers.hpp"

#include <algorithm>
#include <cmath>

namespace sle {

namespace {

double substep_factor(const DriverConfig& cfg, double rho, bool boundary) {
    double c = std::min(boundary ? cfg.boundary_max_ds : cfg.max_ds, 1.0 / (25.0 * cfg.kappa));
    if (rho != 0.0) c = std::min(c, 0.1 / std::abs(rho));
    return c;
}

/// Square root of w^2 + 4h on the branch mapping the upper half-plane to itself.
Complex slit_sqrt(Complex w, double h) {
    Complex s = std::sqrt(w * w + 4.0 * h);
    if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() * w.real() < 0.0)) s = -s;
    return s;
}

DriverRun integrate(const DriverConfig& cfg, RngStream& rng, bool boundary) {
    cfg.validate();
    const double kappa = cfg.kappa;
    const double rho = cfg.rho.value_or(0.0);
    const double sk = std::sqrt(kappa);
    const Complex z0 = boundary ? Complex(std::get<BoundaryForce>(cfg.force_point).x0, 0.0)
                                : std::get<InteriorForce>(cfg.force_point).z0;
    const double scale = std::abs(z0);
    const double eps = cfg.swallow_eps * scale;
    const double floor_step = cfg.min_step * scale * scale;
    const double c = substep_factor(cfg, rho, boundary);
    const double H = cfg.horizon;
    const double dt = cfg.dt;
    const std::size_t n_grid = grid_count(H, dt);

    DriverRun run;
    run.track.boundary = boundary;
    run.track.z0 = z0;
    std::vector<double> lam_samples;
    lam_samples.reserve(n_grid);

    double t = 0.0;
    double lam = 0.0;
    Complex Z = z0;
    double log_d = 0.0;
    std::size_t k = 0;
    auto record = [&] {
        lam_samples.push_back(lam);
        run.track.z.push_back(Z);
        run.track.log_d.push_back(log_d);
    };
    record();

    Outcome outcome = Outcome::horizon;
    bool done = false;
    while (!done) {
        const double target = (k + 1 < n_grid) ? static_cast<double>(k + 1) * dt : H;
        while (t < target) {
            const double z2 = std::norm(Z);
            double h = std::min(target - t, c * z2);
            const bool last = h == target - t;
            if (h < floor_step || ++run.substeps > cfg.max_substeps) {
                outcome = Outcome::unresolved;
                run.note = h < floor_step ? "substep below floor" : "substep budget exhausted";
                done = true;
                break;
            }
            const double drift = boundary ? boundary_drift(rho, Z.real()) : interior_drift(rho, Z);
            const double dl = drift * h + sk * std::sqrt(h) * rng.normal();
            lam += dl;
            t = last ? target : t + h;
            if (boundary) {
                const double w = Z.real() - dl;
                if (w == 0.0 || (w > 0.0) != (Z.real() > 0.0)) {
                    // The driver jumped over the point within this substep.
                    run.track.swallow_time = t;
                    Z = 0.0;
                    outcome = Outcome::swallowed;
                    done = true;
                    break;
                }
                const double s = std::copysign(std::sqrt(w * w + 4.0 * h), w);
                log_d += std::log(w / s);
                Z = s;
            } else {
                const Complex w = Z - dl;
                const Complex s = slit_sqrt(w, h);
                log_d += std::log(std::abs(w) / std::abs(s));
                Z = s;
            }
            if (!std::isfinite(Z.real()) || !std::isfinite(Z.imag()) || !std::isfinite(lam)) {
                outcome = Outcome::unresolved;
                run.note = "non-finite state";
                done = true;
                break;
            }
            if (std::abs(Z) < eps) {
                // Remaining time for a slit to reach a point at distance |Z|.
                run.track.swallow_time = t + std::norm(Z) / 4.0;
                outcome = Outcome::swallowed;
                done = true;
                break;
            }
        }
        if (done) break;
        if (target >= H) break;
        ++k;
        record();
    }

    run.outcome = outcome;
    run.track.final_t = t;
    run.track.final_lambda = lam;
    run.track.final_z = Z;
    run.track.final_log_d = log_d;

    RealPath& p = run.driver;
    p.dt = dt;
    if (outcome == Outcome::swallowed) {
        const double T = run.track.swallow_time;
        const std::size_t n = grid_count(T, dt);
        lam_samples.resize(n, lam);
        p.lifetime = T;
        p.horizon = T;
        p.terminal_limit = lam;
        if (run.track.z.size() > n) {
            run.track.z.resize(n);
            run.track.log_d.resize(n);
        }
    } else if (outcome == Outcome::horizon) {
        p.lifetime = kInf;
        p.horizon = H;
    } else {
        p.lifetime = kInf;
        p.horizon = (static_cast<double>(lam_samples.size()) - 0.5) * dt;
    }
    p.values = std::move(lam_samples);
    return run;
}

}  // namespace

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::swallowed: return "swallowed";
        case Outcome::horizon: return "horizon";
        case Outcome::unresolved: return "unresolved";
    }
    return "?";
}

void DriverConfig::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw PreconditionError("kappa must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw PreconditionError("horizon must be positive and finite");
    if (!(swallow_eps > 0.0)) throw PreconditionError("swallow_eps must be positive");
    if (!(max_ds > 0.0)) throw PreconditionError("max_ds must be positive");
    if (!(boundary_max_ds > 0.0)) throw PreconditionError("boundary_max_ds must be positive");
    if (rho && !std::isfinite(*rho)) throw PreconditionError("rho must be finite");
    if (auto* p = std::get_if<InteriorForce>(&force_point)) {
        if (!(p->z0.imag() > 0.0)) throw PreconditionError("interior force point must lie in the upper half-plane");
    }
    if (auto* p = std::get_if<BoundaryForce>(&force_point)) {
        if (p->x0 == 0.0 || !std::isfinite(p->x0)) throw PreconditionError("boundary force point must be nonzero");
    }
}

double interior_drift(double rho, Complex z) { return -rho * z.real() / std::norm(z); }

double boundary_drift(double rho, double z) { return -rho / z; }

RealPath simulate_brownian_driver(const DriverConfig& cfg, RngStream& rng) {
    cfg.validate();
    if (!std::holds_alternative<std::monostate>(cfg.force_point))
        throw PreconditionError("Brownian driver takes no force point");
    const std::size_t n = grid_count(cfg.horizon, cfg.dt);
    std::vector<double> v(n);
    const double step = std::sqrt(cfg.kappa * cfg.dt);
    for (std::size_t k = 1; k < n; ++k) v[k] = v[k - 1] + step * rng.normal();
    return make_truncated_path(cfg.dt, std::move(v), cfg.horizon);
}

DriverRun simulate_sle_rho_interior(const DriverConfig& cfg, RngStream& rng) {
    if (!cfg.has_interior()) throw PreconditionError("interior SLE_kappa(rho) needs an interior force point");
    if (!cfg.rho) throw PreconditionError("SLE_kappa(rho) needs rho");
    return integrate(cfg, rng, false);
}

DriverRun simulate_sle_rho_boundary(const DriverConfig& cfg, RngStream& rng) {
    if (!cfg.has_boundary()) throw PreconditionError("boundary SLE_kappa(rho) needs a boundary force point");
    if (!cfg.rho) throw PreconditionError("SLE_kappa(rho) needs rho");
    return integrate(cfg, rng, true);
}

DriverRun simulate_sle_rho(const DriverConfig& cfg, RngStream& rng) {
    if (cfg.has_boundary()) return simulate_sle_rho_boundary(cfg, rng);
    return simulate_sle_rho_interior(cfg, rng);
}

OffGridEvaluator<double> brownian_bridge_evaluator(double kappa, RngStream& rng) {
    return [kappa, &rng](const RealPath& g, double s) {
        const double x = s / g.dt;
        const std::size_t j = static_cast<std::size_t>(std::floor(x));
        if (j + 1 >= g.size()) return g.value_at(s);
        const double u = x - static_cast<double>(j);
        const double a = g.values[j];
        const double b = g.values[j + 1];
        if (u <= 0.0) return a;
        const double sd = std::sqrt(kappa * g.dt * u * (1.0 - u));
        return a + (b - a) * u + sd * rng.normal();
    };
}

ExtendedRun simulate_extended(const DriverConfig& cfg, RngStream& rng) {
    if (!cfg.rho) throw PreconditionError("extended SLE_kappa(rho) needs rho");
    if (std::holds_alternative<std::monostate>(cfg.force_point))
        throw PreconditionError("extended SLE_kappa(rho) needs a force point");
    const double bound = cfg.kappa / 2.0 - 4.0;
    if (*cfg.rho > bound)
        throw PreconditionError("extended simulation requires rho <= kappa/2 - 4 (rho = " +
                                std::to_string(*cfg.rho) + ", kappa/2 - 4 = " + std::to_string(bound) + ")");
    ExtendedRun out;
    out.first_arm = simulate_sle_rho(cfg, rng);
    if (out.first_arm.outcome != Outcome::swallowed) {
        out.driver = out.first_arm.driver;
        return out;
    }
    const double T = out.first_arm.track.swallow_time;
    out.junction = T;
    if (T >= cfg.horizon) {
        out.driver = out.first_arm.driver;
        return out;
    }
    DriverConfig bm = cfg;
    bm.force_point = std::monostate{};
    bm.rho.reset();
    bm.horizon = cfg.horizon - T + 2.0 * cfg.dt;
    RealPath second = simulate_brownian_driver(bm, rng);
    RealPath joined = concat(out.first_arm.driver, second, brownian_bridge_evaluator(cfg.kappa, rng));
    if (joined.horizon > cfg.horizon) {
        joined.values.resize(grid_count(cfg.horizon, cfg.dt));
        joined.horizon = cfg.horizon;
    }
    out.driver = std::move(joined);
    return out;
}

RadialDiffusionSample simulate_radial_diffusion(const DriverConfig& cfg, RngStream& rng,
                                                const RadialOptions& opt) {
    cfg.validate();
    if (!cfg.has_interior()) throw PreconditionError("radial diffusion needs an interior force point");
    if (!(opt.ds > 0.0) || !(opt.s_max > 0.0)) throw PreconditionError("radial diffusion needs ds, s_max > 0");
    const Complex z0 = std::get<InteriorForce>(cfg.force_point).z0;
    const double y0 = z0.imag();
    const double mu = cfg.rho.value_or(0.0) + 4.0 - cfg.kappa / 2.0;
    const double sk = std::sqrt(cfg.kappa * opt.ds);
    const std::size_t n = static_cast<std::size_t>(std::llround(opt.s_max / opt.ds));
    const double ds = opt.s_max / static_cast<double>(n);

    RadialDiffusionSample out;
    out.ds = ds;
    double v = std::asinh(z0.real() / y0);
    double max_abs = std::abs(v);
    const double ch0 = std::cosh(v);
    double sum = 0.5 * ch0 * ch0;
    if (opt.keep_path) {
        out.v.reserve(n + 1);
        out.v.push_back(v);
    }
    const double decay = std::exp(-4.0 * ds);
    double e = 1.0;
    double s_end = opt.s_max;
    for (std::size_t i = 1; i <= n; ++i) {
        v += mu * std::tanh(v) * ds + sk * rng.normal();
        e *= decay;
        max_abs = std::max(max_abs, std::abs(v));
        const double ch = std::cosh(v);
        const double term = e * ch * ch;
        sum += (i == n) ? 0.5 * term : term;
        if (opt.keep_path) {
            out.v.push_back(v);
        } else if ((i & 63) == 0) {
            // Stop once the remainder is negligible even at the running maximum.
            const double s = static_cast<double>(i) * ds;
            if (std::exp(2.0 * max_abs - 4.0 * s) / 4.0 < 1e-3 * opt.tail_tol * sum * ds) {
                // Remainder with V frozen at its last value.
                sum += e * ch * ch / (4.0 * ds) - 0.5 * term;
                s_end = s;
                break;
            }
        }
    }
    out.swallow_time = y0 * y0 * sum * ds;
    // cosh^2 v <= exp(2|v|); the running maximum stands in for the unseen future.
    out.tail_bound = y0 * y0 * std::exp(2.0 * max_abs - 4.0 * s_end) / 4.0;
    out.flagged = out.tail_bound > opt.tail_tol * out.swallow_time;
    return out;
}

}  // namespace sle
