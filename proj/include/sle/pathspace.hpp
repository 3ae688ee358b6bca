#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sle/rng.hpp"
#include "sle/types.hpp"

namespace sle {

/// Number of grid points k*dt lying strictly below `span`.
std::size_t grid_count(double span, double dt);

/// Uniform-grid path with an explicit lifetime.
///
/// Samples sit at times k*dt for k < grid_count(span). A finite `lifetime`
/// means the path dies there; `terminal_limit` then optionally holds the left
/// limit at death. An infinite lifetime means the path was truncated at
/// `horizon` and conceptually continues.
template <class T>
struct SampledPath {
    double dt = 0.0;
    std::vector<T> values;
    double lifetime = kInf;
    double horizon = kInf;
    std::optional<T> terminal_limit;

    bool truncated() const { return !std::isfinite(lifetime); }
    /// Time up to which the samples describe the path.
    double span() const { return truncated() ? horizon : lifetime; }
    std::size_t size() const { return values.size(); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt; }

    /// Linear interpolation on the grid; the last interval interpolates towards
    /// the terminal limit when one exists, otherwise the last sample is held.
    T value_at(double t) const {
        if (values.empty()) throw std::out_of_range("value_at on an empty path");
        if (t < 0.0 || t > span() * (1.0 + 1e-12) + 1e-15)
            throw std::out_of_range("value_at: time " + std::to_string(t) + " outside [0, " +
                                    std::to_string(span()) + "]");
        const double x = t / dt;
        std::size_t k = static_cast<std::size_t>(std::floor(x));
        if (k + 1 < values.size()) {
            const double w = x - static_cast<double>(k);
            return values[k] + (values[k + 1] - values[k]) * w;
        }
        k = values.size() - 1;
        if (terminal_limit) {
            const double t0 = time(k);
            const double len = lifetime - t0;
            if (len <= 0.0) return *terminal_limit;
            const double w = std::min(1.0, std::max(0.0, (t - t0) / len));
            return values[k] + (*terminal_limit - values[k]) * w;
        }
        return values[k];
    }

    /// Throws std::invalid_argument when a structural invariant is broken.
    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("path dt must be positive");
        if (!(lifetime > 0.0)) throw std::invalid_argument("path lifetime must be positive");
        if (truncated()) {
            if (!(horizon > 0.0) || !std::isfinite(horizon))
                throw std::invalid_argument("truncated path needs a finite positive horizon");
            if (terminal_limit) throw std::invalid_argument("terminal limit on a path with infinite lifetime");
        }
        if (values.size() != grid_count(span(), dt))
            throw std::invalid_argument("path sample count " + std::to_string(values.size()) +
                                        " does not match grid count " +
                                        std::to_string(grid_count(span(), dt)));
    }
};

using RealPath = SampledPath<double>;
using ComplexPath = SampledPath<Complex>;

template <class T>
SampledPath<T> make_finite_path(double dt, std::vector<T> values, double lifetime,
                                std::optional<T> limit = std::nullopt) {
    SampledPath<T> p;
    p.dt = dt;
    p.values = std::move(values);
    p.lifetime = lifetime;
    p.horizon = lifetime;
    p.terminal_limit = limit;
    p.validate();
    return p;
}

template <class T>
SampledPath<T> make_truncated_path(double dt, std::vector<T> values, double horizon) {
    SampledPath<T> p;
    p.dt = dt;
    p.values = std::move(values);
    p.lifetime = kInf;
    p.horizon = horizon;
    p.validate();
    return p;
}

/// Samples t -> fn(t) on the grid of [0, lifetime).
template <class T, class Fn>
SampledPath<T> sample_function(double dt, double lifetime, Fn fn, bool with_limit) {
    std::vector<T> v(grid_count(lifetime, dt));
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(static_cast<double>(k) * dt);
    std::optional<T> lim;
    if (with_limit) lim = fn(lifetime);
    return make_finite_path<T>(dt, std::move(v), lifetime, lim);
}

/// Kills `f` at `tau`: lifetime becomes min(tau, T_f).
template <class T>
SampledPath<T> kill(const SampledPath<T>& f, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("kill time must be positive");
    if (tau >= f.lifetime) return f;
    if (f.truncated() && tau > f.horizon * (1.0 + 1e-12))
        throw std::out_of_range("kill time " + std::to_string(tau) + " beyond simulated horizon " +
                                std::to_string(f.horizon));
    SampledPath<T> g;
    g.dt = f.dt;
    g.lifetime = tau;
    g.horizon = tau;
    const std::size_t n = grid_count(tau, f.dt);
    g.values.assign(f.values.begin(), f.values.begin() + static_cast<std::ptrdiff_t>(n));
    g.terminal_limit = f.value_at(tau);
    return g;
}

/// Off-grid evaluator used by concatenation: returns g(s) for a grid-free s.
template <class T>
using OffGridEvaluator = std::function<T(const SampledPath<T>&, double)>;

template <class T>
T linear_evaluator(const SampledPath<T>& g, double s) {
    return g.value_at(s);
}

/// Continuation f ⊕ g: f on [0, T_f), then f(T_f-) + g(t - T_f).
template <class T>
SampledPath<T> concat(const SampledPath<T>& f, const SampledPath<T>& g,
                      const OffGridEvaluator<T>& eval = linear_evaluator<T>) {
    if (f.truncated()) throw std::invalid_argument("concat: first path must have a finite lifetime");
    if (!f.terminal_limit) throw std::invalid_argument("concat: first path has no terminal limit");
    if (std::abs(f.dt - g.dt) > 1e-12 * f.dt) throw std::invalid_argument("concat: mismatched dt");
    if (g.values.empty() || std::abs(g.values.front()) > 1e-12)
        throw std::invalid_argument("concat: second path must start at 0");
    const double tf = f.lifetime;
    const T base = *f.terminal_limit;
    SampledPath<T> h;
    h.dt = f.dt;
    if (g.truncated()) {
        h.lifetime = kInf;
        // Keep every output sample inside the range where g has data.
        h.horizon = tf + g.time(g.size() - 1);
        if (g.size() == 1) h.horizon = tf + 0.5 * g.dt;
    } else {
        h.lifetime = tf + g.lifetime;
        h.horizon = h.lifetime;
        if (g.terminal_limit) h.terminal_limit = base + *g.terminal_limit;
    }
    const std::size_t n = grid_count(h.span(), h.dt);
    h.values.resize(n);
    const std::size_t nf = f.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (k < nf) {
            h.values[k] = f.values[k];
        } else {
            const double s = std::max(0.0, h.time(k) - tf);
            h.values[k] = base + eval(g, s);
        }
    }
    return h;
}

template <class T>
struct MarkedPath {
    SampledPath<T> path;
    double junction = 0.0;
};

template <class T>
MarkedPath<T> concat_marked(const SampledPath<T>& f, const SampledPath<T>& g,
                            const OffGridEvaluator<T>& eval = linear_evaluator<T>) {
    return {concat(f, g, eval), f.lifetime};
}

/// g(t) = f(r + t) - f(r) on [0, T_f - r).
template <class T>
SampledPath<T> shift_restart(const SampledPath<T>& f, double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("shift_restart: negative restart time");
    if (r >= f.lifetime || (f.truncated() && r >= f.horizon))
        throw std::invalid_argument("shift_restart: restart time not below the lifetime");
    const T base = f.value_at(r);
    SampledPath<T> g;
    g.dt = f.dt;
    g.lifetime = f.truncated() ? kInf : f.lifetime - r;
    g.horizon = f.span() - r;
    const std::size_t n = grid_count(g.span(), g.dt);
    g.values.resize(n);
    const double shift = r / f.dt;
    const bool on_grid = std::abs(shift - std::round(shift)) < 1e-9;
    const std::size_t k0 = static_cast<std::size_t>(std::llround(shift));
    for (std::size_t k = 0; k < n; ++k) {
        if (on_grid && k0 + k < f.size())
            g.values[k] = f.values[k0 + k] - base;
        else
            g.values[k] = f.value_at(std::min(r + g.time(k), f.span())) - base;
    }
    if (f.terminal_limit) g.terminal_limit = *f.terminal_limit - base;
    return g;
}

/// Inverse of concat_marked: returns (f, g) with f killed at the junction.
template <class T>
std::pair<SampledPath<T>, SampledPath<T>> split_marked(const MarkedPath<T>& m) {
    return {kill(m.path, m.junction), shift_restart(m.path, m.junction)};
}

/// Right-continuous nondecreasing weight process with theta(0) = 0, given by
/// knots (times[i], cumulative[i]) with linear interpolation in between. Two
/// knots at the same time encode a jump.
struct WeightProcess {
    std::vector<double> times;
    std::vector<double> cumulative;

    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
    void validate() const;
    /// Smallest t with theta(t) >= u, for u in (0, total()].
    double inverse(double u) const;
};

/// theta_t = 1{t >= tau}.
WeightProcess step_weight(double tau);
/// theta_t = min(t, cap) * rate.
WeightProcess linear_weight(double cap, double rate = 1.0);

template <class T>
struct KilledSample {
    SampledPath<T> path;
    double weight = 0.0;
    double kill_time = kInf;
};

/// Draws a kill time from d theta / theta_inf by inverse CDF and kills the path
/// there; the importance weight is theta_inf. Zero total mass gives weight 0
/// and the path unchanged.
template <class T>
KilledSample<T> sample_killed(const SampledPath<T>& path, const WeightProcess& theta, RngStream& rng) {
    theta.validate();
    const double total = theta.total();
    if (!std::isfinite(total)) throw std::invalid_argument("weight process has infinite total mass");
    if (total <= 0.0) return {path, 0.0, kInf};
    const double u = rng.uniform_open_left() * total;
    const double tau = theta.inverse(u);
    return {kill(path, tau), total, tau};
}

template <class T>
using PathSampler = std::function<SampledPath<T>(RngStream&)>;
template <class T>
using WeightBuilder = std::function<WeightProcess(const SampledPath<T>&)>;

template <class T>
KilledSample<T> sample_killed(const PathSampler<T>& sampler, const WeightBuilder<T>& weight,
                              RngStream& rng) {
    SampledPath<T> p = sampler(rng);
    WeightProcess w = weight(p);
    return sample_killed(p, w, rng);
}

}  // namespace sle
