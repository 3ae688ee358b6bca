#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sle/pathspace.hpp"
#include "sle/rng.hpp"
#include "sle/types.hpp"

namespace sle {

/// Violated precondition of a simulation or estimator.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct InteriorForce {
    Complex z0;
};
struct BoundaryForce {
    double x0 = 0.0;
};
using ForcePoint = std::variant<std::monostate, InteriorForce, BoundaryForce>;

struct DriverConfig {
    double kappa = 2.0;
    std::optional<double> rho;
    ForcePoint force_point;
    double dt = 1e-3;
    double horizon = 1.0;
    /// Swallowing is declared when |Z| < swallow_eps * |z0|.
    double swallow_eps = 1e-3;
    std::uint64_t seed = 0;
    /// Upper bound on a substep in units of |Z|^2; further capped by
    /// 0.1/|rho| and 1/(25 kappa) so drift and noise move Z by at most a
    /// small fraction of |Z| per substep.
    double max_ds = 0.01;
    /// Same bound for a boundary force point. The real-line crossing test
    /// loses hits at coarser factors (survival biased up by about c).
    double boundary_max_ds = 1e-3;
    /// Substeps shorter than min_step * |z0|^2 mark the path unresolved.
    double min_step = 1e-14;
    std::size_t max_substeps = 50'000'000;

    void validate() const;
    bool has_interior() const { return std::holds_alternative<InteriorForce>(force_point); }
    bool has_boundary() const { return std::holds_alternative<BoundaryForce>(force_point); }
};

/// Force-point observables on the driver grid while the point is alive.
///
/// `z[k]` is g_{t_k}(z0) - lambda(t_k) (real for boundary points) and
/// `log_d[k]` is log |g'_{t_k}(z0)|. The `final_*` fields hold the state at
/// the end of integration (horizon or swallowing).
struct ForcePointTrack {
    bool boundary = false;
    Complex z0;
    std::vector<Complex> z;
    std::vector<double> log_d;
    double swallow_time = kInf;
    double final_t = 0.0;
    double final_lambda = 0.0;
    Complex final_z;
    double final_log_d = 0.0;

    bool swallowed() const { return std::isfinite(swallow_time); }
    bool alive_at(double t) const { return !swallowed() || t < swallow_time; }
};

enum class Outcome { swallowed, horizon, unresolved };
std::string to_string(Outcome o);

struct DriverRun {
    RealPath driver;
    ForcePointTrack track;
    Outcome outcome = Outcome::horizon;
    std::size_t substeps = 0;
    std::string note;
};

/// sqrt(kappa) B on [0, horizon), truncated at the horizon.
RealPath simulate_brownian_driver(const DriverConfig& cfg, RngStream& rng);

/// SLE_kappa(rho) driver with an interior force point, co-integrated with
/// Z = g(z0) - lambda and log |g'(z0)| until swallowing or the horizon.
DriverRun simulate_sle_rho_interior(const DriverConfig& cfg, RngStream& rng);

/// Same with a boundary force point x0; Z and g'(x0) are real.
DriverRun simulate_sle_rho_boundary(const DriverConfig& cfg, RngStream& rng);

/// Dispatches on the force point kind.
DriverRun simulate_sle_rho(const DriverConfig& cfg, RngStream& rng);

struct ExtendedRun {
    /// First arm continued by an independent sqrt(kappa) B; truncated near the horizon.
    RealPath driver;
    /// Swallow time of the force point (infinite if the first arm hit the horizon).
    double junction = kInf;
    DriverRun first_arm;
};

/// Standard extended SLE_kappa(rho): requires rho <= kappa/2 - 4.
ExtendedRun simulate_extended(const DriverConfig& cfg, RngStream& rng);

struct RadialOptions {
    double ds = 1e-3;
    double s_max = 10.0;
    /// Relative tolerance for the estimated integral remainder beyond s_max.
    double tail_tol = 1e-6;
    bool keep_path = false;
};

struct RadialDiffusionSample {
    std::vector<double> v;  // empty unless keep_path
    double ds = 0.0;
    double swallow_time = 0.0;
    double tail_bound = 0.0;
    bool flagged = false;
};

/// Samples the swallow time through the time-changed angle diffusion
/// dV = sqrt(kappa) dB + (rho + 4 - kappa/2) tanh(V) ds, V0 = asinh(x0/y0),
/// T = y0^2 * int_0^inf exp(-4s) cosh(V)^2 ds.
RadialDiffusionSample simulate_radial_diffusion(const DriverConfig& cfg, RngStream& rng,
                                                const RadialOptions& opt = {});

/// Drift of the SLE_kappa(rho) driver at Z = g(z0) - lambda.
double interior_drift(double rho, Complex z);
double boundary_drift(double rho, double z);

/// Off-grid evaluator for Brownian paths: samples the Brownian bridge between
/// neighbouring grid values. Exact in law when each grid interval is queried at
/// most once.
OffGridEvaluator<double> brownian_bridge_evaluator(double kappa, RngStream& rng);

}  // namespace sle
