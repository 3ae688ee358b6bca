#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sle/drivers.hpp"
#include "sle/estimate.hpp"
#include "sle/loewner.hpp"
#include "sle/quadrature.hpp"
#include "sle/region.hpp"

namespace sle {

/// |z|^{rho/kappa} (Im z)^{rho^2/(8 kappa)}.
double green_interior(double kappa, double rho, Complex z);
/// |z|^{d-2} sin(arg z)^{kappa/8 + 8/kappa - 2} with d = 1 + kappa/8; kappa in (0, 8).
double green_sle_shape(double kappa, Complex z);
/// (Im z / |z|)^{8/kappa} on the closed upper half-plane minus 0.
double green_capacity_shape(double kappa, Complex z);
/// |x|^{rho/kappa}.
double green_boundary(double kappa, double rho, double x);

/// Interior martingale from Z = g(z0) - lambda and log|g'(z0)|.
double martingale_interior_value(double kappa, double rho, Complex Z, double log_d);
/// Boundary martingale from real Z and log g'(x0).
double martingale_boundary_value(double kappa, double rho, double Z, double log_d);

/// Martingale along the track's grid samples, padded with zeros after
/// swallowing up to `length` entries.
std::vector<double> martingale_M_interior(const ForcePointTrack& track, double kappa, double rho,
                                          std::size_t length = 0);
std::vector<double> martingale_M_boundary(const ForcePointTrack& track, double kappa, double rho,
                                          std::size_t length = 0);
/// Martingale at the end of the track (zero if swallowed).
double martingale_final(const ForcePointTrack& track, double kappa, double rho);

/// Martingale of one tracked point in a flow state (zero if dead).
double martingale_of_point(const PointFlow& p, double lambda, double kappa, double rho);

/// Quadrature of the martingale over tracked nodes, one value per state.
/// `weights[i]` is the quadrature weight of point i.
std::vector<double> psi_U(const std::vector<LoewnerFlowState>& states, const std::vector<double>& weights,
                          double kappa, double rho);

/// Integral of green_interior over U at t = 0 with an h versus h/2 check.
QuadratureResult psi0_interior(double kappa, double rho, const Region& U, double h = 0.02);

/// Midpoint nodes and weights on a real interval, for boundary quadrature.
struct IntervalGrid {
    std::vector<Complex> nodes;
    std::vector<double> weights;
};
IntervalGrid make_interval_grid(double a, double b, std::size_t n);

enum class SwallowSimulator { direct, radial };

struct CapacityGreenOptions {
    SwallowSimulator simulator = SwallowSimulator::direct;
    double dt = 1e-3;
    double swallow_eps = 1e-3;
    RadialOptions radial;
    double max_unresolved_fraction = 0.01;
};

/// G_t(z) = G(z) P_z[T_z <= t] under SLE_kappa(-8) from N first arms.
EstimateReport capacity_green_mc(double kappa, Complex z, double t, std::size_t n, std::uint64_t seed,
                                 const CapacityGreenOptions& opt = {});

/// Whether the radial-diffusion swallow time is at most t; stops as soon as
/// the answer is settled.
bool radial_swallowed_before(double kappa, double rho, Complex z0, double t, RngStream& rng,
                             const RadialOptions& opt = {});

struct CKappaConfig {
    /// Route A: occupation of U by chordal curves traced to `horizon`, with the
    /// remaining occupation after the horizon accounted for by Psi_horizon(U).
    Region U{{{-1.0, 1.0, 0.25, 1.25}}};
    std::size_t n_curves = 1000;
    double dt = 1e-3;
    double horizon = 4.0;
    double quad_h = 0.05;
    /// Route B: stratified lattice over [0, lattice_xmax] x [0, 2 sqrt(t)].
    double t = 1.0;
    double lattice_pitch = 0.1;
    double lattice_xmax = 12.0;
    std::size_t per_cell = 16;
    RadialOptions radial;
    double max_rel_ci = 0.25;
};

/// C_{kappa,t} = int G_t dA by the stratified lattice (route B, any t).
EstimateReport capacity_constant_lattice(double kappa, double t, const CKappaConfig& cfg, std::uint64_t seed);

/// C_{kappa,1} via the occupation identity (route A).
EstimateReport capacity_constant_occupation(double kappa, const CKappaConfig& cfg, std::uint64_t seed);

/// Both routes; the second report carries the ratio B/A in `extra`.
std::pair<EstimateReport, EstimateReport> estimate_c_kappa1(double kappa, const CKappaConfig& cfg,
                                                            std::uint64_t seed);

/// r^{d-2} times the area of the r-neighbourhood of the curve inside U.
double minkowski_content(const TracedCurve& curve, const Region& U, double kappa, double r,
                         const NeighborhoodOptions& opt = {});

}  // namespace sle
