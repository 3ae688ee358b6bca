#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sle/pathspace.hpp"
#include "sle/region.hpp"
#include "sle/types.hpp"
#include "sle/zipper.hpp"

namespace sle {

struct PointFlow {
    Complex g;
    Complex gprime{1.0, 0.0};
    bool alive = true;
    double swallow_time = kInf;
};

struct LoewnerFlowState {
    double t = 0.0;
    double lambda = 0.0;
    std::vector<PointFlow> points;
};

/// Elementary slit maps of a driver: map j holds lambda(t_j) over
/// (t_{j-1}, t_j]; a final partial step runs to the end of the described span
/// with the terminal limit (or the last sample).
std::vector<SlitMap> slit_maps(const RealPath& driver);

/// Flows `points` through the driver's slit maps, recording the state at
/// t = 0 and after every `record_every` maps (and at the end). Interior points
/// die when |g - lambda| < swallow_eps * |z|; real points die when the driver
/// crosses them.
std::vector<LoewnerFlowState> evolve_points(const RealPath& driver, const std::vector<Complex>& points,
                                            std::size_t record_every = 1, double swallow_eps = 1e-3);

struct TraceOptions {
    /// Output every `stride`-th map time (the final time is always included).
    std::size_t stride = 1;
    /// Use the O(k) composition per point instead of the tree evaluator.
    bool exact = false;
    ZipperOptions zipper;
};

struct TracedCurve {
    std::vector<double> times;
    std::vector<Complex> points;
    std::vector<double> driver_values;

    std::size_t size() const { return points.size(); }
    double end_time() const { return times.empty() ? 0.0 : times.back(); }
    std::string to_csv() const;
};

TracedCurve trace_curve(const RealPath& driver, const TraceOptions& opt = {});

/// Lebesgue measure of {t <= upto : gamma(t) in U}, by the left Riemann sum
/// over the curve's time grid.
double occupation_time(const TracedCurve& curve, const Region& U, double upto = kInf);

/// Occupation measure restricted to U as knots of a cumulative weight process.
WeightProcess occupation_weight(const TracedCurve& curve, const Region& U, double upto = kInf);

struct NeighborhoodOptions {
    /// Grid pitch as a fraction of r.
    double pitch_fraction = 0.125;
    std::size_t max_cells = 40'000'000;
};

/// Cells of U within distance r of the curve polyline.
struct TubeRaster {
    double pitch = 0.0;
    double cell_area = 0.0;
    std::vector<Complex> centers;
    /// Curve time of the nearest polyline point, per covered cell.
    std::vector<double> times;

    double area() const { return cell_area * static_cast<double>(centers.size()); }
};

TubeRaster rasterize_tube(const TracedCurve& curve, const Region& U, double r,
                          const NeighborhoodOptions& opt = {});

double neighborhood_area(const TracedCurve& curve, const Region& U, double r,
                         const NeighborhoodOptions& opt = {});

}  // namespace sle
