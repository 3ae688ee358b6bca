#pragma once

#include <functional>
#include <vector>

#include "sle/region.hpp"
#include "sle/types.hpp"

namespace sle {

/// Midpoint-rule nodes on a region. Each rectangle is split into cells of
/// pitch at most h; nodes of later rectangles already covered by earlier ones
/// are dropped.
struct QuadratureGrid {
    Region region;
    double h = 0.0;
    std::vector<Complex> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

QuadratureGrid make_grid(const Region& U, double h);

double integrate(const QuadratureGrid& grid, const std::function<double(Complex)>& f);

struct QuadratureResult {
    double value = 0.0;
    double coarse = 0.0;
    double rel_diff = 0.0;
    /// Set when the h and h/2 rules differ by more than the tolerance.
    bool too_coarse = false;
};

/// Integrates at pitch h and h/2 and reports the finer value.
QuadratureResult integrate_checked(const Region& U, double h, const std::function<double(Complex)>& f,
                                   double tol = 0.05);

}  // namespace sle
