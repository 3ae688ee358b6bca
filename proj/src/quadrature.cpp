#include "sle/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sle {

QuadratureGrid make_grid(const Region& U, double h) {
    U.validate();
    if (!(h > 0.0)) throw std::invalid_argument("quadrature pitch must be positive");
    QuadratureGrid g;
    g.region = U;
    g.h = h;
    for (std::size_t q = 0; q < U.rects.size(); ++q) {
        const Rect& r = U.rects[q];
        if (r.ymax <= r.ymin) continue;
        const auto nx = static_cast<std::size_t>(std::ceil((r.xmax - r.xmin) / h - 1e-9));
        const auto ny = static_cast<std::size_t>(std::ceil((r.ymax - r.ymin) / h - 1e-9));
        const double px = (r.xmax - r.xmin) / static_cast<double>(nx);
        const double py = (r.ymax - r.ymin) / static_cast<double>(ny);
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const Complex z(r.xmin + (static_cast<double>(i) + 0.5) * px,
                                r.ymin + (static_cast<double>(j) + 0.5) * py);
                bool seen = false;
                for (std::size_t p = 0; p < q && !seen; ++p) seen = U.rects[p].contains(z);
                if (seen) continue;
                g.nodes.push_back(z);
                g.weights.push_back(px * py);
            }
        }
    }
    return g;
}

double integrate(const QuadratureGrid& grid, const std::function<double(Complex)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights[i] * f(grid.nodes[i]);
    return s;
}

QuadratureResult integrate_checked(const Region& U, double h, const std::function<double(Complex)>& f,
                                   double tol) {
    QuadratureResult r;
    r.coarse = integrate(make_grid(U, h), f);
    r.value = integrate(make_grid(U, h / 2.0), f);
    const double denom = std::max(std::abs(r.value), 1e-300);
    r.rel_diff = std::abs(r.value - r.coarse) / denom;
    r.too_coarse = r.rel_diff > tol;
    if (!std::isfinite(r.value)) throw std::runtime_error("integral over region is not finite");
    return r;
}

}  // namespace sle
