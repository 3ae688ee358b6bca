#include "sle/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sle {

std::vector<SlitMap> slit_maps(const RealPath& driver) {
    const std::size_t n = driver.size();
    if (n == 0) throw std::invalid_argument("driver has no samples");
    std::vector<SlitMap> maps;
    maps.reserve(n);
    for (std::size_t j = 1; j < n; ++j) maps.push_back({driver.values[j], driver.dt});
    const double rem = driver.span() - driver.time(n - 1);
    if (rem > 1e-12 * driver.dt) {
        const double last = driver.terminal_limit ? *driver.terminal_limit : driver.values.back();
        maps.push_back({last, rem});
    }
    return maps;
}

namespace {

std::vector<double> map_end_times(const std::vector<SlitMap>& maps) {
    std::vector<double> t(maps.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < maps.size(); ++j) {
        acc += maps[j].delta;
        t[j] = acc;
    }
    return t;
}

}  // namespace

std::vector<LoewnerFlowState> evolve_points(const RealPath& driver, const std::vector<Complex>& points,
                                            std::size_t record_every, double swallow_eps) {
    if (record_every == 0) throw std::invalid_argument("record_every must be positive");
    const double lam0 = driver.values.at(0);
    std::vector<PointFlow> state(points.size());
    std::vector<double> scale(points.size());
    std::vector<bool> real_point(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Complex z = points[i];
        if (z.imag() < 0.0) throw std::invalid_argument("tracked point below the real line");
        if (z == Complex(lam0, 0.0)) throw std::invalid_argument("tracked point equals the initial driving value");
        state[i].g = z;
        scale[i] = std::abs(z - lam0);
        real_point[i] = z.imag() == 0.0;
    }
    const std::vector<SlitMap> maps = slit_maps(driver);
    const std::vector<double> ends = map_end_times(maps);

    std::vector<LoewnerFlowState> out;
    out.push_back({0.0, lam0, state});
    double lam_prev = lam0;
    for (std::size_t j = 0; j < maps.size(); ++j) {
        const SlitMap& m = maps[j];
        for (std::size_t i = 0; i < state.size(); ++i) {
            PointFlow& p = state[i];
            if (!p.alive) continue;
            if (real_point[i]) {
                const double prev = p.g.real() - lam_prev;
                const double w = p.g.real() - m.lambda;
                if (w == 0.0 || (w > 0.0) != (prev > 0.0)) {
                    p.alive = false;
                    p.swallow_time = ends[j];
                    continue;
                }
                const double s = std::copysign(std::sqrt(w * w + 4.0 * m.delta), w);
                p.gprime *= w / s;
                p.g = m.lambda + s;
                if (std::abs(s) < swallow_eps * scale[i]) {
                    p.alive = false;
                    p.swallow_time = ends[j];
                }
            } else {
                const Complex w = p.g - m.lambda;
                const Complex g = slit_forward(m, p.g);
                const Complex s = g - m.lambda;
                p.gprime *= w / s;
                p.g = g;
                if (std::abs(s) < swallow_eps * scale[i]) {
                    p.alive = false;
                    p.swallow_time = ends[j];
                }
            }
        }
        lam_prev = m.lambda;
        if ((j + 1) % record_every == 0 || j + 1 == maps.size()) out.push_back({ends[j], m.lambda, state});
    }
    return out;
}

TracedCurve trace_curve(const RealPath& driver, const TraceOptions& opt) {
    if (opt.stride == 0) throw std::invalid_argument("trace stride must be positive");
    const std::vector<SlitMap> maps = slit_maps(driver);
    const std::vector<double> ends = map_end_times(maps);
    TracedCurve curve;
    curve.times.push_back(0.0);
    curve.points.push_back(Complex(driver.values[0], 0.0));
    curve.driver_values.push_back(driver.values[0]);
    if (maps.empty()) return curve;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < maps.size(); ++i)
        if ((i + 1) % opt.stride == 0 || i + 1 == maps.size()) idx.push_back(i);

    auto check = [&](Complex z, std::size_t i) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::runtime_error("curve trace produced a non-finite point at map " + std::to_string(i));
        if (z.imag() < 0.0) z = Complex(z.real(), 0.0);
        return z;
    };
    if (opt.exact) {
        for (std::size_t i : idx) {
            Complex w(maps[i].lambda, 2.0 * std::sqrt(maps[i].delta));
            for (std::size_t j = i; j-- > 0;) w = slit_inverse(maps[j], w);
            curve.times.push_back(ends[i]);
            curve.points.push_back(check(w, i));
            curve.driver_values.push_back(maps[i].lambda);
        }
        return curve;
    }
    ZipperTree tree(maps, opt.zipper);
    for (std::size_t i : idx) {
        curve.times.push_back(ends[i]);
        curve.points.push_back(check(tree.tip(i), i));
        curve.driver_values.push_back(maps[i].lambda);
    }
    return curve;
}

std::string TracedCurve::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,re,im\n";
    for (std::size_t i = 0; i < points.size(); ++i)
        os << times[i] << ',' << points[i].real() << ',' << points[i].imag() << '\n';
    return os.str();
}

double occupation_time(const TracedCurve& curve, const Region& U, double upto) {
    U.validate();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double t0 = curve.times[i];
        if (t0 >= upto) break;
        const double t1 = std::min(curve.times[i + 1], upto);
        if (U.contains(curve.points[i])) total += t1 - t0;
    }
    return total;
}

WeightProcess occupation_weight(const TracedCurve& curve, const Region& U, double upto) {
    U.validate();
    WeightProcess w;
    w.times.push_back(0.0);
    w.cumulative.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double t0 = curve.times[i];
        if (t0 >= upto) break;
        const double t1 = std::min(curve.times[i + 1], upto);
        if (!U.contains(curve.points[i])) continue;
        if (t0 > w.times.back()) {
            w.times.push_back(t0);
            w.cumulative.push_back(acc);
        }
        acc += t1 - t0;
        w.times.push_back(t1);
        w.cumulative.push_back(acc);
    }
    return w;
}

TubeRaster rasterize_tube(const TracedCurve& curve, const Region& U, double r, const NeighborhoodOptions& opt) {
    if (!(r > 0.0)) throw std::invalid_argument("neighborhood radius must be positive");
    if (!(opt.pitch_fraction > 0.0) || opt.pitch_fraction > 0.25)
        throw std::invalid_argument("grid pitch must be in (0, r/4]");
    U.validate();
    const Rect B = U.bounds();
    const double pitch = r * opt.pitch_fraction;
    const std::size_t nx = static_cast<std::size_t>(std::ceil((B.xmax - B.xmin) / pitch));
    const std::size_t ny = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((B.ymax - B.ymin) / pitch)));
    if (nx == 0 || nx > opt.max_cells / ny)
        throw std::runtime_error("neighborhood grid of " + std::to_string(nx) + "x" + std::to_string(ny) +
                                 " cells exceeds the memory cap");
    const double px = (B.xmax - B.xmin) / static_cast<double>(nx);
    const double py = (B.ymax - B.ymin) / static_cast<double>(ny);
    const double r2 = r * r;
    std::vector<double> best(nx * ny, r2);
    std::vector<double> when(nx * ny, kInf);

    auto clampi = [](double v, std::size_t n) -> std::ptrdiff_t {
        if (v < 0.0) return 0;
        if (v > static_cast<double>(n)) return static_cast<std::ptrdiff_t>(n);
        return static_cast<std::ptrdiff_t>(v);
    };
    const std::size_t nseg = curve.size() > 1 ? curve.size() - 1 : 1;
    for (std::size_t s = 0; s < nseg; ++s) {
        const Complex a = curve.points[s];
        const Complex b = curve.size() > 1 ? curve.points[s + 1] : a;
        const double ta = curve.times[s];
        const double tb = curve.size() > 1 ? curve.times[s + 1] : ta;
        const double x0 = std::min(a.real(), b.real()) - r;
        const double x1 = std::max(a.real(), b.real()) + r;
        const double y0 = std::min(a.imag(), b.imag()) - r;
        const double y1 = std::max(a.imag(), b.imag()) + r;
        if (x1 < B.xmin || x0 > B.xmax || y1 < B.ymin || y0 > B.ymax) continue;
        const std::ptrdiff_t i0 = clampi(std::floor((x0 - B.xmin) / px), nx);
        const std::ptrdiff_t i1 = clampi(std::ceil((x1 - B.xmin) / px), nx);
        const std::ptrdiff_t j0 = clampi(std::floor((y0 - B.ymin) / py), ny);
        const std::ptrdiff_t j1 = clampi(std::ceil((y1 - B.ymin) / py), ny);
        const Complex ab = b - a;
        const double len2 = std::norm(ab);
        for (std::ptrdiff_t j = j0; j < j1; ++j) {
            const double cy = B.ymin + (static_cast<double>(j) + 0.5) * py;
            for (std::ptrdiff_t i = i0; i < i1; ++i) {
                const double cx = B.xmin + (static_cast<double>(i) + 0.5) * px;
                const Complex c(cx, cy);
                double u = 0.0;
                if (len2 > 0.0) u = std::clamp(((c - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
                const double d2 = std::norm(c - (a + u * ab));
                const std::size_t cell = static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
                if (d2 < best[cell]) {
                    best[cell] = d2;
                    when[cell] = ta + u * (tb - ta);
                }
            }
        }
    }
    TubeRaster out;
    out.pitch = pitch;
    out.cell_area = px * py;
    for (std::size_t j = 0; j < ny; ++j) {
        const double cy = B.ymin + (static_cast<double>(j) + 0.5) * py;
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t cell = j * nx + i;
            if (!std::isfinite(when[cell])) continue;
            const Complex c(B.xmin + (static_cast<double>(i) + 0.5) * px, cy);
            if (!U.contains(c)) continue;
            out.centers.push_back(c);
            out.times.push_back(when[cell]);
        }
    }
    return out;
}

double neighborhood_area(const TracedCurve& curve, const Region& U, double r, const NeighborhoodOptions& opt) {
    return rasterize_tube(curve, U, r, opt).area();
}

}  // namespace sle
