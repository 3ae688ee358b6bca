#include "sle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "sle/rng.hpp"

namespace sle {

MeanSe mean_se(const std::vector<double>& x) {
    MeanSe r;
    r.n = x.size();
    if (x.empty()) return r;
    double s = 0.0;
    for (double v : x) s += v;
    r.mean = s / static_cast<double>(x.size());
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - r.mean) * (v - r.mean);
        r.sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
        r.se = r.sd / std::sqrt(static_cast<double>(x.size()));
    }
    return r;
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double effective_sample_size(const std::vector<double>& w) {
    double s = 0.0;
    double s2 = 0.0;
    for (double v : w) {
        s += v;
        s2 += v * v;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

namespace {

struct Point {
    double x;
    double w;
    int side;
};

}  // namespace

double ks_statistic(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& wa,
                    const std::vector<double>& wb) {
    if (!wa.empty() && wa.size() != a.size()) throw std::invalid_argument("weights do not match sample a");
    if (!wb.empty() && wb.size() != b.size()) throw std::invalid_argument("weights do not match sample b");
    std::vector<Point> pts;
    pts.reserve(a.size() + b.size());
    double ta = 0.0;
    double tb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = wa.empty() ? 1.0 : wa[i];
        if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
        if (w == 0.0) continue;
        pts.push_back({a[i], w, 0});
        ta += w;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double w = wb.empty() ? 1.0 : wb[i];
        if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
        if (w == 0.0) continue;
        pts.push_back({b[i], w, 1});
        tb += w;
    }
    if (ta <= 0.0 || tb <= 0.0) throw std::invalid_argument("KS test needs positive total weight on both sides");
    std::sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) { return p.x < q.x; });
    double fa = 0.0;
    double fb = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size();) {
        const double x = pts[i].x;
        // Ties are absorbed together so the CDFs are compared between distinct values.
        while (i < pts.size() && pts[i].x == x) {
            if (pts[i].side == 0)
                fa += pts[i].w / ta;
            else
                fb += pts[i].w / tb;
            ++i;
        }
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_asymptotic_pvalue(double d, double n1, double n2) {
    if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::invalid_argument("KS p-value needs positive sample sizes");
    const double ne = n1 * n2 / (n1 + n2);
    const double sq = std::sqrt(ne);
    return kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
}

TwoSampleResult ks_permutation_test(const std::vector<double>& a, const std::vector<double>& b,
                                    std::size_t permutations, std::uint64_t seed) {
    TwoSampleResult r;
    r.n1 = a.size();
    r.n2 = b.size();
    r.n_eff1 = static_cast<double>(a.size());
    r.n_eff2 = static_cast<double>(b.size());
    r.method = "permutation";
    r.statistic = ks_statistic(a, b);
    if (permutations == 0) {
        r.p_value = ks_asymptotic_pvalue(r.statistic, r.n_eff1, r.n_eff2);
        r.method = "asymptotic";
        return r;
    }
    // Labels are permuted over the pooled sorted sample, so each permutation
    // costs one linear scan.
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(a.size() + b.size());
    for (double x : a) pooled.push_back({x, 0});
    for (double x : b) pooled.push_back({x, 1});
    std::sort(pooled.begin(), pooled.end());
    std::vector<int> labels(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) labels[i] = pooled[i].second;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    RngStream rng(seed, 0x6b73);
    std::size_t exceed = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        std::shuffle(labels.begin(), labels.end(), rng.engine());
        double ca = 0.0;
        double cb = 0.0;
        double d = 0.0;
        for (std::size_t i = 0; i < pooled.size();) {
            const double x = pooled[i].first;
            while (i < pooled.size() && pooled[i].first == x) {
                if (labels[i] == 0)
                    ca += 1.0;
                else
                    cb += 1.0;
                ++i;
            }
            d = std::max(d, std::abs(ca / na - cb / nb));
        }
        if (d >= r.statistic - 1e-12) ++exceed;
    }
    r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + permutations);
    return r;
}

TwoSampleResult ks_weighted_test(const std::vector<double>& a, const std::vector<double>& wa,
                                 const std::vector<double>& b, const std::vector<double>& wb) {
    TwoSampleResult r;
    r.weighted = true;
    r.method = "asymptotic";
    r.n1 = a.size();
    r.n2 = b.size();
    r.statistic = ks_statistic(a, b, wa, wb);
    r.n_eff1 = wa.empty() ? static_cast<double>(a.size()) : effective_sample_size(wa);
    r.n_eff2 = wb.empty() ? static_cast<double>(b.size()) : effective_sample_size(wb);
    r.p_value = ks_asymptotic_pvalue(r.statistic, r.n_eff1, r.n_eff2);
    return r;
}

double chi_square_sf(double x, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi-square needs positive degrees of freedom");
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size() || counts.size() < 2)
        throw std::invalid_argument("chi-square needs matching count and probability lists");
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    std::size_t n = 0;
    for (auto c : counts) n += c;
    ChiSquareResult r;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double e = static_cast<double>(n) * probs[i] / total;
        if (!(e > 0.0)) throw std::invalid_argument("chi-square cell with zero expected count");
        const double d = static_cast<double>(counts[i]) - e;
        r.statistic += d * d / e;
    }
    r.dof = static_cast<double>(counts.size() - 1);
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

}  // namespace sle
