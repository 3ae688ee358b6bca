#include "sle/zipper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sle {

Complex slit_forward(const SlitMap& m, Complex w) {
    const Complex u = w - m.lambda;
    Complex s = std::sqrt(u * u + 4.0 * m.delta);
    if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() * u.real() < 0.0)) s = -s;
    return m.lambda + s;
}

double slit_forward_real(const SlitMap& m, double x) {
    const double u = x - m.lambda;
    const double s = std::sqrt(u * u + 4.0 * m.delta);
    return m.lambda + (u < 0.0 ? -s : s);
}

Complex slit_inverse(const SlitMap& m, Complex w) {
    const Complex u = w - m.lambda;
    Complex s = std::sqrt(u * u - 4.0 * m.delta);
    if (s.imag() < 0.0) s = -s;
    if (s.imag() == 0.0 && s.real() * u.real() < 0.0) s = -s;
    return m.lambda + s;
}

ZipperTree::ZipperTree(std::vector<SlitMap> maps, ZipperOptions opt) : maps_(std::move(maps)), opt_(opt) {
    if (opt_.leaf_size == 0) opt_.leaf_size = 1;
    if (!maps_.empty()) {
        nodes_.reserve(4 * (maps_.size() / opt_.leaf_size + 1));
        root_ = build(0, maps_.size());
    }
}

int ZipperTree::build(std::size_t a, std::size_t b) {
    const int id = static_cast<int>(nodes_.size());
    Node fresh;
    fresh.a = a;
    fresh.b = b;
    nodes_.push_back(fresh);
    double lo = 0.0;
    double hi = 0.0;
    if (b - a <= opt_.leaf_size) {
        for (std::size_t j = a; j < b; ++j) {
            const SlitMap& m = maps_[j];
            const double half = 2.0 * std::sqrt(m.delta);
            if (j == a) {
                lo = m.lambda - half;
                hi = m.lambda + half;
            } else {
                const double flo = slit_forward_real(m, lo);
                const double fhi = slit_forward_real(m, hi);
                lo = std::min({m.lambda - half, flo, fhi});
                hi = std::max({m.lambda + half, flo, fhi});
            }
        }
    } else {
        const std::size_t mid = a + (b - a) / 2;
        const int l = build(a, mid);
        const int r = build(mid, b);
        nodes_[id].left = l;
        nodes_[id].right = r;
        double llo = nodes_[l].c - nodes_[l].r;
        double lhi = nodes_[l].c + nodes_[l].r;
        for (std::size_t j = mid; j < b; ++j) {
            llo = slit_forward_real(maps_[j], llo);
            lhi = slit_forward_real(maps_[j], lhi);
        }
        lo = std::min({nodes_[r].c - nodes_[r].r, llo, lhi});
        hi = std::max({nodes_[r].c + nodes_[r].r, llo, lhi});
    }
    Node& node = nodes_[id];
    node.c = 0.5 * (lo + hi);
    node.r = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-300;
    fit_series(node);
    return id;
}

void ZipperTree::fit_series(Node& node) {
    constexpr int kSamples = 32;
    const std::size_t p = opt_.order;
    if (p == 0) return;
    const double rad = 2.0 * node.r;
    std::vector<Complex> h(kSamples);
    const Node copy{node.a, node.b, node.left, node.right, node.c, node.r, {}};
    auto eval = [&](Complex w) {
        if (copy.left < 0) return apply_range_exact(copy.a, copy.b, w);
        return apply_node(copy.left, apply_node(copy.right, w));
    };
    for (int m = 0; m <= kSamples / 2; ++m) {
        const double th = 2.0 * kPi * m / kSamples;
        Complex w = copy.c + rad * Complex(std::cos(th), std::sin(th));
        if (m == 0 || m == kSamples / 2) w = Complex(w.real(), 0.0);
        h[m] = eval(w) - w;
    }
    for (int m = kSamples / 2 + 1; m < kSamples; ++m) h[m] = std::conj(h[kSamples - m]);
    node.coef.assign(p, 0.0);
    double scale = 1.0;
    for (std::size_t j = 1; j <= p; ++j) {
        scale *= rad;
        Complex acc = 0.0;
        for (int m = 0; m < kSamples; ++m) {
            const double th = 2.0 * kPi * static_cast<double>(j) * m / kSamples;
            acc += h[m] * Complex(std::cos(th), std::sin(th));
        }
        node.coef[j - 1] = acc.real() / kSamples * scale;
    }
}

Complex ZipperTree::apply_range_exact(std::size_t a, std::size_t b, Complex w) const {
    for (std::size_t j = b; j-- > a;) w = slit_inverse(maps_[j], w);
    return w;
}

Complex ZipperTree::apply_node(int id, Complex w) const {
    const Node& n = nodes_[id];
    const Complex d = w - n.c;
    if (!n.coef.empty() && std::abs(d) > opt_.far_ratio * n.r) {
        const Complex u = 1.0 / d;
        Complex acc = 0.0;
        for (std::size_t j = n.coef.size(); j-- > 0;) acc = (acc + n.coef[j]) * u;
        return w + acc;
    }
    if (n.left < 0) return apply_range_exact(n.a, n.b, w);
    return apply_node(n.left, apply_node(n.right, w));
}

Complex ZipperTree::apply_prefix_node(int id, std::size_t k, Complex w) const {
    const Node& n = nodes_[id];
    if (n.a >= k) return w;
    if (n.b <= k) return apply_node(id, w);
    if (n.left < 0) return apply_range_exact(n.a, k, w);
    w = apply_prefix_node(n.right, k, w);
    return apply_prefix_node(n.left, k, w);
}

Complex ZipperTree::apply_prefix(std::size_t k, Complex w) const {
    if (k > maps_.size()) throw std::out_of_range("apply_prefix beyond map count");
    if (k == 0) return w;
    return apply_prefix_node(root_, k, w);
}

Complex ZipperTree::apply_prefix_exact(std::size_t k, Complex w) const {
    if (k > maps_.size()) throw std::out_of_range("apply_prefix_exact beyond map count");
    return apply_range_exact(0, k, w);
}

Complex ZipperTree::tip(std::size_t k) const {
    if (k >= maps_.size()) throw std::out_of_range("tip index beyond map count");
    const SlitMap& m = maps_[k];
    const Complex w(m.lambda, 2.0 * std::sqrt(m.delta));
    return apply_prefix(k, w);
}

}  // namespace sle
