#pragma once

#include <cstddef>
#include <vector>

#include "sle/types.hpp"

namespace sle {

/// One vertical-slit step: driving value `lambda` held for capacity time `delta`.
struct SlitMap {
    double lambda = 0.0;
    double delta = 0.0;
};

/// w -> lambda + sqrt((w - lambda)^2 + 4 delta), upper half-plane branch.
Complex slit_forward(const SlitMap& m, Complex w);
/// Real version; a point equal to lambda is sent to the right.
double slit_forward_real(const SlitMap& m, double x);
/// w -> lambda + sqrt((w - lambda)^2 - 4 delta): Im > 0, or on the real line
/// the root whose sign follows Re(w - lambda).
Complex slit_inverse(const SlitMap& m, Complex w);

struct ZipperOptions {
    std::size_t leaf_size = 16;
    /// Laurent terms kept per node.
    std::size_t order = 24;
    /// Series used only when |w - c| > far_ratio * r.
    double far_ratio = 2.2;
};

/// Hierarchical evaluator of compositions of inverse slit maps.
///
/// Maps are indexed 0..n-1 in time order. A node covering [a, b) stores the
/// composite inverse phi_a^{-1} o ... o phi_{b-1}^{-1}, which is analytic off a
/// real interval [c - r, c + r] and is expanded there as
/// w + sum_j coef_j (w - c)^{-j} with real coefficients obtained by sampling
/// the children on the circle |w - c| = 2r.
class ZipperTree {
public:
    ZipperTree(std::vector<SlitMap> maps, ZipperOptions opt = {});

    std::size_t size() const { return maps_.size(); }

    /// phi_0^{-1} o ... o phi_{k-1}^{-1} (w).
    Complex apply_prefix(std::size_t k, Complex w) const;
    /// Tip of the hull after k+1 maps: the prefix of length k applied to
    /// phi_k^{-1}(lambda_k).
    Complex tip(std::size_t k) const;
    /// Same with exact right-to-left composition, O(k).
    Complex apply_prefix_exact(std::size_t k, Complex w) const;

private:
    struct Node {
        std::size_t a = 0;
        std::size_t b = 0;
        int left = -1;
        int right = -1;
        double c = 0.0;
        double r = 0.0;
        std::vector<double> coef;
    };

    int build(std::size_t a, std::size_t b);
    void fit_series(Node& node);
    Complex apply_node(int id, Complex w) const;
    Complex apply_prefix_node(int id, std::size_t k, Complex w) const;
    Complex apply_range_exact(std::size_t a, std::size_t b, Complex w) const;

    std::vector<SlitMap> maps_;
    ZipperOptions opt_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace sle
