#include "sle/pathspace.hpp"

#include <algorithm>

namespace sle {

std::size_t grid_count(double span, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("grid_count: dt must be positive");
    if (!(span > 0.0)) return 0;
    if (!std::isfinite(span)) throw std::invalid_argument("grid_count: infinite span");
    const double x = span / dt;
    return static_cast<std::size_t>(std::ceil(x - std::max(1e-9, 8e-16 * x)));
}

void WeightProcess::validate() const {
    if (times.size() != cumulative.size() || times.empty())
        throw std::invalid_argument("weight process needs matching nonempty knot lists");
    if (times.front() != 0.0 || cumulative.front() != 0.0)
        throw std::invalid_argument("weight process must start at theta(0) = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] < times[i - 1]) throw std::invalid_argument("weight process times must be nondecreasing");
        if (cumulative[i] < cumulative[i - 1])
            throw std::invalid_argument("weight process must be nondecreasing");
        if (times[i] == 0.0 && cumulative[i] != 0.0)
            throw std::invalid_argument("weight process jumps at time 0");
    }
}

double WeightProcess::inverse(double u) const {
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) return times.back();
    const std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    if (i == 0) return times.front();
    const double c0 = cumulative[i - 1];
    const double c1 = cumulative[i];
    if (c1 <= c0) return times[i];
    const double w = (u - c0) / (c1 - c0);
    return times[i - 1] + w * (times[i] - times[i - 1]);
}

WeightProcess step_weight(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("step weight time must be positive");
    return {{0.0, tau, tau}, {0.0, 0.0, 1.0}};
}

WeightProcess linear_weight(double cap, double rate) {
    if (!(cap > 0.0) || !(rate >= 0.0)) throw std::invalid_argument("linear weight needs cap > 0, rate >= 0");
    return {{0.0, cap}, {0.0, cap * rate}};
}

}  // namespace sle
