#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sle {

struct EstimateReport {
    std::string name;
    double kappa = 0.0;
    std::optional<double> rho;
    double value = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> flags;
    /// Estimator-specific numbers (e.g. unresolved counts, route ratio).
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool has_flag(const std::string& f) const;
    nlohmann::ordered_json to_json() const;
};

}  // namespace sle
