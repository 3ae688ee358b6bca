#include "sle/estimate.hpp"

#include <algorithm>

namespace sle {

bool EstimateReport::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

nlohmann::ordered_json EstimateReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["kappa"] = kappa;
    j["rho"] = rho ? nlohmann::ordered_json(*rho) : nlohmann::ordered_json(nullptr);
    j["value"] = value;
    j["stderr"] = stderr_;
    j["ci95"] = {ci_lo, ci_hi};
    j["n"] = n;
    j["seed"] = seed;
    j["flags"] = flags;
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

}  // namespace sle
