#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sle/drivers.hpp"
#include "sle/region.hpp"

namespace sle {

/// Flat key = value run description. Unset optionals take the defaults of the
/// dispatched command; keys not listed here are kept in `params` and handed to
/// the selected test or estimator, which rejects the ones it does not use.
struct RunConfig {
    std::string subcommand;
    /// Driver kind, estimator, test name or archive path, depending on the subcommand.
    std::string target;
    std::optional<double> kappa;
    std::optional<double> rho;
    std::optional<Complex> z0;
    std::optional<double> x0;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> swallow_eps;
    std::optional<std::size_t> n;
    std::optional<Region> region;
    std::optional<double> r;
    std::optional<double> quad_h;
    std::optional<double> t;
    std::optional<std::vector<double>> t_list;
    std::optional<std::vector<double>> b_list;
    std::string out = ".";
    std::uint64_t seed = 0;
    bool quick = false;
    unsigned threads = 0;
    std::map<std::string, std::string> params;

    /// Range checks on every set field.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// One "key = value" per line; '#' starts a comment.
RunConfig parse_config(const std::string& text);
std::string emit_config(const RunConfig& cfg);

/// Applies one "key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Driver settings with the config's overrides applied to `base`.
DriverConfig driver_config(const RunConfig& cfg, DriverConfig base = {});

/// Set fields and params as a flat map, for test dispatch.
std::map<std::string, std::string> to_params(const RunConfig& cfg);

}  // namespace sle
