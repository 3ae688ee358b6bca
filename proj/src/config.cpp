#include "sle/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sle {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    const std::string t = trim(v);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument(key + " must be a non-negative integer, got '" + v + "'");
    return std::stoull(t);
}

bool parse_bool(const std::string& v, const std::string& key) {
    const std::string t = trim(v);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw std::invalid_argument(key + " must be true or false");
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError(msg);
}

}  // namespace

void set_config_value(RunConfig& c, const std::string& key_in, const std::string& value_in) {
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);
    if (key.empty()) throw std::invalid_argument("empty config key");
    if (key == "subcommand") c.subcommand = value;
    else if (key == "target") c.target = value;
    else if (key == "kappa") c.kappa = parse_number(value, key);
    else if (key == "rho") c.rho = parse_number(value, key);
    else if (key == "z0") c.z0 = parse_complex(value);
    else if (key == "x0") c.x0 = parse_number(value, key);
    else if (key == "dt") c.dt = parse_number(value, key);
    else if (key == "horizon") c.horizon = parse_number(value, key);
    else if (key == "swallow_eps") c.swallow_eps = parse_number(value, key);
    else if (key == "n") c.n = parse_u64(value, key);
    else if (key == "region") c.region = parse_region(value);
    else if (key == "r") c.r = parse_number(value, key);
    else if (key == "quad_h") c.quad_h = parse_number(value, key);
    else if (key == "t") c.t = parse_number(value, key);
    else if (key == "t_list") c.t_list = parse_number_list(value, key);
    else if (key == "b_list") c.b_list = parse_number_list(value, key);
    else if (key == "out") c.out = value;
    else if (key == "seed") c.seed = parse_u64(value, key);
    else if (key == "quick") c.quick = parse_bool(value, key);
    else if (key == "threads") c.threads = static_cast<unsigned>(parse_u64(value, key));
    else c.params[key] = value;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not key=value");
    set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(c, line.substr(0, eq), line.substr(eq + 1));
    }
    return c;
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream o;
    auto put = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    if (!c.subcommand.empty()) put("subcommand", c.subcommand);
    if (!c.target.empty()) put("target", c.target);
    if (c.kappa) put("kappa", format_double(*c.kappa));
    if (c.rho) put("rho", format_double(*c.rho));
    if (c.z0) put("z0", format_complex(*c.z0));
    if (c.x0) put("x0", format_double(*c.x0));
    if (c.dt) put("dt", format_double(*c.dt));
    if (c.horizon) put("horizon", format_double(*c.horizon));
    if (c.swallow_eps) put("swallow_eps", format_double(*c.swallow_eps));
    if (c.n) put("n", std::to_string(*c.n));
    if (c.region) put("region", format_region(*c.region));
    if (c.r) put("r", format_double(*c.r));
    if (c.quad_h) put("quad_h", format_double(*c.quad_h));
    if (c.t) put("t", format_double(*c.t));
    if (c.t_list) put("t_list", format_number_list(*c.t_list));
    if (c.b_list) put("b_list", format_number_list(*c.b_list));
    put("out", c.out);
    put("seed", std::to_string(c.seed));
    put("quick", c.quick ? "true" : "false");
    put("threads", std::to_string(c.threads));
    for (const auto& [k, v] : c.params) put(k.c_str(), v);
    return o.str();
}

void RunConfig::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (kappa) require(finite(*kappa) && *kappa > 0.0, "kappa must be positive");
    if (rho) require(finite(*rho), "rho must be finite");
    if (z0) require(finite(z0->real()) && finite(z0->imag()) && z0->imag() > 0.0, "z0 must lie in the upper half-plane");
    if (x0) require(finite(*x0) && *x0 != 0.0, "x0 must be a nonzero real");
    if (dt) require(finite(*dt) && *dt > 0.0, "dt must be positive");
    if (horizon) require(finite(*horizon) && *horizon > 0.0, "horizon must be positive");
    if (swallow_eps) require(finite(*swallow_eps) && *swallow_eps > 0.0 && *swallow_eps < 1.0,
                             "swallow_eps must lie in (0, 1)");
    if (n) require(*n > 0, "n must be positive");
    if (region) region->validate();
    if (r) require(finite(*r) && *r > 0.0, "r must be positive");
    if (quad_h) require(finite(*quad_h) && *quad_h > 0.0, "quad_h must be positive");
    if (t) require(finite(*t) && *t > 0.0, "t must be positive");
    if (t_list)
        for (double v : *t_list) require(finite(v) && v > 0.0, "t_list entries must be positive");
    if (b_list)
        for (double v : *b_list) require(finite(v) && v > 0.0, "b_list entries must be positive");
    if (z0 && x0) throw PreconditionError("set either z0 or x0, not both");
}

DriverConfig driver_config(const RunConfig& c, DriverConfig d) {
    if (c.kappa) d.kappa = *c.kappa;
    if (c.rho) d.rho = *c.rho;
    if (c.z0) d.force_point = InteriorForce{*c.z0};
    if (c.x0) d.force_point = BoundaryForce{*c.x0};
    if (c.dt) d.dt = *c.dt;
    if (c.horizon) d.horizon = *c.horizon;
    if (c.swallow_eps) d.swallow_eps = *c.swallow_eps;
    d.seed = c.seed;
    d.validate();
    return d;
}

std::map<std::string, std::string> to_params(const RunConfig& c) {
    std::map<std::string, std::string> m = c.params;
    if (c.kappa) m["kappa"] = format_double(*c.kappa);
    if (c.rho) m["rho"] = format_double(*c.rho);
    if (c.z0) m["z0"] = format_complex(*c.z0);
    if (c.x0) m["x0"] = format_double(*c.x0);
    if (c.dt) m["dt"] = format_double(*c.dt);
    if (c.horizon) m["horizon"] = format_double(*c.horizon);
    if (c.swallow_eps) m["swallow_eps"] = format_double(*c.swallow_eps);
    if (c.n) m["n"] = std::to_string(*c.n);
    if (c.region) m["region"] = format_region(*c.region);
    if (c.r) m["r"] = format_double(*c.r);
    if (c.quad_h) m["quad_h"] = format_double(*c.quad_h);
    if (c.t) m["t"] = format_double(*c.t);
    if (c.t_list) m["t_list"] = format_number_list(*c.t_list);
    if (c.b_list) m["b_list"] = format_number_list(*c.b_list);
    return m;
}

}  // namespace sle
