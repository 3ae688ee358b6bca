#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sle/archive.hpp"
#include "sle/config.hpp"
#include "sle/loewner.hpp"
#include "sle/observables.hpp"
#include "sle/parallel.hpp"
#include "sle/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sle;

namespace {

std::size_t take_size(std::map<std::string, std::string>& p, const std::string& key, std::size_t dflt) {
    auto it = p.find(key);
    if (it == p.end()) return dflt;
    const double v = parse_number(it->second, key);
    if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument(key + " must be a positive integer");
    p.erase(it);
    return static_cast<std::size_t>(v);
}

double take_double(std::map<std::string, std::string>& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    if (it == p.end()) return dflt;
    const double v = parse_number(it->second, key);
    p.erase(it);
    return v;
}

void reject_leftovers(const std::map<std::string, std::string>& p, const std::string& where) {
    if (!p.empty()) throw std::invalid_argument("unknown key '" + p.begin()->first + "' for " + where);
}

json metadata_base(const RunConfig& cfg) {
    json m;
    m["subcommand"] = cfg.subcommand;
    m["target"] = cfg.target;
    m["seed"] = cfg.seed;
    m["config"] = emit_config(cfg);
    return m;
}

void write_json(const fs::path& file, const json& j) { write_file_atomic(file, j.dump(2) + "\n"); }

int cmd_simulate(RunConfig cfg) {
    auto params = cfg.params;
    const std::size_t n = cfg.n.value_or(1);
    DriverConfig base;
    const DriverConfig dc = driver_config(cfg, base);
    fs::create_directories(cfg.out);
    json meta = metadata_base(cfg);
    meta["n"] = n;
    std::vector<AnyPath> paths(n);

    if (cfg.target == "brownian") {
        reject_leftovers(params, "simulate brownian");
        parallel_for(n, [&](std::size_t i) {
            RngStream rng(cfg.seed, i);
            paths[i] = simulate_brownian_driver(dc, rng);
        });
    } else if (cfg.target == "sle-rho" || cfg.target == "extended") {
        reject_leftovers(params, "simulate " + cfg.target);
        if (!dc.rho) throw PreconditionError("simulate " + cfg.target + " needs rho");
        const bool extended = cfg.target == "extended";
        if (extended) {
            const double lim = dc.kappa / 2.0 - 4.0;
            if (*dc.rho > lim)
                throw PreconditionError("extended simulation requires rho <= kappa/2 - 4 (rho = " + format_double(*dc.rho) +
                                        ", kappa/2 - 4 = " + format_double(lim) + ")");
        }
        std::vector<Outcome> outcome(n);
        std::vector<double> swallow(n, kInf);
        parallel_for(n, [&](std::size_t i) {
            RngStream rng(cfg.seed, i);
            if (extended) {
                ExtendedRun run = simulate_extended(dc, rng);
                outcome[i] = run.first_arm.outcome;
                swallow[i] = run.junction;
                paths[i] = std::move(run.driver);
            } else {
                DriverRun run = simulate_sle_rho(dc, rng);
                outcome[i] = run.outcome;
                swallow[i] = run.track.swallow_time;
                paths[i] = std::move(run.driver);
            }
        });
        std::size_t sw = 0, hz = 0, un = 0;
        json times = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            sw += outcome[i] == Outcome::swallowed;
            hz += outcome[i] == Outcome::horizon;
            un += outcome[i] == Outcome::unresolved;
            times.push_back(std::isfinite(swallow[i]) ? json(swallow[i]) : json(nullptr));
        }
        meta["counts"] = {{"swallowed", sw}, {"horizon", hz}, {"unresolved", un}};
        meta["swallow_times"] = times;
    } else if (cfg.target == "radial") {
        RadialOptions ro;
        ro.ds = take_double(params, "ds", ro.ds);
        ro.s_max = take_double(params, "s_max", ro.s_max);
        ro.keep_path = true;
        reject_leftovers(params, "simulate radial");
        std::vector<RadialDiffusionSample> out(n);
        parallel_for(n, [&](std::size_t i) {
            RngStream rng(cfg.seed, i);
            out[i] = simulate_radial_diffusion(dc, rng, ro);
        });
        json times = json::array();
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < n; ++i) {
            times.push_back(out[i].swallow_time);
            flagged += out[i].flagged;
            const double h = out[i].ds * static_cast<double>(out[i].v.size());
            paths[i] = make_truncated_path(out[i].ds, std::move(out[i].v), h);
        }
        meta["swallow_times"] = times;
        meta["tail_flagged"] = flagged;
        meta["archive_contents"] = "angle diffusion V on the s time scale";
    } else {
        throw std::invalid_argument("unknown simulate kind '" + cfg.target + "' (brownian, sle-rho, extended, radial)");
    }
    const fs::path archive = fs::path(cfg.out) / "paths.slep";
    write_archive(archive, paths);
    meta["archive"] = archive.string();
    write_json(fs::path(cfg.out) / "metadata.json", meta);
    std::cout << meta.dump() << "\n";
    return 0;
}

int cmd_trace(RunConfig cfg) {
    auto params = cfg.params;
    TraceOptions opt;
    opt.stride = take_size(params, "stride", 1);
    opt.exact = take_double(params, "exact", 0.0) != 0.0;
    reject_leftovers(params, "trace");
    if (cfg.target.empty()) throw std::invalid_argument("trace needs an archive path");
    const auto paths = read_archive(cfg.target);
    if (paths.empty()) {
        std::cerr << "warning: archive " << cfg.target << " holds no paths; nothing traced\n";
        return 0;
    }
    fs::create_directories(cfg.out);
    json files = json::array();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto* p = std::get_if<RealPath>(&paths[i]);
        if (!p) {
            std::cerr << "warning: path " << i << " is complex-valued; skipped\n";
            continue;
        }
        const TracedCurve c = trace_curve(*p, opt);
        const fs::path f = fs::path(cfg.out) / ("curve_" + std::to_string(i) + ".csv");
        write_file_atomic(f, c.to_csv());
        files.push_back(f.string());
    }
    json meta = metadata_base(cfg);
    meta["curves"] = files;
    write_json(fs::path(cfg.out) / "trace_metadata.json", meta);
    std::cout << meta.dump() << "\n";
    return 0;
}

int cmd_estimate(RunConfig cfg) {
    auto params = cfg.params;
    const double kappa = cfg.kappa.value_or(6.0);
    json out;
    if (cfg.target == "c-kappa1") {
        CKappaConfig c;
        if (cfg.quick) {
            c.n_curves = 100;
            c.per_cell = 2;
        }
        if (cfg.region) c.U = *cfg.region;
        if (cfg.n) c.n_curves = *cfg.n;
        if (cfg.dt) c.dt = *cfg.dt;
        if (cfg.horizon) c.horizon = *cfg.horizon;
        if (cfg.quad_h) c.quad_h = *cfg.quad_h;
        c.per_cell = take_size(params, "per_cell", c.per_cell);
        c.lattice_pitch = take_double(params, "lattice_pitch", c.lattice_pitch);
        c.lattice_xmax = take_double(params, "lattice_xmax", c.lattice_xmax);
        reject_leftovers(params, "estimate c-kappa1");
        const auto [a, b] = estimate_c_kappa1(kappa, c, cfg.seed);
        out = json::array({a.to_json(), b.to_json()});
    } else if (cfg.target == "capacity-green") {
        CapacityGreenOptions o;
        if (cfg.dt) o.dt = *cfg.dt;
        if (cfg.swallow_eps) o.swallow_eps = *cfg.swallow_eps;
        reject_leftovers(params, "estimate capacity-green");
        const Complex z = cfg.z0.value_or(Complex(0.0, 1.0));
        out = capacity_green_mc(kappa, z, cfg.t.value_or(1.0), cfg.n.value_or(cfg.quick ? 200 : 1000), cfg.seed, o)
                  .to_json();
    } else if (cfg.target == "psi0") {
        reject_leftovers(params, "estimate psi0");
        if (!cfg.region) throw std::invalid_argument("estimate psi0 needs region");
        const double rho = cfg.rho.value_or(kappa - 8.0);
        const QuadratureResult q = psi0_interior(kappa, rho, *cfg.region, cfg.quad_h.value_or(0.02));
        EstimateReport r;
        r.name = "psi0";
        r.kappa = kappa;
        r.rho = rho;
        r.value = q.value;
        r.stderr_ = std::abs(q.value - q.coarse);
        r.ci_lo = q.value - r.stderr_;
        r.ci_hi = q.value + r.stderr_;
        r.n = 0;
        r.seed = cfg.seed;
        if (q.too_coarse) r.flags.push_back("quadrature_too_coarse");
        r.extra["region"] = format_region(*cfg.region);
        r.extra["h"] = cfg.quad_h.value_or(0.02);
        r.extra["coarse_value"] = q.coarse;
        out = r.to_json();
    } else {
        throw std::invalid_argument("unknown estimator '" + cfg.target + "' (c-kappa1, capacity-green, psi0)");
    }
    fs::create_directories(cfg.out);
    json meta = metadata_base(cfg);
    meta["result"] = out;
    write_json(fs::path(cfg.out) / "estimate.json", meta);
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_verify(RunConfig cfg) {
    std::vector<const NamedTest*> selected;
    if (cfg.target == "all") {
        for (const NamedTest& t : test_registry()) selected.push_back(&t);
    } else {
        selected.push_back(&find_test(cfg.target));
    }
    const ParamMap params = to_params(cfg);
    if (cfg.target == "all" && !params.empty())
        throw std::invalid_argument("parameters cannot be applied to 'verify all'; name a single test");
    fs::create_directories(cfg.out);
    std::string lines;
    std::string timings;
    bool all_ok = true;
    for (const NamedTest* t : selected) {
        const TestReport r = t->run(params, cfg.quick, cfg.seed);
        all_ok = all_ok && r.passed;
        json j = r.to_json();
        std::cout << j.dump() << std::endl;
        // Wall-clock time goes to its own file so reports.jsonl is reproducible.
        timings += json{{"name", r.name}, {"runtime_s", r.runtime_s}}.dump() + "\n";
        j.erase("runtime_s");
        lines += j.dump() + "\n";
    }
    write_file_atomic(fs::path(cfg.out) / "reports.jsonl", lines);
    write_file_atomic(fs::path(cfg.out) / "runtimes.jsonl", timings);
    json meta = metadata_base(cfg);
    meta["passed"] = all_ok;
    write_json(fs::path(cfg.out) / "verify_metadata.json", meta);
    return all_ok ? 0 : 1;
}

int cmd_archive_info(const RunConfig& cfg) {
    if (cfg.target.empty()) throw std::invalid_argument("archive-info needs an archive path");
    const auto paths = read_archive(cfg.target);
    json rows = json::array();
    for (const AnyPath& p : paths) {
        std::visit(
            [&](const auto& path) {
                json r;
                r["complex"] = std::is_same_v<std::decay_t<decltype(path)>, ComplexPath>;
                r["dt"] = path.dt;
                r["samples"] = path.size();
                r["truncated"] = path.truncated();
                if (path.truncated())
                    r["horizon"] = path.horizon;
                else
                    r["lifetime"] = path.lifetime;
                rows.push_back(r);
            },
            p);
    }
    json out;
    out["archive"] = cfg.target;
    out["paths"] = paths.size();
    out["entries"] = rows;
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SLE simulation and verification toolkit"};
    app.require_subcommand(1);
    std::string config_file;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    bool quick = false;
    app.add_option("--config", config_file, "key = value config file");
    app.add_option("--set", sets, "override key=value (repeatable)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_flag("--quick", quick, "reduced sample sizes");

    std::string kind, target;
    auto* sim = app.add_subcommand("simulate", "sample driving processes into a path archive");
    sim->add_option("kind", kind, "brownian | sle-rho | extended | radial")->required();
    auto* trace = app.add_subcommand("trace", "trace curves of every driver in an archive");
    trace->add_option("archive", target)->required();
    auto* est = app.add_subcommand("estimate", "run an estimator");
    est->add_option("name", target, "c-kappa1 | capacity-green | psi0")->required();
    auto* ver = app.add_subcommand("verify", "run named statistical tests");
    ver->add_option("test", target, "test name or 'all'")->required();
    auto* info = app.add_subcommand("archive-info", "summarise a path archive");
    info->add_option("archive", target)->required();
    for (CLI::App* sc : {sim, trace, est, ver, info}) sc->fallthrough();

    CLI11_PARSE(app, argc, argv);
    try {
        RunConfig cfg;
        if (!config_file.empty()) cfg = parse_config(read_file(config_file));
        for (const std::string& s : sets) apply_override(cfg, s);
        if (seed) cfg.seed = *seed;
        if (out) cfg.out = *out;
        if (threads) cfg.threads = *threads;
        if (quick) cfg.quick = true;
        CLI::App* sc = app.get_subcommands().front();
        cfg.subcommand = sc->get_name();
        cfg.target = sc == sim ? kind : target;
        cfg.validate();
        if (cfg.threads) set_thread_count(cfg.threads);
        if (sc == sim) return cmd_simulate(cfg);
        if (sc == trace) return cmd_trace(cfg);
        if (sc == est) return cmd_estimate(cfg);
        if (sc == ver) return cmd_verify(cfg);
        return cmd_archive_info(cfg);
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
