// Experiment runner: binds flat key-value configs to the library modules and
// persists CSV/JSON artifacts plus a run manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "stokeslab/analysis.hpp"
#include "stokeslab/config.hpp"
#include "stokeslab/funcalc.hpp"
#include "stokeslab/helmholtz.hpp"
#include "stokeslab/report.hpp"
#include "stokeslab/semigroup.hpp"

namespace fs = std::filesystem;
using namespace stokeslab;

namespace {

const char* kDefaults = R"(# stokeslab defaults (all recognized keys)
[domain]
kind = annulus2d        # annulus2d | annular_cylinder3d
a = 1.0
b = 2.0
lz = 2.0                # 3D only

[grid]
nr = 48
mmax = 6
kmax = 0                # 3D only

[basis]
n_modes = 60

[run]
experiment = validate   # spectrum | evolve | resolvent | powers | maxreg | decay | validate
outdir = out
seed = 1
workers = 0             # 0 = available parallelism

[evolve]
t_max = 1.0
n_times = 21

[resolvent]
n_angles = 5
n_mags = 7
mag_min = 0.01
mag_max = 10000.0
n_probes = 5

[powers]
p = 2.0
s_list = -4,-2,-1,1,2,4
n_probes = 3
n_quad = 400
alphas = 0.25,0.5,0.75

[maxreg]
p = 2.0
q = 2.0
t_horizon_factor = 5.0  # T = factor / lambda_1
n_trials = 20
n_steps = 64

[decay]
p = 1.0               # 1 <= p <= q; q > 1e12 means sup norm
q = 1e15
t_min = 0.001
t_max = 0.05
n_samples = 12
bump_width = 0.02
)";

const std::set<std::string> kAllowed = {
    "domain.kind", "domain.a", "domain.b", "domain.lz",
    "grid.nr", "grid.mmax", "grid.kmax",
    "basis.n_modes",
    "run.experiment", "run.outdir", "run.seed", "run.workers",
    "evolve.t_max", "evolve.n_times",
    "resolvent.n_angles", "resolvent.n_mags", "resolvent.mag_min", "resolvent.mag_max", "resolvent.n_probes",
    "powers.p", "powers.s_list", "powers.n_probes", "powers.n_quad", "powers.alphas",
    "maxreg.p", "maxreg.q", "maxreg.t_horizon_factor", "maxreg.n_trials", "maxreg.n_steps",
    "decay.p", "decay.q", "decay.t_min", "decay.t_max", "decay.n_samples", "decay.bump_width",
};

std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError("key '" + key + "' has a malformed list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
    return out;
}

struct RunContext {
    Config cfg;
    fs::path outdir;
    unsigned seed = 1;
    int workers = 0;
    bool no_cache = false;
    nlohmann::ordered_json manifest;
};

DomainSpec domain_from(const Config& c) {
    std::string kind = c.get_string("domain.kind", "annulus2d");
    double a = c.get_double("domain.a", 1.0), b = c.get_double("domain.b", 2.0);
    if (kind == "annulus2d") return DomainSpec::annulus(a, b);
    if (kind == "annular_cylinder3d") return DomainSpec::annular_cylinder(a, b, c.get_double("domain.lz", 2.0));
    throw ConfigError("domain.kind must be annulus2d or annular_cylinder3d, got '" + kind + "'");
}

std::string basis_cache_key(const DomainSpec& d, int nr, int mmax, int kmax, int n_modes) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d|%.17g|%.17g|%.17g|%d|%d|%d|%d", d.dim(), d.a, d.b, d.Lz, nr, mmax,
                  kmax, n_modes);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016zx", std::hash<std::string>{}(buf));
    return hex;
}

StokesBasis obtain_basis(RunContext& ctx) {
    DomainSpec dom = domain_from(ctx.cfg);
    int nr = ctx.cfg.get_int("grid.nr", 48);
    int mmax = ctx.cfg.get_int("grid.mmax", 6);
    int kmax = ctx.cfg.get_int("grid.kmax", dom.dim() == 2 ? 0 : 2);
    int n_modes = ctx.cfg.get_int("basis.n_modes", 60);
    fs::path cache = ctx.outdir / "cache" / ("basis-" + basis_cache_key(dom, nr, mmax, kmax, n_modes) + ".json");
    if (!ctx.no_cache && fs::exists(cache)) {
        StokesBasis b = load_basis(cache.string());
        ctx.manifest["basis_cache"] = "hit";
        return b;
    }
    BuildOptions opts;
    opts.workers = ctx.workers;
    GridPtr g = make_grid(dom, nr, mmax, kmax);
    StokesBasis b = build_basis(g, n_modes, opts);
    fs::create_directories(cache.parent_path());
    save_basis(b, cache.string());
    ctx.manifest["basis_cache"] = "rebuilt";
    return b;
}

void run_spectrum(RunContext& ctx, const StokesBasis& b) {
    CsvWriter csv((ctx.outdir / "spectrum.csv").string(),
                  {"index", "lambda", "m", "k", "res_eig", "res_div", "res_bc", "pressure_dev"});
    for (int i = 0; i < b.size(); ++i) {
        const auto& p = b.eigs()[i];
        csv.row({CsvWriter::num(i), CsvWriter::num(p.lambda), CsvWriter::num(p.mode.m),
                 CsvWriter::num(p.mode.k), CsvWriter::num(p.residuals.eig), CsvWriter::num(p.residuals.div),
                 CsvWriter::num(p.residuals.bc), CsvWriter::num(p.pressure_dev)});
    }
    CsvWriter kcsv((ctx.outdir / "kernel.csv").string(), {"j", "flux_1", "flux_2", "l2_norm"});
    for (int j = 0; j < b.J(); ++j) {
        Field kf = b.kernel_field(j);
        double f2 = b.J() > 1 ? std::abs(cut_flux(kf, 2)) : 0.0;
        kcsv.row({CsvWriter::num(j + 1), CsvWriter::num(std::abs(cut_flux(kf, 1))), CsvWriter::num(f2),
                  CsvWriter::num(norm_l2(kf))});
    }
}

void run_evolve(RunContext& ctx, const StokesBasis& b) {
    double tmax = ctx.cfg.get_double("evolve.t_max", 1.0);
    int nt = ctx.cfg.get_int("evolve.n_times", 21);
    Field u0 = random_probe(b, ctx.seed);
    std::vector<double> times(nt);
    for (int i = 0; i < nt; ++i) times[i] = tmax * i / (nt - 1);
    EvolutionResult ev = evolve_homogeneous(b, u0, times);
    CsvWriter csv((ctx.outdir / "evolve.csv").string(), {"t", "norm_name", "p", "value"});
    for (size_t i = 0; i < ev.times.size(); ++i) {
        Field u = b.synthesize(ev.states[i]);
        csv.row({CsvWriter::num(ev.times[i]), "l2_u", CsvWriter::num(2.0), CsvWriter::num(norm_l2(u))});
        csv.row({CsvWriter::num(ev.times[i]), "l2_curl_u", CsvWriter::num(2.0),
                 CsvWriter::num(norm_l2(vector_curl(u)))});
    }
}

void run_resolvent(RunContext& ctx, const StokesBasis& b) {
    int na = ctx.cfg.get_int("resolvent.n_angles", 5);
    int nm = ctx.cfg.get_int("resolvent.n_mags", 7);
    double m0 = ctx.cfg.get_double("resolvent.mag_min", 1e-2);
    double m1 = ctx.cfg.get_double("resolvent.mag_max", 1e4);
    int np = ctx.cfg.get_int("resolvent.n_probes", 5);
    std::vector<double> angles(na), mags(nm);
    for (int i = 0; i < na; ++i) angles[i] = -std::numbers::pi / 2 + std::numbers::pi * i / (na - 1);
    for (int i = 0; i < nm; ++i) mags[i] = m0 * std::pow(m1 / m0, static_cast<double>(i) / (nm - 1));
    auto rows = resolvent_sweep(b, angles, mags, 2.0, np, ctx.seed);
    CsvWriter csv((ctx.outdir / "resolvent.csv").string(),
                  {"angle", "abs_lambda", "quantity", "value", "probes", "seed"});
    for (const auto& r : rows) {
        csv.row({CsvWriter::num(r.angle), CsvWriter::num(r.abs_lambda), r.quantity, CsvWriter::num(r.value),
                 CsvWriter::num(np), CsvWriter::num(static_cast<int>(ctx.seed))});
    }
}

void run_powers(RunContext& ctx, const StokesBasis& b) {
    double p = ctx.cfg.get_double("powers.p", 2.0);
    auto s_list = parse_list(ctx.cfg.get_string("powers.s_list", "-4,-2,-1,1,2,4"), "powers.s_list");
    int np = ctx.cfg.get_int("powers.n_probes", 3);
    GrowthFit fit = imaginary_power_growth(b, p, s_list, np, ctx.seed);
    CsvWriter csv((ctx.outdir / "powers.csv").string(), {"s", "norm", "K", "theta", "residual", "probes", "seed"});
    for (size_t i = 0; i < fit.s_values.size(); ++i) {
        csv.row({CsvWriter::num(fit.s_values[i]), CsvWriter::num(fit.norms[i]), CsvWriter::num(fit.K),
                 CsvWriter::num(fit.theta), CsvWriter::num(fit.residual), CsvWriter::num(np),
                 CsvWriter::num(static_cast<int>(ctx.seed))});
    }
    // fractional-power route agreement on one probe
    auto alphas = parse_list(ctx.cfg.get_string("powers.alphas", "0.25,0.5,0.75"), "powers.alphas");
    DunfordOptions dopts;
    dopts.n_quad = ctx.cfg.get_int("powers.n_quad", 400);
    Field f = random_probe(b, ctx.seed);
    std::vector<Complex> ca(alphas.begin(), alphas.end());
    auto dn = power_apply_many(b, ca, f, 0.0, dopts);
    CsvWriter fcsv((ctx.outdir / "powers_frac.csv").string(), {"alpha", "rel_route_diff", "n_quad"});
    for (size_t i = 0; i < alphas.size(); ++i) {
        Field sp = power_apply(b, ca[i], f);
        fcsv.row({CsvWriter::num(alphas[i]), CsvWriter::num(norm_l2(dn[i] - sp) / norm_l2(sp)),
                  CsvWriter::num(dopts.n_quad)});
    }
}

void run_maxreg(RunContext& ctx, const StokesBasis& b) {
    double p = ctx.cfg.get_double("maxreg.p", 2.0), q = ctx.cfg.get_double("maxreg.q", 2.0);
    double T = ctx.cfg.get_double("maxreg.t_horizon_factor", 5.0) / b.lambda1();
    int trials = ctx.cfg.get_int("maxreg.n_trials", 20);
    int steps = ctx.cfg.get_int("maxreg.n_steps", 64);
    MaxRegResult res = maximal_regularity_constant(b, p, q, T, trials, ctx.seed, steps);
    CsvWriter csv((ctx.outdir / "maxreg.csv").string(), {"trial", "ratio", "p", "q", "T", "seed"});
    for (size_t i = 0; i < res.ratios.size(); ++i) {
        csv.row({CsvWriter::num(static_cast<int>(i)), CsvWriter::num(res.ratios[i]), CsvWriter::num(p),
                 CsvWriter::num(q), CsvWriter::num(T), CsvWriter::num(static_cast<int>(ctx.seed))});
    }
    ctx.manifest["maxreg_max_ratio"] = res.max_ratio;
    ctx.manifest["maxreg_skipped"] = res.skipped;
}

void run_decay(RunContext& ctx, const StokesBasis& b) {
    double p = ctx.cfg.get_double("decay.p", 1.0), q = ctx.cfg.get_double("decay.q", 1e15);
    double t0 = ctx.cfg.get_double("decay.t_min", 1e-3), t1 = ctx.cfg.get_double("decay.t_max", 5e-2);
    int ns = ctx.cfg.get_int("decay.n_samples", 12);
    double w = ctx.cfg.get_double("decay.bump_width", 0.02);
    Field u0 = bump_datum(b, w);
    DecayFit fit = fit_smoothing_exponent(b, u0, p, q, t0, t1, ns);
    CsvWriter csv((ctx.outdir / "decay.csv").string(), {"p", "q", "slope", "stderr", "t_min", "t_max"});
    csv.row({CsvWriter::num(p), CsvWriter::num(q), CsvWriter::num(fit.slope),
             CsvWriter::num(fit.stderr_slope), CsvWriter::num(fit.t_min), CsvWriter::num(fit.t_max)});
}

// Fast invariant suite used by `validate` and the determinism criterion.
int run_validate(RunContext& ctx, const StokesBasis& b) {
    struct Check {
        std::string name;
        double value;
        double threshold;
    };
    std::vector<Check> checks;

    double worst_res = 0.0;
    for (const auto& p : b.eigs()) {
        worst_res = std::max({worst_res, p.residuals.eig, p.residuals.div, p.residuals.bc});
    }
    checks.push_back({"eigen_residuals", worst_res, 1e-8});
    checks.push_back({"gram_error", b.gram_error(), 1e-9});

    double kflux = 0.0;
    for (int i = 0; i < b.J(); ++i) {
        for (int j = 1; j <= b.J(); ++j) {
            double expect = (i + 1 == j) ? 1.0 : 0.0;
            kflux = std::max(kflux, std::abs(cut_flux(b.kernel_field(i), j) - expect));
        }
    }
    checks.push_back({"kernel_fluxes", kflux, 1e-9});

    Field f = random_probe(b, ctx.seed);
    Field us = resolvent_apply(b, Complex(1.0, 1.0), f, ResolventRoute::Spectral);
    Field ud = resolvent_apply(b, Complex(1.0, 1.0), f, ResolventRoute::Direct);
    checks.push_back({"resolvent_route_agreement", norm_l2(us - ud) / norm_l2(us), 1e-8});

    Field h = power_apply(b, Complex(0.3), power_apply(b, Complex(0.2), f));
    Field h2 = power_apply(b, Complex(0.5), f);
    checks.push_back({"power_group_law", norm_l2(h - h2) / norm_l2(h2), 1e-9});

    Field a12 = power_apply(b, Complex(0.5), f);
    checks.push_back({"sqrtA_equals_curl_norm",
                      std::abs(norm_l2(a12) - norm_l2(vector_curl(f))) / norm_l2(a12), 1e-9});

    Field pg = project(gradient(weak_neumann(f)));
    checks.push_back({"projection_annihilates_gradients", norm_l2(pg) / std::max(1.0, norm_l2(f)), 1e-8});

    CsvWriter csv((ctx.outdir / "validate.csv").string(), {"check", "value", "threshold", "status"});
    int failures = 0;
    for (const auto& c : checks) {
        bool ok = c.value <= c.threshold;
        if (!ok) ++failures;
        csv.row({c.name, CsvWriter::num(c.value), CsvWriter::num(c.threshold), ok ? "pass" : "fail"});
    }
    return failures == 0 ? 0 : 2;
}

int execute(const std::string& config_path, bool no_cache, const std::string& forced_experiment) {
    auto t_start = std::chrono::steady_clock::now();
    RunContext ctx;
    ctx.cfg = config_path.empty() ? Config::parse_string(kDefaults) : Config::parse_file(config_path);
    ctx.cfg.validate_keys(kAllowed);
    ctx.no_cache = no_cache;

    std::string exp = forced_experiment.empty() ? ctx.cfg.get_string("run.experiment", "validate")
                                                : forced_experiment;
    ctx.outdir = ctx.cfg.get_string("run.outdir", "out");
    if (const char* env = std::getenv("STOKESLAB_OUTDIR")) ctx.outdir = env;
    ctx.seed = static_cast<unsigned>(ctx.cfg.get_int("run.seed", 1));
    ctx.workers = ctx.cfg.get_int("run.workers", 0);
    if (const char* env = std::getenv("STOKESLAB_WORKERS")) ctx.workers = std::atoi(env);
    fs::create_directories(ctx.outdir);

    ctx.manifest["experiment"] = exp;
    ctx.manifest["seed"] = ctx.seed;
    ctx.manifest["workers"] = ctx.workers;
    ctx.manifest["version"] = "1.0.0";
    nlohmann::ordered_json echo;
    for (const auto& [k, v] : ctx.cfg.values()) echo[k] = v;
    ctx.manifest["config"] = echo;

    StokesBasis b = obtain_basis(ctx);
    int rc = 0;
    if (exp == "spectrum") {
        run_spectrum(ctx, b);
    } else if (exp == "evolve") {
        run_evolve(ctx, b);
    } else if (exp == "resolvent") {
        run_resolvent(ctx, b);
    } else if (exp == "powers") {
        run_powers(ctx, b);
    } else if (exp == "maxreg") {
        run_maxreg(ctx, b);
    } else if (exp == "decay") {
        run_decay(ctx, b);
    } else if (exp == "validate") {
        rc = run_validate(ctx, b);
    } else {
        throw ConfigError("unknown experiment '" + exp + "' for key run.experiment");
    }

    auto t_end = std::chrono::steady_clock::now();
    ctx.manifest["wall_time_s"] = std::chrono::duration<double>(t_end - t_start).count();
    ctx.manifest["completed_utc"] = static_cast<long long>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count());
    std::ofstream mf(ctx.outdir / "manifest.json", std::ios::binary);
    mf << ctx.manifest.dump(2) << "\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stokeslab: spectral experiments for the Stokes operator with Navier-type boundary conditions"};
    app.require_subcommand(1);

    std::string config_path;
    bool no_cache = false;

    auto* run = app.add_subcommand("run", "run the experiment configured in a file");
    run->add_option("config", config_path, "path to the configuration file")->required();
    run->add_flag("--no-cache", no_cache, "force basis rebuild");

    std::string vconfig;
    auto* validate = app.add_subcommand("validate", "run the invariant suite (optionally with a config)");
    validate->add_option("config", vconfig, "optional configuration file");
    validate->add_flag("--no-cache", no_cache, "force basis rebuild");

    auto* defaults = app.add_subcommand("print-defaults", "print all recognized keys with defaults");

    CLI11_PARSE(app, argc, argv);

    try {
        if (defaults->parsed()) {
            std::cout << kDefaults;
            return 0;
        }
        if (validate->parsed()) return execute(vconfig, no_cache, "validate");
        return execute(config_path, no_cache, "");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
