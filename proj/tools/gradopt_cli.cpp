// gradopt command line: campaigns, single graduated runs, numeric checks and
// noise-model estimation. See README.md for the config file keys.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gradopt.hpp"

using namespace gradopt;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
    std::string trace;
};

Config load(const CommonFlags& f) {
    Config cfg = f.config.empty() ? parse_config_string("") : load_config(f.config);
    if (f.seed) cfg.campaign.seed = *f.seed;
    if (f.workers) cfg.campaign.workers = *f.workers;
    if (!f.out.empty()) cfg.campaign.output_dir = f.out;
    return cfg;
}

void write_trace(const std::string& path, const std::vector<StepRecord>& records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write trace " + path);
    os << "step,f,grad_norm,eta,batch,beta\n";
    os.precision(17);
    std::size_t k = 0;
    for (const auto& r : records) os << k++ << ',' << r.f << ',' << r.grad_norm << ',' << r.eta << ',' << r.batch << ',' << r.beta << '\n';
}

NoiseModel noise_model_for(const Config& cfg, const SyntheticFiniteSumProblem& problem) {
    if (!cfg.estimate_noise) return cfg.implicit_go.noise_model;
    const auto range = problem.base().metadata().range;
    std::vector<std::vector<double>> probes;
    for (std::size_t i = 0; i < cfg.probe_points; ++i)
        probes.push_back(random_start(problem.dim(), range, hash_key(cfg.campaign.seed, 0x70726f6265, i)));
    return estimate_noise_model(problem, probes, cfg.probe_batch, cfg.resamples, cfg.campaign.seed);
}

int cmd_bench(const CommonFlags& f) {
    Config cfg = load(f);
    CampaignSpec& spec = cfg.campaign;
    if (spec.functions.empty()) spec.functions.assign(kAllFunctions.begin(), kAllFunctions.end());
    if (spec.methods.empty()) spec.methods = {MethodSpec::ego_nice(), MethodSpec::ego_geo()};
    const CampaignReport report = run_campaign(spec);
    std::cout << emit_table(report).text;
    if (!spec.output_dir.empty()) std::cout << "results written to " << spec.output_dir << '\n';
    return 0;
}

int cmd_explicit(const CommonFlags& f) {
    Config cfg = load(f);
    cfg.explicit_go.record = !f.trace.empty();
    const BenchmarkFunction fn(cfg.function, cfg.campaign.dim);
    const auto res = explicit_go(fn, cfg.explicit_go, cfg.campaign.seed);
    std::printf("%-6s %12s %12s %8s %14s\n", "level", "delta", "eta", "steps", "f_end");
    for (const auto& l : res.levels)
        std::printf("%-6zu %12.4e %12.4e %8zu %14.6e%s\n", l.level, l.delta, l.eta, l.steps, l.f_end,
                    l.diverged ? "  diverged" : "");
    std::printf("f_final = %.6e  evaluations = %zu\n", res.f_final, res.evaluations);
    if (!f.trace.empty()) write_trace(f.trace, res.trace);
    return 0;
}

int cmd_implicit(const CommonFlags& f) {
    Config cfg = load(f);
    const auto& is = cfg.campaign.implicit;
    const auto problem = make_synthetic_problem(cfg.function, cfg.campaign.dim, is.n, is.s, cfg.campaign.seed);
    ImplicitGoConfig icfg = cfg.implicit_go;
    icfg.noise_model = noise_model_for(cfg, problem);
    icfg.record = !f.trace.empty();
    const auto x0 = random_start(problem.dim(), problem.base().metadata().range, cfg.campaign.seed);
    const auto res = implicit_go(problem, icfg, x0, cfg.campaign.seed);
    std::printf("noise model: C^2 = %.4e  K^2 = %.4e  (%s)\n", icfg.noise_model.c_sq, icfg.noise_model.k_sq,
                icfg.noise_model.estimated_from.c_str());
    std::printf("%-6s %12s %10s %8s %10s %14s %14s %14s\n", "level", "eta", "b_ideal", "b", "beta", "delta_ideal",
                "delta_real", "f_end");
    for (const auto& l : res.levels)
        std::printf("%-6zu %12.4e %10.2f %8zu %10.6f %14.6e %14.6e %14.6e%s\n", l.level, l.hp.eta, l.hp.batch, l.batch,
                    l.hp.beta, l.delta_ideal, l.delta_realized, l.f_end, l.diverged ? "  diverged" : "");
    std::printf("f_final = %.6e  evaluations = %zu\n", res.f_final, res.evaluations);
    if (!f.trace.empty()) write_trace(f.trace, res.trace);
    return 0;
}

int cmd_verify(const CommonFlags& f) {
    Config cfg = load(f);
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
        failures += ok ? 0 : 1;
    };

    const std::vector<double> grid{0.25, 0.2, 0.1, 0.05};
    const auto nice = verify_sigma_nice_rastrigin(grid, cfg.campaign.dim);
    char buf[160];
    std::snprintf(buf, sizeof buf, "sigma-nice Rastrigin on {0.25, 0.2, 0.1, 0.05}, sigma = %.4f", nice.sigma);
    report(nice.passed && nice.sigma >= 2.0 - 1e-6, buf);
    std::snprintf(buf, sizeof buf, "strong-convexity radius r(0) = %.5f, delta* = %.5f", strong_convexity_radius(0.0),
                  delta_star());
    report(std::abs(strong_convexity_radius(0.0) - 0.2507) < 1e-3 && std::abs(delta_star() - 0.917) < 1e-3, buf);

    const auto sched = NoiseSchedule::polynomial(cfg.explicit_go.schedule.p, cfg.campaign.ego.M, 1.0);
    bool all = true;
    for (bool ok : schedule_feasible(sched)) all = all && ok;
    std::snprintf(buf, sizeof buf, "polynomial schedule p = %.3g, M = %zu feasible at every step", sched.p, sched.M);
    report(all, buf);

    for (std::size_t d : {1u, 2u, 10u}) {
        const BenchmarkFunction fn(FunctionId::Rastrigin, d);
        const auto x = random_start(d, {-2.0, 2.0}, cfg.campaign.seed + d);
        for (double delta : {0.1, 0.5, 1.0}) {
            const SmoothingOracle oracle(fn, delta, SmoothingKernel::GaussianUnit, 1000000, cfg.campaign.seed);
            const double mc = oracle.smoothed_eval(x);
            const double cf = rastrigin_smoothed_closed_form(x, delta);
            std::snprintf(buf, sizeof buf, "closed form vs Monte Carlo, D = %zu, delta = %.1f: %.6g vs %.6g", d, delta,
                          cf, mc);
            report(std::abs(mc - cf) <= 0.01 * std::abs(cf), buf);
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_estimate_noise(const CommonFlags& f) {
    Config cfg = load(f);
    cfg.estimate_noise = true;
    const auto& is = cfg.campaign.implicit;
    const auto problem = make_synthetic_problem(cfg.function, cfg.campaign.dim, is.n, is.s, cfg.campaign.seed);
    const auto nm = noise_model_for(cfg, problem);
    std::printf("c_sq = %.6e\nk_sq = %.6e\n# %s\n", nm.c_sq, nm.k_sq, nm.estimated_from.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graduated optimization toolkit"};
    app.require_subcommand(1);
    CommonFlags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "INI config file");
        sub->add_option("--seed", flags.seed, "base seed");
        sub->add_option("--workers", flags.workers, "parallel workers (0 = all cores)");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--trace", flags.trace, "per-step trace CSV");
    };
    auto* bench = app.add_subcommand("bench", "run a benchmark campaign");
    auto* expl = app.add_subcommand("explicit", "single explicit graduated run");
    auto* impl = app.add_subcommand("implicit", "single implicit graduated run on a synthetic finite sum");
    auto* verify = app.add_subcommand("verify", "numeric checks of the smoothing and schedule results");
    auto* noise = app.add_subcommand("estimate-noise", "estimate C^2 and K^2 for a synthetic finite sum");
    for (auto* s : {bench, expl, impl, verify, noise}) add_common(s);
    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) return cmd_bench(flags);
        if (expl->parsed()) return cmd_explicit(flags);
        if (impl->parsed()) return cmd_implicit(flags);
        if (verify->parsed()) return cmd_verify(flags);
        if (noise->parsed()) return cmd_estimate_noise(flags);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
