#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gradopt/baselines.hpp"
#include "gradopt/campaign.hpp"
#include "gradopt/config.hpp"
#include "gradopt/synthetic.hpp"

using namespace gradopt;

namespace {

CampaignSpec small_spec() {
    CampaignSpec spec;
    spec.functions = {FunctionId::Sphere, FunctionId::Rastrigin};
    spec.dim = 5;
    spec.methods = {MethodSpec::ego_nice(), MethodSpec::ego_geo(), MethodSpec::ga(), MethodSpec::pso()};
    spec.runs = 3;
    spec.budget = 20000;
    spec.ego.samples = 10;
    spec.seed = 100;
    return spec;
}

std::string csv_of(const CampaignReport& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

}  // namespace

TEST(Synthetic, MeanGradientAndMinimizer) {
    const auto p = make_synthetic_problem(FunctionId::Sphere, 4, 300, 0.7, 8);
    std::vector<double> mean(4, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j) mean[j] += p.offset(i)[j] / 300.0;
    const std::vector<double> x{0.3, -1.0, 2.0, 0.0};
    std::vector<double> g(4);
    p.full_gradient(x, g);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(g[j], 2.0 * (x[j] + mean[j]), 1e-10);
    std::vector<double> xstar(4);
    for (std::size_t j = 0; j < 4; ++j) xstar[j] = -mean[j];
    p.full_gradient(xstar, g);
    for (double v : g) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Synthetic, ComponentVarianceMatchesGenerator) {
    const std::size_t D = 10;
    const double s = 0.1;
    const auto p = make_synthetic_problem(FunctionId::Sphere, D, 1000, s, 21);
    const std::vector<double> x(D, 0.2);
    std::vector<double> full(D), gi(D);
    p.full_gradient(x, full);
    double var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.component_gradient(i, x, gi);
        for (std::size_t j = 0; j < D; ++j) var += (gi[j] - full[j]) * (gi[j] - full[j]) / 1000.0;
    }
    EXPECT_NEAR(var, 4.0 * D * s * s, 0.1 * 4.0 * D * s * s);
}

TEST(Synthetic, ZeroSpreadMeansIdenticalComponents) {
    const auto p = make_synthetic_problem(FunctionId::Rastrigin, 3, 10, 0.0, 1);
    const std::vector<double> x{0.4, 0.1, -0.3};
    for (std::size_t i = 0; i < p.size(); ++i)
        EXPECT_EQ(p.component_value(i, x), eval(BenchmarkFunction(FunctionId::Rastrigin, 3), x));
    EXPECT_THROW(make_synthetic_problem(FunctionId::Sphere, 3, 1, 0.1, 0), InvalidArgument);
    EXPECT_THROW(make_synthetic_problem(FunctionId::Sphere, 3, 5, -0.1, 0), InvalidArgument);
}

TEST(Baselines, BudgetAndBox) {
    const BenchmarkFunction fn(FunctionId::Rastrigin, 8);
    const CountingObjective counted(fn);
    const auto ga = ga_run(counted, {-5.12, 5.12}, 5000, GaParams{}, 3);
    EXPECT_EQ(ga.evaluations, 5000u);
    EXPECT_EQ(counted.evaluations(), 5000u);
    for (double v : ga.best_x) EXPECT_LE(std::abs(v), 5.12);
    EXPECT_NEAR(ga.best_f, fn.eval(ga.best_x), 0.0);

    const CountingObjective counted2(fn);
    const auto pso = pso_run(counted2, {-5.12, 5.12}, 4321, PsoParams{}, 3);
    EXPECT_EQ(counted2.evaluations(), 4321u);
    for (double v : pso.best_x) EXPECT_LE(std::abs(v), 5.12);
    // Both should beat random search's typical value by a wide margin.
    EXPECT_LT(ga.best_f, 60.0);
    EXPECT_LT(pso.best_f, 60.0);
}

TEST(Baselines, SingleIndividualGaIsRandomSample) {
    const BenchmarkFunction fn(FunctionId::Sphere, 3);
    GaParams p;
    p.population = 1;
    p.mutation_rate = 0.0;
    const auto r = ga_run(fn, {-1.0, 1.0}, 1, p, 4);
    EXPECT_EQ(r.evaluations, 1u);
    EXPECT_THROW(ga_run(fn, {-1.0, 1.0}, 0, p, 4), InvalidArgument);
}

TEST(Table, Formatting) {
    EXPECT_EQ(format_sci(0.0226), "2.26E-02");
    EXPECT_EQ(format_sci(6.98e-7), "6.98E-07");
    CampaignReport rep;
    rep.functions = {"f"};
    rep.methods = {"a", "b"};
    rep.cells = {{"f", "a", 1.0}, {"f", "b", 0.5}};
    const auto t = emit_table(rep);
    EXPECT_NE(t.text.find("5.00E-01*"), std::string::npos);
    EXPECT_EQ(t.text.find("1.00E+00*"), std::string::npos);
    EXPECT_EQ(t.csv, "function,a,b\nf,1.00E+00,5.00E-01\n");

    CampaignReport empty;
    empty.functions = {"f"};
    const auto e = emit_table(empty);
    EXPECT_EQ(e.csv, "function\nf\n");
}

TEST(Campaign, BudgetFairness) {
    auto spec = small_spec();
    spec.workers = 2;
    const auto rep = run_campaign(spec);
    ASSERT_EQ(rep.runs.size(), 2u * 4u * 3u);
    for (const auto& r : rep.runs) {
        EXPECT_NEAR(static_cast<double>(r.evals), 20000.0, 200.0) << r.function << " " << r.method;
        EXPECT_TRUE(std::isfinite(r.best_f));
    }
    const auto* c = rep.cell("sphere", "ego_nice");
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->runs, 3u);
    EXPECT_LE(c->min, c->mean);
    EXPECT_LE(c->mean, c->max);
}

TEST(Campaign, DeterministicAcrossWorkerCounts) {
    auto spec = small_spec();
    spec.runs = 2;
    spec.workers = 1;
    const auto a = csv_of(run_campaign(spec));
    spec.workers = 3;
    const auto b = csv_of(run_campaign(spec));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.substr(0, a.find('\n')), "function,method,seed,best_f,evals,diverged,wall_ms");
    spec.seed = 101;
    EXPECT_NE(a, csv_of(run_campaign(spec)));
}

TEST(Campaign, MatchedSeedsAcrossMethods) {
    auto spec = small_spec();
    spec.runs = 2;
    const auto rep = run_campaign(spec);
    for (const auto& r : rep.runs) EXPECT_TRUE(r.seed == 100 || r.seed == 101);
}

TEST(Campaign, ImplicitMethod) {
    CampaignSpec spec;
    spec.functions = {FunctionId::Rastrigin};
    spec.dim = 4;
    spec.methods = {MethodSpec::implicit_go()};
    spec.runs = 2;
    spec.budget = 20000;
    spec.implicit.n = 100;
    spec.implicit.noise_model.c_sq = 1.0;
    spec.implicit.initial = {0.002, 2.0, 0.0};
    spec.implicit.strategy = {DecayStrategy::Kind::BatchOnly};
    const auto rep = run_campaign(spec);
    for (const auto& r : rep.runs) {
        EXPECT_LE(r.evals, 20000u);
        EXPECT_GE(r.evals, 19000u);
    }
}

TEST(Campaign, WritesFiles) {
    auto spec = small_spec();
    spec.runs = 1;
    spec.functions = {FunctionId::Sphere};
    const auto dir = std::filesystem::temp_directory_path() / "gradopt_harness_test";
    std::filesystem::remove_all(dir);
    spec.output_dir = dir.string();
    run_campaign(spec);
    EXPECT_TRUE(std::filesystem::exists(dir / "runs.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "table.txt"));
    std::ifstream js(dir / "summary.json");
    const auto j = nlohmann::json::parse(js);
    EXPECT_EQ(j["format"], kCampaignFormat);
    EXPECT_EQ(j["cells"].size(), 4u);
    std::filesystem::remove_all(dir);
}

TEST(Config, ParsesSections) {
    const auto cfg = parse_config_string(R"(
[campaign]
functions = rastrigin, sphere
methods = ego_nice, ego_geo, pso
runs = 7
budget = 30000
seed = 5
[schedule]
p = 0.8
c = 0.9
M = 15
[smoothing]
samples = 20
kernel = uniform_ball
[delta1]
rastrigin = 2.5
[go]
mode = implicit
optimizer = shb
strategy = hybrid
strategy_exponent = 0.5
beta = 0.3
b_max = 64
[noise_model]
c_sq = 12
k_sq = 3
)");
    const auto& c = cfg.campaign;
    ASSERT_EQ(c.functions.size(), 2u);
    EXPECT_EQ(c.functions[1], FunctionId::Sphere);
    ASSERT_EQ(c.methods.size(), 3u);
    EXPECT_DOUBLE_EQ(c.methods[0].param, 0.8);
    EXPECT_DOUBLE_EQ(c.methods[1].param, 0.9);
    EXPECT_EQ(c.runs, 7u);
    EXPECT_EQ(c.budget, 30000u);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.ego.M, 15u);
    EXPECT_EQ(c.ego.samples, 20u);
    EXPECT_EQ(c.ego.kernel, SmoothingKernel::UniformBall);
    EXPECT_DOUBLE_EQ(c.ego.delta1_for(FunctionId::Rastrigin), 2.5);
    EXPECT_DOUBLE_EQ(c.ego.delta1_for(FunctionId::Sphere), default_delta1(FunctionId::Sphere));
    EXPECT_EQ(cfg.go_mode, "implicit");
    EXPECT_EQ(cfg.implicit_go.optimizer, MomentumKind::SHB);
    EXPECT_EQ(cfg.implicit_go.strategy.kind, DecayStrategy::Kind::Hybrid);
    EXPECT_DOUBLE_EQ(cfg.implicit_go.initial.beta, 0.3);
    EXPECT_EQ(cfg.implicit_go.b_max, 64u);
    EXPECT_DOUBLE_EQ(cfg.implicit_go.noise_model.c_sq, 12.0);
    EXPECT_EQ(cfg.implicit_go.schedule.M, 15u);
}

TEST(Config, GoKeysOverrideSchedule) {
    const auto cfg = parse_config_string("[schedule]\nM = 10\n[go]\nM = 30\ndelta1 = 0.7\n[problem]\nfunction = ackley\n");
    EXPECT_EQ(cfg.campaign.ego.M, 30u);
    EXPECT_EQ(cfg.function, FunctionId::Ackley);
    EXPECT_DOUBLE_EQ(cfg.explicit_go.schedule.delta1, 0.7);
    EXPECT_EQ(cfg.explicit_go.schedule.M, 30u);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config_string("[campaign]\nfunctions = nosuch\n"), InvalidArgument);
    EXPECT_THROW(parse_config_string("[campaign]\nruns = many\n"), InvalidArgument);
    EXPECT_THROW(parse_config_string("[go]\nmode = both\n"), InvalidArgument);
    EXPECT_THROW(load_config("/nonexistent/gradopt.ini"), InvalidArgument);
}
