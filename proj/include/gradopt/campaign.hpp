#pragma once

// Seeded benchmark campaigns: every (function, method, seed) job runs under the
// same evaluation budget, jobs execute on a small thread pool, and results are
// written as CSV, JSON and a fixed-width comparison table.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "gradopt/baselines.hpp"
#include "gradopt/benchmarks.hpp"
#include "gradopt/graduated.hpp"
#include "gradopt/synthetic.hpp"

namespace gradopt {

inline constexpr const char* kCampaignFormat = "gradopt-campaign/1";

/// Counts every function value and gradient call made through it.
template <DifferentiableObjective F>
class CountingObjective {
public:
    explicit CountingObjective(const F& inner) : inner_(&inner) {}

    std::size_t dim() const { return inner_->dim(); }
    double eval(std::span<const double> x) const {
        ++count_;
        return inner_->eval(x);
    }
    void gradient(std::span<const double> x, std::span<double> g) const {
        ++count_;
        inner_->gradient(x, g);
    }
    std::size_t evaluations() const noexcept { return count_; }

private:
    const F* inner_;
    mutable std::size_t count_ = 0;
};

/// Largest smoothing level for explicit GO per benchmark at D = 50 with the
/// metadata learning-rate rules, 100 samples and M = 20. Each value minimized
/// the polynomial-schedule mean on a pilot scan over {half width, 30, 10, 3, 1,
/// 0.3, 0.1, 0.03}. Half the range width only suits a few of them: elsewhere the
/// learning rate grows with delta and GD leaves the basin or diverges.
inline double default_delta1(FunctionId id) {
    switch (id) {
        case FunctionId::Ackley: return 1.0;
        case FunctionId::Alpine1: return 1.0;
        case FunctionId::DropWave: return 3.0;
        case FunctionId::Ellipsoid: return 3.0;
        case FunctionId::Griewank: return 0.3;
        case FunctionId::HappyCat: return 0.3;
        case FunctionId::HGBat: return 0.3;
        case FunctionId::ModifiedRidge: return 100.0;
        case FunctionId::Rastrigin: return 5.12;
        case FunctionId::Rosenbrock: return 1.0;
        case FunctionId::RotatedHyperEllipsoid: return 3.0;
        case FunctionId::Salomon: return 1.0;
        case FunctionId::SchafferF7: return 10.0;
        case FunctionId::Schwefel: return 1.0;
        case FunctionId::Schwefel221: return 1.0;
        case FunctionId::Sphere: return 3.0;
    }
    return 1.0;
}

struct EgoSettings {
    std::size_t M = 20;
    std::size_t samples = 100;
    SmoothingKernel kernel = SmoothingKernel::GaussianUnit;
    bool project = true;  ///< keep iterates inside the search box
    std::map<FunctionId, double> delta1;  ///< overrides default_delta1

    double delta1_for(FunctionId id) const {
        const auto it = delta1.find(id);
        return it == delta1.end() ? default_delta1(id) : it->second;
    }
};

struct ImplicitSettings {
    MomentumKind optimizer = MomentumKind::SGD;
    DecayStrategy strategy;
    Hyperparams initial{0.01, 1.0, 0.0};
    NoiseModel noise_model;
    std::size_t M = 10;
    double p = 1.0;
    std::size_t b_max = 1000;
    std::size_t n = 1000;  ///< synthetic components
    double s = 0.1;        ///< synthetic offset std
};

struct MethodSpec {
    enum class Kind { EgoNice, EgoGeo, Ga, Pso, ImplicitGo };

    Kind kind = Kind::EgoNice;
    double param = 1.0;  ///< p for EgoNice, c for EgoGeo
    std::string name;    ///< label in reports; defaults to label()

    static MethodSpec ego_nice(double p = 1.0) { return {Kind::EgoNice, p, ""}; }
    static MethodSpec ego_geo(double c = 0.95) { return {Kind::EgoGeo, c, ""}; }
    static MethodSpec ga() { return {Kind::Ga, 0.0, ""}; }
    static MethodSpec pso() { return {Kind::Pso, 0.0, ""}; }
    static MethodSpec implicit_go() { return {Kind::ImplicitGo, 0.0, ""}; }

    std::string label() const {
        if (!name.empty()) return name;
        switch (kind) {
            case Kind::EgoNice: return "ego_nice";
            case Kind::EgoGeo: return "ego_geo";
            case Kind::Ga: return "ga";
            case Kind::Pso: return "pso";
            case Kind::ImplicitGo: return "implicit_go";
        }
        return "unknown";
    }
};

inline MethodSpec parse_method(std::string_view s) {
    if (s == "ego_nice") return MethodSpec::ego_nice();
    if (s == "ego_geo") return MethodSpec::ego_geo();
    if (s == "ga") return MethodSpec::ga();
    if (s == "pso") return MethodSpec::pso();
    if (s == "implicit_go") return MethodSpec::implicit_go();
    throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

struct CampaignSpec {
    std::vector<FunctionId> functions;
    std::size_t dim = 50;
    std::vector<MethodSpec> methods;
    std::size_t runs = 50;
    std::size_t budget = 200000;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  ///< 0 = hardware concurrency
    std::string output_dir;   ///< empty = do not write files
    bool timing = false;      ///< record wall time (makes the CSV run-dependent)
    EgoSettings ego;
    ImplicitSettings implicit;
    GaParams ga;
    PsoParams pso;

    void validate() const {
        detail::require(runs >= 1, "CampaignSpec: runs must be >= 1");
        detail::require(dim >= 1, "CampaignSpec: dim must be >= 1");
        detail::require(budget >= 1, "CampaignSpec: budget must be >= 1");
        detail::require(ego.M >= 1 && ego.samples >= 1, "CampaignSpec: invalid EGO settings");
        detail::require(budget >= (ego.M + 1) * ego.samples, "CampaignSpec: budget too small for EGO levels");
    }
};

struct RunRecord {
    std::string function;
    std::string method;
    std::uint64_t seed = 0;
    double best_f = 0.0;
    std::size_t evals = 0;
    bool diverged = false;
    double wall_ms = 0.0;
};

struct CellSummary {
    std::string function;
    std::string method;
    double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
    std::size_t runs = 0;
    std::size_t divergences = 0;
    double wall_ms = 0.0;
};

struct CampaignReport {
    std::string format = kCampaignFormat;
    std::vector<std::string> functions;
    std::vector<std::string> methods;
    std::vector<RunRecord> runs;  ///< sorted by (function, method, seed)
    std::vector<CellSummary> cells;

    const CellSummary* cell(std::string_view function, std::string_view method) const {
        for (const auto& c : cells)
            if (c.function == function && c.method == method) return &c;
        return nullptr;
    }
};

namespace detail {

inline double min_level_f(const std::vector<ExplicitLevel>& levels, double fallback) {
    double best = fallback;
    for (const auto& l : levels)
        if (std::isfinite(l.f_end)) best = std::min(best, l.f_end);
    return best;
}

inline RunRecord run_job(const CampaignSpec& spec, FunctionId id, const MethodSpec& method, std::uint64_t seed,
                         const SyntheticFiniteSumProblem* synthetic) {
    const BenchmarkFunction fn(id, spec.dim);
    const FunctionMetadata md = fn.metadata();
    RunRecord rec{std::string(to_string(id)), method.label(), seed, 0.0, 0, false, 0.0};
    const auto t0 = std::chrono::steady_clock::now();

    switch (method.kind) {
        case MethodSpec::Kind::EgoNice:
        case MethodSpec::Kind::EgoGeo: {
            const double d1 = spec.ego.delta1_for(id);
            ExplicitGoConfig cfg;
            cfg.schedule = method.kind == MethodSpec::Kind::EgoNice ? NoiseSchedule::polynomial(method.param, spec.ego.M, d1)
                                                                    : NoiseSchedule::geometric(method.param, spec.ego.M, d1);
            cfg.samples = spec.ego.samples;
            cfg.kernel = spec.ego.kernel;
            cfg.inner_T = spec.budget / (spec.ego.M + 1) / spec.ego.samples;
            cfg.final_stage_T = spec.budget / (spec.ego.M + 1);
            cfg.lr_rule = md.lr_rule;
            if (spec.ego.project) cfg.box = md.range;
            CountingObjective<BenchmarkFunction> counted(fn);
            const auto x1 = random_start(fn.dim(), md.range, seed);
            const auto res = explicit_go(counted, x1, cfg, seed);
            rec.best_f = min_level_f(res.levels, res.f_final);
            rec.evals = counted.evaluations();
            rec.diverged = res.diverged;
            break;
        }
        case MethodSpec::Kind::Ga: {
            CountingObjective<BenchmarkFunction> counted(fn);
            const auto res = ga_run(counted, md.range, spec.budget, spec.ga, seed);
            rec.best_f = res.best_f;
            rec.evals = counted.evaluations();
            break;
        }
        case MethodSpec::Kind::Pso: {
            CountingObjective<BenchmarkFunction> counted(fn);
            const auto res = pso_run(counted, md.range, spec.budget, spec.pso, seed);
            rec.best_f = res.best_f;
            rec.evals = counted.evaluations();
            break;
        }
        case MethodSpec::Kind::ImplicitGo: {
            const ImplicitSettings& is = spec.implicit;
            ImplicitGoConfig cfg;
            cfg.optimizer = is.optimizer;
            cfg.schedule = NoiseSchedule::polynomial(is.p, is.M, 1.0);
            cfg.strategy = is.strategy;
            cfg.initial = is.initial;
            cfg.noise_model = is.noise_model;
            cfg.b_max = is.b_max;
            std::size_t per_step = 0;
            for (const auto& lvl : plan_implicit_schedule(cfg)) per_step += lvl.batch;
            cfg.inner_T = std::max<std::size_t>(1, spec.budget / per_step);
            const auto x0 = random_start(fn.dim(), md.range, seed);
            const auto res = implicit_go(*synthetic, cfg, x0, seed);
            double best = res.f_final;
            for (const auto& l : res.levels)
                if (std::isfinite(l.f_end)) best = std::min(best, l.f_end);
            rec.best_f = best;
            rec.evals = res.evaluations;
            rec.diverged = res.diverged;
            break;
        }
    }
    if (spec.timing)
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

inline CellSummary summarize(const std::string& function, const std::string& method,
                             const std::vector<const RunRecord*>& runs) {
    CellSummary c{function, method};
    c.runs = runs.size();
    if (runs.empty()) return c;
    c.min = std::numeric_limits<double>::infinity();
    c.max = -std::numeric_limits<double>::infinity();
    for (const RunRecord* r : runs) {
        c.mean += r->best_f;
        c.min = std::min(c.min, r->best_f);
        c.max = std::max(c.max, r->best_f);
        c.divergences += r->diverged ? 1 : 0;
        c.wall_ms += r->wall_ms;
    }
    c.mean /= static_cast<double>(runs.size());
    double ss = 0.0;
    for (const RunRecord* r : runs) ss += (r->best_f - c.mean) * (r->best_f - c.mean);
    c.stddev = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;
    return c;
}

}  // namespace detail

inline void write_csv(const CampaignReport& report, std::ostream& os) {
    os << "function,method,seed,best_f,evals,diverged,wall_ms\n";
    char buf[64];
    for (const auto& r : report.runs) {
        std::snprintf(buf, sizeof buf, "%.17g", r.best_f);
        os << r.function << ',' << r.method << ',' << r.seed << ',' << buf << ',' << r.evals << ','
           << (r.diverged ? 1 : 0) << ',';
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        os << buf << '\n';
    }
}

inline nlohmann::ordered_json to_json(const CampaignReport& report) {
    nlohmann::ordered_json j;
    j["format"] = report.format;
    j["functions"] = report.functions;
    j["methods"] = report.methods;
    auto& cells = j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"function", c.function},
                         {"method", c.method},
                         {"runs", c.runs},
                         {"mean", c.mean},
                         {"std", c.stddev},
                         {"min", c.min},
                         {"max", c.max},
                         {"divergences", c.divergences},
                         {"wall_ms", c.wall_ms}});
    }
    return j;
}

/// Scientific notation with 3 significant digits, e.g. 2.26E-02.
inline std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2E", v);
    return buf;
}

struct RenderedTable {
    std::string text;
    std::string csv;
};

/// Rows are functions, columns methods; '*' marks the smallest mean in each row.
inline RenderedTable emit_table(const CampaignReport& report) {
    std::ostringstream text, csv;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-24s", "function");
    text << buf;
    csv << "function";
    for (const auto& m : report.methods) {
        std::snprintf(buf, sizeof buf, " %12s ", m.c_str());
        text << buf;
        csv << ',' << m;
    }
    text << '\n';
    csv << '\n';
    for (const auto& f : report.functions) {
        std::vector<double> means;
        for (const auto& m : report.methods) {
            const CellSummary* c = report.cell(f, m);
            means.push_back(c ? c->mean : std::numeric_limits<double>::quiet_NaN());
        }
        std::size_t winner = means.size();
        for (std::size_t k = 0; k < means.size(); ++k)
            if (!std::isnan(means[k]) && (winner == means.size() || means[k] < means[winner])) winner = k;
        std::snprintf(buf, sizeof buf, "%-24s", f.c_str());
        text << buf;
        csv << f;
        for (std::size_t k = 0; k < means.size(); ++k) {
            const std::string v = format_sci(means[k]);
            std::snprintf(buf, sizeof buf, " %12s%c", v.c_str(), k == winner ? '*' : ' ');
            text << buf;
            csv << ',' << v;
        }
        text << '\n';
        csv << '\n';
    }
    return {text.str(), csv.str()};
}

/// Writes runs.csv, summary.json and table.txt into dir.
inline void save_report(const CampaignReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        return os;
    };
    {
        auto os = open("runs.csv");
        write_csv(report, os);
    }
    {
        auto os = open("summary.json");
        os << to_json(report).dump(2) << '\n';
    }
    {
        auto os = open("table.txt");
        os << emit_table(report).text;
    }
}

inline CampaignReport run_campaign(const CampaignSpec& spec) {
    spec.validate();
    struct Job {
        std::size_t f, m, r;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < spec.functions.size(); ++f)
        for (std::size_t m = 0; m < spec.methods.size(); ++m)
            for (std::size_t r = 0; r < spec.runs; ++r) jobs.push_back({f, m, r});

    // Synthetic problems hold a scratch buffer, so each worker builds its own.
    bool need_synthetic = false;
    for (const auto& m : spec.methods) need_synthetic |= m.kind == MethodSpec::Kind::ImplicitGo;

    std::vector<RunRecord> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        std::map<std::size_t, SyntheticFiniteSumProblem> local;
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            const Job& job = jobs[k];
            const FunctionId id = spec.functions[job.f];
            const SyntheticFiniteSumProblem* synth = nullptr;
            if (need_synthetic) {
                auto it = local.find(job.f);
                if (it == local.end())
                    it = local.emplace(job.f, make_synthetic_problem(id, spec.dim, spec.implicit.n, spec.implicit.s,
                                                                     spec.seed))
                             .first;
                synth = &it->second;
            }
            try {
                results[k] = detail::run_job(spec, id, spec.methods[job.m], spec.seed + job.r, synth);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(jobs.size());
                return;
            }
        }
    };
    std::size_t n_workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min(n_workers, std::max<std::size_t>(1, jobs.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    CampaignReport report;
    for (FunctionId id : spec.functions) report.functions.emplace_back(to_string(id));
    for (const auto& m : spec.methods) report.methods.push_back(m.label());
    // jobs were generated in (function, method, seed) order, so results already are
    report.runs = std::move(results);
    for (std::size_t f = 0; f < spec.functions.size(); ++f)
        for (std::size_t m = 0; m < spec.methods.size(); ++m) {
            std::vector<const RunRecord*> cell;
            for (std::size_t r = 0; r < spec.runs; ++r)
                cell.push_back(&report.runs[(f * spec.methods.size() + m) * spec.runs + r]);
            report.cells.push_back(detail::summarize(report.functions[f], report.methods[m], cell));
        }
    if (!spec.output_dir.empty()) save_report(report, spec.output_dir);
    return report;
}

}  // namespace gradopt
