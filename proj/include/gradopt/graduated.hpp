#pragma once

// Explicit graduated optimization (inner GD on Monte-Carlo smoothed objectives
// along a decreasing noise schedule) and implicit graduated optimization
// (hyperparameter schedules that shrink the intrinsic noise of SGD, SHB and
// NSHB by a prescribed ratio gamma_m per level).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gradopt/benchmarks.hpp"
#include "gradopt/errors.hpp"
#include "gradopt/optimizers.hpp"
#include "gradopt/random.hpp"
#include "gradopt/schedules.hpp"
#include "gradopt/smoothing.hpp"

namespace gradopt {

// ---------------------------------------------------------------------------
// Explicit graduated optimization

struct ExplicitGoConfig {
    NoiseSchedule schedule;
    std::size_t inner_T = 100;  ///< GD steps per smoothing level
    LearningRateRule lr_rule;   ///< eta as a function of delta_m
    SmoothingKernel kernel = SmoothingKernel::GaussianUnit;
    std::size_t samples = 1;  ///< Monte-Carlo samples per smoothed gradient
    /// Steps on the unsmoothed objective after the last level. It runs with
    /// lr_rule(delta_M) unless final_stage_eta is set.
    std::size_t final_stage_T = 0;
    std::optional<double> final_stage_eta;
    std::optional<Interval> box;  ///< projected GD onto the search box when set
    bool record = false;

    void validate() const {
        schedule.validate();
        detail::require(inner_T >= 1, "ExplicitGoConfig: inner_T must be >= 1");
        detail::require(samples >= 1, "ExplicitGoConfig: samples must be >= 1");
    }
};

struct ExplicitLevel {
    std::size_t level = 0;  ///< 1-based; M + 1 is the unsmoothed stage
    double delta = 0.0;
    double eta = 0.0;
    std::size_t steps = 0;
    double f_end = 0.0;  ///< raw objective at the end of the level
    bool diverged = false;
};

struct ExplicitGoResult {
    std::vector<double> x_final;
    double f_final = 0.0;
    std::vector<ExplicitLevel> levels;
    bool diverged = false;
    std::size_t evaluations = 0;
    std::vector<StepRecord> trace;
};

/// x_1 drawn uniformly from the search box.
inline std::vector<double> random_start(std::size_t dim, Interval range, std::uint64_t seed) {
    KeyedRng rng(seed, 0x696e6974);
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform(range.lo, range.hi);
    return x;
}

template <DifferentiableObjective F>
ExplicitGoResult explicit_go(const F& objective, std::span<const double> x1, const ExplicitGoConfig& cfg,
                             std::uint64_t seed) {
    cfg.validate();
    detail::require_dim(x1.size(), objective.dim(), "explicit_go");
    const std::vector<double> deltas = noise_sequence(cfg.schedule);
    const std::size_t M = deltas.size();

    ExplicitGoResult res;
    std::vector<double> x(x1.begin(), x1.end());
    double f_last = objective.eval(x);
    std::uint64_t offset = 0;

    auto run_level = [&](std::size_t level, double delta, double eta, std::size_t steps) -> bool {
        SmoothingOracle<F> oracle(objective, delta, cfg.kernel, cfg.samples, hash_key(seed, level));
        ExplicitLevel lvl{level, delta, eta, steps, f_last, false};
        RunOptions opt;
        opt.record = cfg.record;
        opt.step_offset = offset;
        opt.box = cfg.box;
        try {
            Trajectory tr = sgd_run(steps, x, oracle, 0, eta, seed, opt);
            x = std::move(tr.x);
            f_last = tr.f_final;
            lvl.f_end = f_last;
            res.evaluations += steps * oracle.cost_per_call();
            if (cfg.record) res.trace.insert(res.trace.end(), tr.records.begin(), tr.records.end());
        } catch (const DivergenceError& e) {
            res.evaluations += e.step() * oracle.cost_per_call();
            x = e.last_x();
            if (std::isfinite(e.last_f())) f_last = e.last_f();
            lvl.f_end = f_last;
            lvl.diverged = true;
            res.diverged = true;
        }
        offset += steps;
        res.levels.push_back(lvl);
        return !lvl.diverged;
    };

    bool ok = true;
    for (std::size_t m = 0; m < M && ok; ++m) ok = run_level(m + 1, deltas[m], cfg.lr_rule(deltas[m]), cfg.inner_T);
    if (ok && cfg.final_stage_T > 0) {
        const double eta = cfg.final_stage_eta.value_or(cfg.lr_rule(deltas.back()));
        run_level(M + 1, 0.0, eta, cfg.final_stage_T);
    }
    res.x_final = std::move(x);
    res.f_final = f_last;
    return res;
}

inline ExplicitGoResult explicit_go(const BenchmarkFunction& fn, const ExplicitGoConfig& cfg, std::uint64_t seed) {
    const auto x1 = random_start(fn.dim(), fn.metadata().range, seed);
    return explicit_go(fn, x1, cfg, seed);
}

// ---------------------------------------------------------------------------
// Noise levels of the SGD family

struct NoiseModel {
    double c_sq = 0.0;  ///< gradient-noise variance bound
    double k_sq = 0.0;  ///< squared full-gradient norm bound
    std::string estimated_from = "user";

    void validate() const {
        detail::require(c_sq >= 0.0 && k_sq >= 0.0, "NoiseModel: constants must be nonnegative");
    }
};

/// Momentum amplification beta (beta^2 - beta + 1) / (1 - beta)^2.
inline double beta_hat(double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("beta_hat: beta must lie in [0, 1)");
    const double om = 1.0 - beta;
    return beta * (beta * beta - beta + 1.0) / (om * om);
}

/// The unique beta in [0, 1) with beta_hat(beta) == target.
inline double invert_beta_hat(double target) {
    if (!(target >= 0.0) || !std::isfinite(target)) throw InvalidArgument("invert_beta_hat: target must be >= 0");
    if (target == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    // beta_hat is strictly increasing and unbounded on [0, 1): bisect to full precision.
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (beta_hat(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    if (hi >= 1.0) return lo;
    return std::abs(beta_hat(lo) - target) <= std::abs(beta_hat(hi) - target) ? lo : hi;
}

/// eta * C / sqrt(b), written as eta * sqrt(C^2 / b) so that the momentum
/// variants reproduce it bit for bit at beta = 0.
inline double sgd_noise_level(double eta, double b, const NoiseModel& nm) {
    detail::require(eta > 0.0 && b >= 1.0, "sgd_noise_level: need eta > 0 and b >= 1");
    return eta * std::sqrt(nm.c_sq / b);
}

/// eta * sqrt((1 + beta_hat) C^2 / b + beta_hat K^2).
inline double shb_noise_level(double eta, double b, double beta, const NoiseModel& nm) {
    detail::require(eta > 0.0 && b >= 1.0, "shb_noise_level: need eta > 0 and b >= 1");
    const double bh = beta_hat(beta);
    return eta * std::sqrt((1.0 + bh) * nm.c_sq / b + bh * nm.k_sq);
}

/// eta * sqrt(C^2 / ((1 - beta) b)).
inline double nshb_noise_level(double eta, double b, double beta, const NoiseModel& nm) {
    detail::require(eta > 0.0 && b >= 1.0, "nshb_noise_level: need eta > 0 and b >= 1");
    detail::require(beta >= 0.0 && beta < 1.0, "nshb_noise_level: beta must lie in [0, 1)");
    return eta * std::sqrt(nm.c_sq / ((1.0 - beta) * b));
}

struct Hyperparams {
    double eta = 0.1;
    double batch = 1.0;  ///< ideal (real-valued) batch size
    double beta = 0.0;
};

inline double noise_level(MomentumKind kind, const Hyperparams& hp, const NoiseModel& nm) {
    switch (kind) {
        case MomentumKind::SGD: return sgd_noise_level(hp.eta, hp.batch, nm);
        case MomentumKind::SHB: return shb_noise_level(hp.eta, hp.batch, hp.beta, nm);
        case MomentumKind::NSHB: return nshb_noise_level(hp.eta, hp.batch, hp.beta, nm);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Hyperparameter updates

/// Which of (learning rate, batch size, momentum) absorb the decay rate.
///  - LrAndBatch: batch grows by gamma^-exponent, the learning rate takes the rest.
///  - Hybrid: learning rate shrinks by gamma^exponent, the batch size takes the rest.
struct DecayStrategy {
    enum class Kind { Constant, LrOnly, BatchOnly, MomentumOnly, LrAndBatch, Hybrid };

    Kind kind = Kind::LrOnly;
    double exponent = 1.0;
};

inline std::string_view to_string(DecayStrategy::Kind k) {
    switch (k) {
        case DecayStrategy::Kind::Constant: return "constant";
        case DecayStrategy::Kind::LrOnly: return "lr_only";
        case DecayStrategy::Kind::BatchOnly: return "batch_only";
        case DecayStrategy::Kind::MomentumOnly: return "momentum_only";
        case DecayStrategy::Kind::LrAndBatch: return "lr_and_batch";
        case DecayStrategy::Kind::Hybrid: return "hybrid";
    }
    return "unknown";
}

inline DecayStrategy::Kind parse_strategy_kind(std::string_view s) {
    using K = DecayStrategy::Kind;
    for (K k : {K::Constant, K::LrOnly, K::BatchOnly, K::MomentumOnly, K::LrAndBatch, K::Hybrid})
        if (to_string(k) == s) return k;
    throw InvalidArgument("unknown decay strategy '" + std::string(s) + "'");
}

struct HyperparamUpdate {
    Hyperparams next;
    double kappa = 1.0;   ///< learning-rate factor
    double lambda = 1.0;  ///< batch-size factor
    double rho = 1.0;     ///< momentum factor (on beta_hat for SHB, on beta for NSHB)
    double ratio = 1.0;   ///< realized noise ratio before batch rounding
};

namespace detail {

// Batch factor lambda with noise(eta, lambda b, beta) / noise(eta, b, beta) == target.
inline double solve_batch_factor(MomentumKind kind, const Hyperparams& hp, double target, const NoiseModel& nm) {
    if (nm.c_sq == 0.0) throw Infeasible("batch size has no effect on the noise level when C^2 = 0");
    double lambda = 0.0;
    if (kind == MomentumKind::SHB) {
        const double bh = beta_hat(hp.beta);
        const double a = (1.0 + bh) * nm.c_sq / hp.batch;
        const double floor = bh * nm.k_sq;
        const double denom = target * target * (a + floor) - floor;
        if (!(denom > 0.0))
            throw Infeasible("batch increase cannot reach decay rate " + std::to_string(target) +
                             ": the momentum term beta_hat*K^2 is a noise floor");
        lambda = a / denom;
    } else {
        lambda = 1.0 / (target * target);
    }
    if (lambda < 1.0) throw Infeasible("required batch factor lambda = " + std::to_string(lambda) + " < 1");
    return lambda;
}

}  // namespace detail

inline HyperparamUpdate next_hyperparams(MomentumKind kind, DecayStrategy strategy, const Hyperparams& cur,
                                         double gamma_m, const NoiseModel& nm) {
    using K = DecayStrategy::Kind;
    if (!(gamma_m > 0.0 && gamma_m < 1.0)) throw InvalidArgument("next_hyperparams: gamma must lie in (0, 1)");
    nm.validate();
    HyperparamUpdate u;
    u.next = cur;

    switch (strategy.kind) {
        case K::Constant: break;
        case K::LrOnly: u.kappa = gamma_m; break;
        case K::BatchOnly: u.lambda = detail::solve_batch_factor(kind, cur, gamma_m, nm); break;
        case K::MomentumOnly: {
            if (kind == MomentumKind::SGD) throw InvalidArgument("momentum-only decay needs a momentum method");
            if (kind == MomentumKind::SHB) {
                const double bh = beta_hat(cur.beta);
                if (bh == 0.0) throw Infeasible("momentum-only decay: beta is already 0");
                const double c = nm.c_sq / cur.batch;
                const double total = c + bh * (c + nm.k_sq);
                u.rho = (gamma_m * gamma_m * total - c) / (bh * (c + nm.k_sq));
                if (!(u.rho > 0.0 && u.rho <= 1.0))
                    throw Infeasible("momentum-only decay needs rho in (0, 1], got " + std::to_string(u.rho));
                u.next.beta = invert_beta_hat(u.rho * bh);
            } else {
                // (1 - beta) / (1 - beta') = gamma^2
                const double beta_next = 1.0 - (1.0 - cur.beta) / (gamma_m * gamma_m);
                if (!(beta_next > 0.0) || cur.beta == 0.0)
                    throw Infeasible("momentum-only decay cannot reach decay rate " + std::to_string(gamma_m) +
                                     " from beta = " + std::to_string(cur.beta));
                u.rho = beta_next / cur.beta;
                u.next.beta = beta_next;
            }
            break;
        }
        case K::LrAndBatch: {
            u.lambda = std::pow(gamma_m, -strategy.exponent);
            if (u.lambda < 1.0) throw Infeasible("lr_and_batch: batch exponent must be >= 0");
            Hyperparams grown = cur;
            grown.batch = cur.batch * u.lambda;
            const double base = noise_level(kind, cur, nm);
            const double after = noise_level(kind, grown, nm);
            u.kappa = gamma_m * base / after;
            if (!(u.kappa > 0.0 && u.kappa <= 1.0))
                throw Infeasible("lr_and_batch: batch growth overshoots, kappa = " + std::to_string(u.kappa));
            break;
        }
        case K::Hybrid: {
            u.kappa = std::pow(gamma_m, strategy.exponent);
            if (!(u.kappa > 0.0 && u.kappa <= 1.0)) throw Infeasible("hybrid: lr exponent must be >= 0");
            const double rest = gamma_m / u.kappa;
            if (rest < 1.0) u.lambda = detail::solve_batch_factor(kind, cur, rest, nm);
            break;
        }
    }
    u.next.eta = cur.eta * u.kappa;
    u.next.batch = cur.batch * u.lambda;

    const double before = noise_level(kind, cur, nm);
    const double after = noise_level(kind, u.next, nm);
    u.ratio = before > 0.0 ? after / before : (strategy.kind == K::Constant ? 1.0 : gamma_m);
    const double want = strategy.kind == K::Constant ? 1.0 : gamma_m;
    if (before > 0.0 && std::abs(u.ratio - want) > 1e-9 * want)
        throw std::logic_error("next_hyperparams: realized ratio " + std::to_string(u.ratio) + " != " +
                               std::to_string(want));
    return u;
}

// ---------------------------------------------------------------------------
// Implicit graduated optimization

struct ImplicitGoConfig {
    MomentumKind optimizer = MomentumKind::SGD;
    NoiseSchedule schedule;  ///< only the decay rates are used; delta_1 follows from `initial`
    DecayStrategy strategy;
    Hyperparams initial;
    NoiseModel noise_model;
    std::size_t inner_T = 100;
    std::size_t b_max = std::numeric_limits<std::size_t>::max();
    bool record = false;

    void validate() const {
        detail::require(schedule.M >= 1, "ImplicitGoConfig: M must be >= 1");
        detail::require(initial.eta > 0.0, "ImplicitGoConfig: eta_1 must be positive");
        detail::require(initial.batch >= 1.0, "ImplicitGoConfig: b_1 must be >= 1");
        detail::require(initial.beta >= 0.0 && initial.beta < 1.0, "ImplicitGoConfig: beta_1 must lie in [0, 1)");
        detail::require(inner_T >= 1, "ImplicitGoConfig: inner_T must be >= 1");
        detail::require(b_max >= 1, "ImplicitGoConfig: b_max must be >= 1");
        noise_model.validate();
    }
};

struct ImplicitLevel {
    std::size_t level = 0;
    Hyperparams hp;              ///< ideal hyperparameters
    std::size_t batch = 1;       ///< batch size actually used
    double gamma = 1.0;          ///< decay applied after this level (1 for the last)
    double delta_ideal = 0.0;    ///< noise level with the real-valued batch
    double delta_realized = 0.0; ///< noise level with the rounded, capped batch
    double kappa = 1.0, lambda = 1.0, rho = 1.0;
    double f_end = 0.0;
    bool diverged = false;
};

struct ImplicitGoResult {
    std::vector<double> x_final;
    double f_final = 0.0;
    std::vector<ImplicitLevel> levels;
    bool diverged = false;
    std::size_t evaluations = 0;
    std::vector<StepRecord> trace;
};

inline std::size_t realized_batch(double ideal, std::size_t b_max) {
    const double up = std::ceil(ideal - 1e-9);
    const double capped = std::min(up, static_cast<double>(b_max));
    return static_cast<std::size_t>(std::max(1.0, capped));
}

/// The per-level hyperparameters. Independent of the iterates, so it can be
/// computed (and budgeted) before any optimization happens.
inline std::vector<ImplicitLevel> plan_implicit_schedule(const ImplicitGoConfig& cfg) {
    cfg.validate();
    NoiseSchedule sched = cfg.schedule;
    sched.delta1 = 1.0;
    const auto rates = gammas(sched);
    std::vector<ImplicitLevel> plan;
    Hyperparams hp = cfg.initial;
    for (std::size_t m = 1; m <= sched.M; ++m) {
        ImplicitLevel lvl;
        lvl.level = m;
        lvl.hp = hp;
        lvl.batch = realized_batch(hp.batch, cfg.b_max);
        lvl.delta_ideal = noise_level(cfg.optimizer, hp, cfg.noise_model);
        Hyperparams used = hp;
        used.batch = static_cast<double>(lvl.batch);
        lvl.delta_realized = noise_level(cfg.optimizer, used, cfg.noise_model);
        if (m < sched.M) {
            lvl.gamma = rates[m - 1];
            HyperparamUpdate u;
            try {
                u = next_hyperparams(cfg.optimizer, cfg.strategy, hp, lvl.gamma, cfg.noise_model);
            } catch (const Infeasible& e) {
                throw Infeasible("level " + std::to_string(m) + ": " + e.what());
            }
            lvl.kappa = u.kappa;
            lvl.lambda = u.lambda;
            lvl.rho = u.rho;
            hp = u.next;
        }
        plan.push_back(lvl);
    }
    return plan;
}

template <FiniteSum P>
ImplicitGoResult implicit_go(const P& problem, const ImplicitGoConfig& cfg, std::span<const double> x0,
                             std::uint64_t seed) {
    detail::require_dim(x0.size(), problem.dim(), "implicit_go");
    ImplicitGoResult res;
    res.levels = plan_implicit_schedule(cfg);
    MinibatchOracle<P> oracle(problem);
    std::vector<double> x(x0.begin(), x0.end());
    double f_last = problem.value(x);
    std::uint64_t offset = 0;
    for (ImplicitLevel& lvl : res.levels) {
        RunOptions opt;
        opt.record = cfg.record;
        opt.step_offset = offset;
        try {
            Trajectory tr = optimizer_run(cfg.optimizer, cfg.inner_T, x, oracle, lvl.batch, lvl.hp.eta, lvl.hp.beta,
                                          seed, opt);
            x = std::move(tr.x);
            f_last = tr.f_final;
            res.evaluations += cfg.inner_T * lvl.batch;
            if (cfg.record) res.trace.insert(res.trace.end(), tr.records.begin(), tr.records.end());
        } catch (const DivergenceError& e) {
            res.evaluations += e.step() * lvl.batch;
            x = e.last_x();
            if (std::isfinite(e.last_f())) f_last = e.last_f();
            lvl.diverged = true;
            res.diverged = true;
        }
        lvl.f_end = f_last;
        offset += cfg.inner_T;
        if (res.diverged) {
            res.levels.resize(lvl.level);
            break;
        }
    }
    res.x_final = std::move(x);
    res.f_final = f_last;
    return res;
}

/// C^2: mean over probe points of the single-sample gradient variance,
/// estimated from minibatches of size b_probe and rescaled by b_probe.
/// K^2: max over probe points of the squared full-gradient norm.
template <FiniteSum P>
NoiseModel estimate_noise_model(const P& problem, std::span<const std::vector<double>> probes, std::size_t b_probe,
                                std::size_t n_resamples, std::uint64_t seed) {
    detail::require(n_resamples >= 100, "estimate_noise_model: need at least 100 resamples");
    detail::require(!probes.empty(), "estimate_noise_model: no probe points");
    detail::require(b_probe >= 1 && b_probe <= problem.size(), "estimate_noise_model: invalid probe batch size");
    MinibatchOracle<P> oracle(problem);
    const std::size_t D = problem.dim();
    std::vector<double> full(D), g(D);
    NoiseModel nm;
    nm.estimated_from = "empirical (" + std::to_string(probes.size()) + " probes, b=" + std::to_string(b_probe) +
                        ", " + std::to_string(n_resamples) + " resamples)";
    double c_acc = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto& x = probes[p];
        detail::require_dim(x.size(), D, "estimate_noise_model");
        problem.full_gradient(x, full);
        double k = 0.0;
        for (double v : full) k += v * v;
        nm.k_sq = std::max(nm.k_sq, k);
        double var = 0.0;
        for (std::size_t r = 0; r < n_resamples; ++r) {
            oracle.gradient(x, GradientRequest{b_probe, hash_key(seed, p), r}, g);
            for (std::size_t j = 0; j < D; ++j) var += (g[j] - full[j]) * (g[j] - full[j]);
        }
        c_acc += var / static_cast<double>(n_resamples) * static_cast<double>(b_probe);
    }
    nm.c_sq = c_acc / static_cast<double>(probes.size());
    return nm;
}

}  // namespace gradopt
