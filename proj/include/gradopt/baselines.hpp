#pragma once

// Population-based comparison baselines: a real-coded genetic algorithm and
// global-best particle swarm optimization. Both stay inside the search box by
// clipping and stop exactly when the evaluation budget is spent.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gradopt/benchmarks.hpp"
#include "gradopt/errors.hpp"
#include "gradopt/random.hpp"

namespace gradopt {

struct BaselineResult {
    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

struct GaParams {
    std::size_t population = 100;
    std::size_t tournament = 3;
    double crossover_rate = 0.9;
    double mutation_sigma = 0.02;  ///< fraction of the range width
    double mutation_rate = -1.0;   ///< per gene; negative means 1/D
    std::size_t elites = 1;
};

struct PsoParams {
    std::size_t swarm = 40;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    double velocity_clamp = 0.2;  ///< fraction of the range width
};

namespace detail {

template <class F>
double evaluate(const F& fn, std::span<const double> x, BaselineResult& res) {
    const double v = fn.eval(x);
    ++res.evaluations;
    if (v < res.best_f) {
        res.best_f = v;
        res.best_x.assign(x.begin(), x.end());
    }
    return v;
}

}  // namespace detail

template <class F>
BaselineResult ga_run(const F& fn, Interval range, std::size_t budget, const GaParams& params, std::uint64_t seed) {
    const std::size_t P = params.population;
    const std::size_t D = fn.dim();
    detail::require(P >= 1, "ga_run: population must be >= 1");
    detail::require(budget >= P, "ga_run: budget must cover the initial population");
    detail::require(params.tournament >= 1, "ga_run: tournament size must be >= 1");
    const double width = range.width();
    const double mut_rate = params.mutation_rate < 0.0 ? 1.0 / static_cast<double>(D) : params.mutation_rate;
    const std::size_t elites = std::min(params.elites, P);

    KeyedRng rng(seed, 0x6761);
    BaselineResult res;
    std::vector<std::vector<double>> pop(P, std::vector<double>(D));
    std::vector<double> fit(P);
    for (std::size_t i = 0; i < P; ++i) {
        for (double& v : pop[i]) v = rng.uniform(range.lo, range.hi);
        fit[i] = detail::evaluate(fn, pop[i], res);
    }
    if (P == elites) return res;

    auto tournament = [&]() -> std::size_t {
        std::size_t best = static_cast<std::size_t>(rng.below(P));
        for (std::size_t k = 1; k < params.tournament; ++k) {
            const std::size_t c = static_cast<std::size_t>(rng.below(P));
            if (fit[c] < fit[best]) best = c;
        }
        return best;
    };

    std::vector<std::size_t> order(P);
    while (res.evaluations < budget) {
        for (std::size_t i = 0; i < P; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
        std::vector<std::vector<double>> next;
        std::vector<double> next_fit;
        next.reserve(P);
        for (std::size_t e = 0; e < elites; ++e) {
            next.push_back(pop[order[e]]);
            next_fit.push_back(fit[order[e]]);
        }
        while (next.size() < P && res.evaluations < budget) {
            const auto& a = pop[tournament()];
            const auto& b = pop[tournament()];
            std::vector<double> child = a;
            if (rng.uniform() < params.crossover_rate)
                for (std::size_t j = 0; j < D; ++j)
                    if (rng.uniform() < 0.5) child[j] = b[j];
            for (double& v : child) {
                if (rng.uniform() < mut_rate) v += params.mutation_sigma * width * rng.normal();
                v = std::clamp(v, range.lo, range.hi);
            }
            next_fit.push_back(detail::evaluate(fn, child, res));
            next.push_back(std::move(child));
        }
        // A partially filled generation keeps the best of the previous one.
        for (std::size_t k = elites; next.size() < P; ++k) {
            next.push_back(pop[order[k]]);
            next_fit.push_back(fit[order[k]]);
        }
        pop = std::move(next);
        fit = std::move(next_fit);
    }
    return res;
}

template <class F>
BaselineResult pso_run(const F& fn, Interval range, std::size_t budget, const PsoParams& params, std::uint64_t seed) {
    const std::size_t S = params.swarm;
    const std::size_t D = fn.dim();
    detail::require(S >= 1, "pso_run: swarm size must be >= 1");
    detail::require(budget >= S, "pso_run: budget must cover the initial swarm");
    const double vmax = params.velocity_clamp * range.width();

    KeyedRng rng(seed, 0x7073);
    BaselineResult res;
    std::vector<std::vector<double>> x(S, std::vector<double>(D)), v(S, std::vector<double>(D));
    std::vector<std::vector<double>> pbest(S);
    std::vector<double> pbest_f(S);
    for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = 0; j < D; ++j) {
            x[i][j] = rng.uniform(range.lo, range.hi);
            v[i][j] = rng.uniform(-vmax, vmax);
        }
        pbest[i] = x[i];
        pbest_f[i] = detail::evaluate(fn, x[i], res);
    }

    while (res.evaluations < budget) {
        for (std::size_t i = 0; i < S && res.evaluations < budget; ++i) {
            const std::vector<double> gbest = res.best_x;
            for (std::size_t j = 0; j < D; ++j) {
                const double r1 = rng.uniform(), r2 = rng.uniform();
                double vel = params.inertia * v[i][j] + params.cognitive * r1 * (pbest[i][j] - x[i][j]) +
                             params.social * r2 * (gbest[j] - x[i][j]);
                vel = std::clamp(vel, -vmax, vmax);
                v[i][j] = vel;
                x[i][j] = std::clamp(x[i][j] + vel, range.lo, range.hi);
            }
            const double f = detail::evaluate(fn, x[i], res);
            if (f < pbest_f[i]) {
                pbest_f[i] = f;
                pbest[i] = x[i];
            }
        }
    }
    return res;
}

}  // namespace gradopt
