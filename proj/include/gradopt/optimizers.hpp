#pragma once

// Inner-loop optimizers: SGD/GD, stochastic heavy ball (SHB) and normalized
// stochastic heavy ball (NSHB), plus the minibatch oracle for finite sums.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradopt/benchmarks.hpp"
#include "gradopt/errors.hpp"
#include "gradopt/random.hpp"
#include "gradopt/smoothing.hpp"

namespace gradopt {

/// What an inner optimizer needs from its objective.
template <class O>
concept GradientOracle = requires(const O& o, std::span<const double> x, const GradientRequest& req,
                                  std::span<double> g) {
    { o.dim() } -> std::convertible_to<std::size_t>;
    { o.value(x) } -> std::convertible_to<double>;
    o.gradient(x, req, g);
};

/// f(x) = (1/n) sum_i f_i(x) with per-component gradients.
template <class P>
concept FiniteSum = requires(const P& p, std::size_t i, std::span<const double> x, std::span<double> g) {
    { p.size() } -> std::convertible_to<std::size_t>;
    { p.dim() } -> std::convertible_to<std::size_t>;
    { p.value(x) } -> std::convertible_to<double>;
    p.component_gradient(i, x, g);
    p.full_gradient(x, g);
};

/// Minibatch gradients of a finite sum: each step draws `batch` distinct
/// components, independently across steps. batch >= n gives the full gradient.
template <FiniteSum P>
class MinibatchOracle {
public:
    explicit MinibatchOracle(const P& problem) : problem_(&problem) {}

    std::size_t dim() const { return problem_->dim(); }
    double value(std::span<const double> x) const { return problem_->value(x); }

    void gradient(std::span<const double> x, const GradientRequest& req, std::span<double> out) const {
        const std::size_t n = problem_->size();
        const std::size_t b = req.batch == 0 ? n : req.batch;
        if (b >= n) {
            problem_->full_gradient(x, out);
            return;
        }
        const auto idx = sample_batch(n, b, KeyedRng(req.seed, req.step, 0x6d62));
        std::vector<double> g(out.size());
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i : idx) {
            problem_->component_gradient(i, x, g);
            for (std::size_t j = 0; j < g.size(); ++j) out[j] += g[j];
        }
        const double inv = 1.0 / static_cast<double>(b);
        for (double& v : out) v *= inv;
    }

    /// b distinct indices out of n (partial Fisher-Yates).
    static std::vector<std::size_t> sample_batch(std::size_t n, std::size_t b, KeyedRng rng) {
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t k = 0; k < b; ++k) {
            const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
            std::swap(pool[k], pool[j]);
        }
        pool.resize(b);
        return pool;
    }

private:
    const P* problem_;
};

enum class MomentumKind { SGD, SHB, NSHB };

inline std::string_view to_string(MomentumKind k) {
    switch (k) {
        case MomentumKind::SGD: return "sgd";
        case MomentumKind::SHB: return "shb";
        case MomentumKind::NSHB: return "nshb";
    }
    return "unknown";
}

inline MomentumKind parse_momentum_kind(std::string_view s) {
    if (s == "sgd" || s == "gd") return MomentumKind::SGD;
    if (s == "shb") return MomentumKind::SHB;
    if (s == "nshb") return MomentumKind::NSHB;
    throw InvalidArgument("unknown optimizer '" + std::string(s) + "'");
}

struct OptimizerState {
    std::vector<double> x;
    double eta = 0.0;
    std::size_t batch = 0;  ///< 0 means full batch
    double beta = 0.0;
    std::vector<double> buffer;  ///< m_t (SHB) or d_t (NSHB)
};

struct StepRecord {
    std::size_t step = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double eta = 0.0;
    std::size_t batch = 0;
    double beta = 0.0;
};

struct Trajectory {
    std::vector<double> x;
    double f_final = 0.0;
    std::size_t steps = 0;
    std::vector<StepRecord> records;  ///< filled only when RunOptions::record is set
};

struct RunOptions {
    bool record = false;
    std::uint64_t step_offset = 0;  ///< added to the step index of every gradient request
    double divergence_norm = 1e12;
    std::optional<Interval> box;  ///< project every iterate onto this box
};

namespace detail {

inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

template <GradientOracle O>
Trajectory momentum_run(MomentumKind kind, std::size_t T, std::span<const double> x0, const O& oracle,
                        std::size_t batch, double eta, double beta, std::uint64_t seed, const RunOptions& opt) {
    require(T >= 1, "optimizer: T must be >= 1");
    require(eta > 0.0 && std::isfinite(eta), "optimizer: learning rate must be positive");
    require(beta >= 0.0 && beta < 1.0, "optimizer: beta must lie in [0, 1)");
    require_dim(x0.size(), oracle.dim(), "optimizer");

    OptimizerState st{std::vector<double>(x0.begin(), x0.end()), eta, batch, beta,
                      std::vector<double>(x0.size(), 0.0)};
    std::vector<double> g(x0.size());
    Trajectory tr;
    if (opt.record) tr.records.reserve(T);

    auto diverge = [&](std::size_t step, const std::vector<double>& last) -> DivergenceError {
        double f = oracle.value(last);
        return DivergenceError(step, last, f);
    };

    std::vector<double> prev;
    for (std::size_t t = 0; t < T; ++t) {
        const GradientRequest req{batch, seed, opt.step_offset + t};
        try {
            oracle.gradient(st.x, req, g);
        } catch (const NumericOverflow&) {
            throw diverge(t, st.x);
        }
        if (opt.record) tr.records.push_back({t, oracle.value(st.x), norm(g), eta, batch, beta});

        prev = st.x;
        switch (kind) {
            case MomentumKind::SGD:
                for (std::size_t i = 0; i < g.size(); ++i) st.x[i] -= eta * g[i];
                break;
            case MomentumKind::SHB:
                for (std::size_t i = 0; i < g.size(); ++i) {
                    st.buffer[i] = g[i] + beta * st.buffer[i];
                    st.x[i] -= eta * st.buffer[i];
                }
                break;
            case MomentumKind::NSHB:
                for (std::size_t i = 0; i < g.size(); ++i) {
                    st.buffer[i] = (1.0 - beta) * g[i] + beta * st.buffer[i];
                    st.x[i] -= eta * st.buffer[i];
                }
                break;
        }
        if (opt.box)
            for (double& v : st.x) v = std::clamp(v, opt.box->lo, opt.box->hi);
        const double nx = norm(st.x);
        if (!std::isfinite(nx) || nx > opt.divergence_norm) throw diverge(t + 1, prev);
    }
    tr.x = std::move(st.x);
    tr.steps = T;
    tr.f_final = oracle.value(tr.x);
    if (!std::isfinite(tr.f_final)) throw diverge(T, prev);
    return tr;
}

}  // namespace detail

/// x_{t+1} = x_t - eta * g_t.
template <GradientOracle O>
Trajectory sgd_run(std::size_t T, std::span<const double> x0, const O& oracle, std::size_t batch, double eta,
                   std::uint64_t seed, const RunOptions& opt = {}) {
    return detail::momentum_run(MomentumKind::SGD, T, x0, oracle, batch, eta, 0.0, seed, opt);
}

/// m_t = g_t + beta m_{t-1};  x_{t+1} = x_t - eta m_t.
template <GradientOracle O>
Trajectory shb_run(std::size_t T, std::span<const double> x0, const O& oracle, std::size_t batch, double eta,
                   double beta, std::uint64_t seed, const RunOptions& opt = {}) {
    return detail::momentum_run(MomentumKind::SHB, T, x0, oracle, batch, eta, beta, seed, opt);
}

/// d_t = (1 - beta) g_t + beta d_{t-1};  x_{t+1} = x_t - eta d_t.
template <GradientOracle O>
Trajectory nshb_run(std::size_t T, std::span<const double> x0, const O& oracle, std::size_t batch, double eta,
                    double beta, std::uint64_t seed, const RunOptions& opt = {}) {
    return detail::momentum_run(MomentumKind::NSHB, T, x0, oracle, batch, eta, beta, seed, opt);
}

template <GradientOracle O>
Trajectory optimizer_run(MomentumKind kind, std::size_t T, std::span<const double> x0, const O& oracle,
                         std::size_t batch, double eta, double beta, std::uint64_t seed, const RunOptions& opt = {}) {
    return detail::momentum_run(kind, T, x0, oracle, batch, eta, kind == MomentumKind::SGD ? 0.0 : beta, seed, opt);
}

}  // namespace gradopt
