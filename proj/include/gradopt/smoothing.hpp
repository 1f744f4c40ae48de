#pragma once

// Monte-Carlo smoothing of an objective, f_delta(x) = E[f(x - delta*u)], the
// closed-form smoothed Rastrigin function and its strong-convexity diagnostics.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradopt/benchmarks.hpp"
#include "gradopt/errors.hpp"
#include "gradopt/random.hpp"

namespace gradopt {

/// Anything with a dimension, a value and a gradient.
template <class F>
concept DifferentiableObjective = requires(const F& f, std::span<const double> x, std::span<double> g) {
    { f.dim() } -> std::convertible_to<std::size_t>;
    { f.eval(x) } -> std::convertible_to<double>;
    f.gradient(x, g);
};

enum class SmoothingKernel {
    UniformBall,   ///< u uniform on the closed unit ball
    GaussianUnit,  ///< u with independent standard-normal coordinates
};

inline std::string_view to_string(SmoothingKernel k) {
    return k == SmoothingKernel::UniformBall ? "uniform_ball" : "gaussian_unit";
}

inline SmoothingKernel parse_kernel(std::string_view s) {
    if (s == "uniform_ball") return SmoothingKernel::UniformBall;
    if (s == "gaussian_unit") return SmoothingKernel::GaussianUnit;
    throw InvalidArgument("unknown smoothing kernel '" + std::string(s) + "'");
}

/// Draws one kernel sample into `u`.
inline void sample_kernel(SmoothingKernel kernel, KeyedRng& rng, std::span<double> u) {
    rng.fill_normal(u);
    if (kernel == SmoothingKernel::GaussianUnit) return;
    double norm = 0.0;
    for (double v : u) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return;
    const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(u.size()));
    for (double& v : u) v *= radius / norm;
}

/// Second moment E||u||^2 of a kernel in `dim` dimensions.
inline double kernel_second_moment(SmoothingKernel kernel, std::size_t dim) {
    const double d = static_cast<double>(dim);
    return kernel == SmoothingKernel::GaussianUnit ? d : d / (d + 2.0);
}

/// Per-call addressing of the Monte-Carlo draws. Two calls with the same
/// (oracle seed, stream) reuse the same kernel samples.
struct GradientRequest {
    std::size_t batch = 0;  ///< ignored by smoothing oracles
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
};

template <DifferentiableObjective F>
class SmoothingOracle {
public:
    SmoothingOracle(const F& objective, double delta, SmoothingKernel kernel = SmoothingKernel::GaussianUnit,
                    std::size_t n_samples = 1, std::uint64_t rng_seed = 0)
        : objective_(&objective), delta_(delta), kernel_(kernel), n_samples_(n_samples), seed_(rng_seed) {
        detail::require(n_samples >= 1, "SmoothingOracle: n_samples must be >= 1");
        detail::require(std::isfinite(delta), "SmoothingOracle: delta must be finite");
    }

    const F& objective() const noexcept { return *objective_; }
    std::size_t dim() const noexcept { return objective_->dim(); }
    double delta() const noexcept { return delta_; }
    SmoothingKernel kernel() const noexcept { return kernel_; }
    std::size_t n_samples() const noexcept { return n_samples_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Objective evaluations (or gradient evaluations) one call costs.
    std::size_t cost_per_call() const noexcept { return delta_ == 0.0 ? 1 : n_samples_; }

    double smoothed_eval(std::span<const double> x, std::uint64_t stream = 0) const {
        detail::require_dim(x.size(), dim(), "smoothed_eval");
        if (delta_ == 0.0) return objective_->eval(x);
        std::vector<double> u(x.size()), y(x.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < n_samples_; ++k) {
            perturb(x, stream, k, u, y);
            const double v = objective_->eval(y);
            if (!std::isfinite(v)) throw NumericOverflow("smoothed_eval: non-finite objective value", k);
            acc += v;
        }
        return acc / static_cast<double>(n_samples_);
    }

    void smoothed_grad(std::span<const double> x, std::span<double> out, std::uint64_t stream = 0) const {
        detail::require_dim(x.size(), dim(), "smoothed_grad");
        detail::require_dim(out.size(), dim(), "smoothed_grad");
        if (delta_ == 0.0) {
            objective_->gradient(x, out);
            return;
        }
        std::vector<double> u(x.size()), y(x.size()), g(x.size());
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t k = 0; k < n_samples_; ++k) {
            perturb(x, stream, k, u, y);
            objective_->gradient(y, g);
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!std::isfinite(g[i])) throw NumericOverflow("smoothed_grad: non-finite gradient", k);
                out[i] += g[i];
            }
        }
        const double inv = 1.0 / static_cast<double>(n_samples_);
        for (double& v : out) v *= inv;
    }

    std::vector<double> smoothed_grad(std::span<const double> x) const {
        std::vector<double> g(x.size());
        smoothed_grad(x, g);
        return g;
    }

    // Optimizer-facing interface.
    double value(std::span<const double> x) const { return objective_->eval(x); }

    void gradient(std::span<const double> x, const GradientRequest& req, std::span<double> out) const {
        smoothed_grad(x, out, hash_key(req.seed, req.step));
    }

    /// The kernel sample u_k used for (stream, k); exposed for pairing tests.
    void kernel_sample(std::uint64_t stream, std::size_t k, std::span<double> u) const {
        KeyedRng rng(seed_, stream, k);
        sample_kernel(kernel_, rng, u);
    }

private:
    void perturb(std::span<const double> x, std::uint64_t stream, std::size_t k, std::span<double> u,
                 std::span<double> y) const {
        kernel_sample(stream, k, u);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - delta_ * u[i];
    }

    const F* objective_;
    double delta_;
    SmoothingKernel kernel_;
    std::size_t n_samples_;
    std::uint64_t seed_;
};

template <DifferentiableObjective F>
double smoothed_eval(const SmoothingOracle<F>& oracle, std::span<const double> x) {
    return oracle.smoothed_eval(x);
}

template <DifferentiableObjective F>
std::vector<double> smoothed_grad(const SmoothingOracle<F>& oracle, std::span<const double> x) {
    return oracle.smoothed_grad(x);
}

// ---------------------------------------------------------------------------
// Closed forms.
//
// Under the Gaussian kernel each cosine term of Rastrigin's function is damped
// by exp(-2 pi^2 delta^2). The strong-convexity radius and threshold below use
// exp(-2 pi delta^2) instead (r(0) ~ 0.2507, delta* ~ 0.917); both factors are
// exposed.

inline double rastrigin_damping(double delta) {
    return std::exp(-2.0 * std::numbers::pi * std::numbers::pi * delta * delta);
}

inline double rastrigin_damping_two_pi(double delta) {
    return std::exp(-2.0 * std::numbers::pi * delta * delta);
}

/// ||x||^2 - 10 e^{-2 pi^2 delta^2} sum cos(2 pi x_i) + 10 D + delta^2 D.
inline double rastrigin_smoothed_closed_form(std::span<const double> x, double delta) {
    const double damp = rastrigin_damping(delta);
    double sq = 0.0, c = 0.0;
    for (double v : x) {
        sq += v * v;
        c += std::cos(2.0 * std::numbers::pi * v);
    }
    const double d = static_cast<double>(x.size());
    return sq - 10.0 * damp * c + 10.0 * d + delta * delta * d;
}

inline std::vector<double> rastrigin_smoothed_closed_form_grad(std::span<const double> x, double delta) {
    const double damp = rastrigin_damping(delta);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = 2.0 * x[i] + 20.0 * std::numbers::pi * damp * std::sin(2.0 * std::numbers::pi * x[i]);
    return g;
}

/// ||x||^2 + delta^2 E||u||^2.
inline double sphere_smoothed_closed_form(std::span<const double> x, double delta,
                                          SmoothingKernel kernel = SmoothingKernel::GaussianUnit) {
    return detail::sum_sq(x) + delta * delta * kernel_second_moment(kernel, x.size());
}

enum class DampingConvention { TwoPiSquared, TwoPi };

/// Second derivative of the smoothed one-dimensional Rastrigin function.
inline double rastrigin_1d_curvature(double x, double delta, DampingConvention conv = DampingConvention::TwoPi) {
    const double damp = conv == DampingConvention::TwoPi ? rastrigin_damping_two_pi(delta) : rastrigin_damping(delta);
    return 2.0 + 40.0 * std::numbers::pi * std::numbers::pi * damp * std::cos(2.0 * std::numbers::pi * x);
}

/// Smoothing level beyond which the smoothed 1-D Rastrigin is convex everywhere.
inline double delta_star() {
    return std::sqrt(std::log(20.0 * std::numbers::pi * std::numbers::pi) / (2.0 * std::numbers::pi));
}

/// Half-width of the strongly convex region around the origin; +inf past delta_star().
inline double strong_convexity_radius(double delta) {
    const double d = std::abs(delta);
    if (d > delta_star()) return std::numeric_limits<double>::infinity();
    const double arg = -1.0 / (20.0 * std::numbers::pi * std::numbers::pi * rastrigin_damping_two_pi(d));
    return std::acos(std::max(-1.0, std::min(1.0, arg))) / (2.0 * std::numbers::pi);
}

struct NicenessLevel {
    double delta = 0.0;
    double minimizer_norm = 0.0;     ///< ||x*_delta|| located numerically
    double minimizer_shift = 0.0;    ///< ||x*_delta - x*_next||
    double allowed_shift = 0.0;      ///< |delta| - |delta_next|
    bool nested = false;             ///< nested-minimizer condition
    std::optional<double> min_curvature;  ///< min of the 1-D curvature on |x| <= delta
    bool strongly_convex = false;    ///< curvature >= 2 on the neighborhood (or not checked)
    double convex_radius = 0.0;
};

struct NicenessReport {
    std::vector<NicenessLevel> levels;
    double sigma = 0.0;
    bool passed = false;
};

namespace detail {

// Minimizer of x^2 - 10*damp*cos(2 pi x) on the Rastrigin box: grid scan then Newton.
inline double smoothed_rastrigin_1d_minimizer(double delta) {
    const double damp = rastrigin_damping(delta);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto value = [&](double x) { return x * x - 10.0 * damp * std::cos(two_pi * x); };
    double best = -5.12, best_v = value(best);
    for (int i = 1; i <= 10240; ++i) {
        const double x = -5.12 + 1e-3 * i;
        const double v = value(x);
        if (v < best_v) {
            best_v = v;
            best = x;
        }
    }
    for (int it = 0; it < 50; ++it) {
        const double g1 = 2.0 * best + 10.0 * damp * two_pi * std::sin(two_pi * best);
        const double g2 = 2.0 + 10.0 * damp * two_pi * two_pi * std::cos(two_pi * best);
        if (g2 <= 0.0) break;
        const double step = g1 / g2;
        best -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return best;
}

}  // namespace detail

/// Numeric check that Rastrigin's function is "new sigma-nice" with sigma = 2
/// on a descending smoothing grid. The curvature condition is only evaluated
/// for levels <= 0.25; larger levels are checked for nested minimizers only.
inline NicenessReport verify_sigma_nice_rastrigin(std::span<const double> delta_grid, std::size_t dim) {
    detail::require(dim >= 1, "verify_sigma_nice_rastrigin: dimension must be positive");
    detail::require(!delta_grid.empty(), "verify_sigma_nice_rastrigin: empty grid");
    for (std::size_t i = 0; i + 1 < delta_grid.size(); ++i)
        if (std::abs(delta_grid[i]) < std::abs(delta_grid[i + 1]))
            throw InvalidArgument("verify_sigma_nice_rastrigin: grid must be sorted descending");

    constexpr double kCurvatureRegime = 0.25;
    constexpr double kTol = 1e-6;
    const double sqrt_d = std::sqrt(static_cast<double>(dim));

    NicenessReport report;
    report.passed = true;
    report.sigma = std::numeric_limits<double>::infinity();
    double next_min = 0.0;
    for (std::size_t m = 0; m < delta_grid.size(); ++m) {
        NicenessLevel lvl;
        lvl.delta = delta_grid[m];
        const double here = std::abs(delta_grid[m]);
        const double next = m + 1 < delta_grid.size() ? std::abs(delta_grid[m + 1]) : 0.0;
        const double x_here = detail::smoothed_rastrigin_1d_minimizer(here);
        next_min = detail::smoothed_rastrigin_1d_minimizer(next);
        lvl.minimizer_norm = sqrt_d * std::abs(x_here);
        lvl.minimizer_shift = sqrt_d * std::abs(x_here - next_min);
        lvl.allowed_shift = here - next;
        lvl.nested = lvl.minimizer_norm <= kTol && lvl.minimizer_shift <= lvl.allowed_shift + kTol;
        lvl.convex_radius = strong_convexity_radius(here);

        if (here <= kCurvatureRegime) {
            double lowest = std::numeric_limits<double>::infinity();
            constexpr int kPoints = 1000;
            for (int i = 0; i <= kPoints; ++i) {
                const double x = here * static_cast<double>(i) / kPoints;
                lowest = std::min(lowest, rastrigin_1d_curvature(x, here));
            }
            lvl.min_curvature = lowest;
            lvl.strongly_convex = lowest >= 2.0 - kTol;
            report.sigma = std::min(report.sigma, lowest);
        } else {
            lvl.strongly_convex = true;
        }
        report.passed = report.passed && lvl.nested && lvl.strongly_convex;
        report.levels.push_back(lvl);
    }
    if (!std::isfinite(report.sigma)) report.sigma = 0.0;
    return report;
}

}  // namespace gradopt
