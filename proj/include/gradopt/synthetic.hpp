#pragma once

// Finite-sum test problems built from a benchmark: f_i(x) = f(x + eps_i) with
// per-component offsets drawn once from N(0, s^2 I). Minibatches of these give
// genuine gradient noise for the implicit methods.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gradopt/benchmarks.hpp"
#include "gradopt/errors.hpp"
#include "gradopt/random.hpp"

namespace gradopt {

class SyntheticFiniteSumProblem {
public:
    SyntheticFiniteSumProblem(BenchmarkFunction base, std::size_t n, double s, std::uint64_t seed)
        : base_(base), n_(n), s_(s), offsets_(n * base.dim()), shifted_(base.dim()) {
        detail::require(n >= 2, "SyntheticFiniteSumProblem: n must be >= 2");
        detail::require(s >= 0.0, "SyntheticFiniteSumProblem: s must be >= 0");
        KeyedRng rng(seed, 0x73796e);
        for (double& e : offsets_) e = s * rng.normal();
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return base_.dim(); }
    double noise_std() const noexcept { return s_; }
    const BenchmarkFunction& base() const noexcept { return base_; }

    std::span<const double> offset(std::size_t i) const { return {offsets_.data() + i * dim(), dim()}; }

    double component_value(std::size_t i, std::span<const double> x) const {
        shift(i, x);
        return base_.eval(shifted_);
    }

    void component_gradient(std::size_t i, std::span<const double> x, std::span<double> g) const {
        shift(i, x);
        base_.gradient(shifted_, g);
    }

    /// (1/n) sum_i f_i(x).
    double value(std::span<const double> x) const {
        detail::require_dim(x.size(), dim(), "SyntheticFiniteSumProblem::value");
        double acc = 0.0;
        for (std::size_t i = 0; i < n_; ++i) acc += component_value(i, x);
        return acc / static_cast<double>(n_);
    }

    void full_gradient(std::span<const double> x, std::span<double> g) const {
        detail::require_dim(x.size(), dim(), "SyntheticFiniteSumProblem::full_gradient");
        std::vector<double> gi(dim());
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            component_gradient(i, x, gi);
            for (std::size_t j = 0; j < gi.size(); ++j) g[j] += gi[j];
        }
        const double inv = 1.0 / static_cast<double>(n_);
        for (double& v : g) v *= inv;
    }

private:
    void shift(std::size_t i, std::span<const double> x) const {
        const auto e = offset(i);
        for (std::size_t j = 0; j < x.size(); ++j) shifted_[j] = x[j] + e[j];
    }

    BenchmarkFunction base_;
    std::size_t n_;
    double s_;
    std::vector<double> offsets_;
    mutable std::vector<double> shifted_;  // scratch; one problem per thread
};

inline SyntheticFiniteSumProblem make_synthetic_problem(FunctionId base, std::size_t dim, std::size_t n, double s,
                                                        std::uint64_t seed) {
    return SyntheticFiniteSumProblem(BenchmarkFunction(base, dim), n, s, seed);
}

}  // namespace gradopt
