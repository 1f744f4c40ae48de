#pragma once

// Noise schedules (delta_m) and their per-step decay rates gamma_m, plus the
// per-step feasibility bound that an admissible decay rate must satisfy.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "gradopt/errors.hpp"

namespace gradopt {

struct NoiseSchedule {
    enum class Kind { Polynomial, Geometric, Cosine, Exponential };

    Kind kind = Kind::Polynomial;
    double p = 1.0;       ///< Polynomial power, in (0, 1]
    double c = 0.95;      ///< Geometric ratio, in (0, 1)
    double rate = 0.05;   ///< Exponential rate, > 0
    std::size_t M = 1;    ///< number of smoothing levels
    double delta1 = 1.0;  ///< largest noise level

    static NoiseSchedule polynomial(double p, std::size_t M, double delta1) {
        return {Kind::Polynomial, p, 0.95, 0.05, M, delta1};
    }
    static NoiseSchedule geometric(double c, std::size_t M, double delta1) {
        return {Kind::Geometric, 1.0, c, 0.05, M, delta1};
    }
    static NoiseSchedule cosine(std::size_t M, double delta1) {
        return {Kind::Cosine, 1.0, 0.95, 0.05, M, delta1};
    }
    static NoiseSchedule exponential(double rate, std::size_t M, double delta1) {
        return {Kind::Exponential, 1.0, 0.95, rate, M, delta1};
    }

    void validate() const {
        detail::require(M >= 1, "NoiseSchedule: M must be >= 1");
        detail::require(delta1 > 0.0 && std::isfinite(delta1), "NoiseSchedule: delta1 must be positive");
        switch (kind) {
            case Kind::Polynomial: detail::require(p > 0.0 && p <= 1.0, "NoiseSchedule: p must lie in (0, 1]"); break;
            case Kind::Geometric: detail::require(c > 0.0 && c < 1.0, "NoiseSchedule: c must lie in (0, 1)"); break;
            case Kind::Exponential: detail::require(rate > 0.0, "NoiseSchedule: rate must be positive"); break;
            case Kind::Cosine: break;
        }
    }
};

inline std::string_view to_string(NoiseSchedule::Kind k) {
    switch (k) {
        case NoiseSchedule::Kind::Polynomial: return "polynomial";
        case NoiseSchedule::Kind::Geometric: return "geometric";
        case NoiseSchedule::Kind::Cosine: return "cosine";
        case NoiseSchedule::Kind::Exponential: return "exponential";
    }
    return "unknown";
}

inline NoiseSchedule::Kind parse_schedule_kind(std::string_view s) {
    if (s == "polynomial") return NoiseSchedule::Kind::Polynomial;
    if (s == "geometric") return NoiseSchedule::Kind::Geometric;
    if (s == "cosine") return NoiseSchedule::Kind::Cosine;
    if (s == "exponential") return NoiseSchedule::Kind::Exponential;
    throw InvalidArgument("unknown schedule kind '" + std::string(s) + "'");
}

namespace detail {

inline double cosine_profile(std::size_t m, std::size_t M) {
    // Level m (1-based) sits at (1 + cos(pi (m-1) / M)) / 2, strictly positive for m <= M.
    return 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(m - 1) / static_cast<double>(M)));
}

inline void require_step(std::size_t m, std::size_t M, const char* where) {
    if (m < 1 || m + 1 > M)
        throw InvalidArgument(std::string(where) + ": step " + std::to_string(m) + " outside [1, " +
                              std::to_string(M == 0 ? 0 : M - 1) + "]");
}

}  // namespace detail

/// Decay rate delta_{m+1} / delta_m for step m in [1, M-1].
inline double gamma(const NoiseSchedule& s, std::size_t m) {
    detail::require_step(m, s.M, "gamma");
    switch (s.kind) {
        case NoiseSchedule::Kind::Polynomial: {
            const double M = static_cast<double>(s.M), md = static_cast<double>(m);
            return std::pow(M - md, s.p) / std::pow(M - (md - 1.0), s.p);
        }
        case NoiseSchedule::Kind::Geometric: return s.c;
        case NoiseSchedule::Kind::Cosine:
            return detail::cosine_profile(m + 1, s.M) / detail::cosine_profile(m, s.M);
        case NoiseSchedule::Kind::Exponential: return std::exp(-s.rate);
    }
    return 1.0;
}

/// All decay rates gamma_1 ... gamma_{M-1}.
inline std::vector<double> gammas(const NoiseSchedule& s) {
    s.validate();
    std::vector<double> out;
    out.reserve(s.M > 0 ? s.M - 1 : 0);
    for (std::size_t m = 1; m < s.M; ++m) out.push_back(gamma(s, m));
    return out;
}

/// delta_1 ... delta_M with delta_{m+1} = gamma_m * delta_m.
inline std::vector<double> noise_sequence(const NoiseSchedule& s) {
    s.validate();
    std::vector<double> out(s.M);
    out[0] = s.delta1;
    for (std::size_t m = 1; m < s.M; ++m) out[m] = gamma(s, m) * out[m - 1];
    return out;
}

/// Lower bound an admissible decay rate must reach at step m of M.
inline double feasibility_lower_bound(std::size_t m, std::size_t M) {
    detail::require_step(m, M, "feasibility_lower_bound");
    const double a = static_cast<double>(m) - static_cast<double>(M) - std::numbers::sqrt2;
    return (std::sqrt(a * a - 1.0) - 1.0) / (-a);
}

/// Entry m-1 is true when bound(m, M) <= gamma_m < 1.
inline std::vector<bool> schedule_feasible(const NoiseSchedule& s) {
    s.validate();
    std::vector<bool> out;
    out.reserve(s.M > 0 ? s.M - 1 : 0);
    for (std::size_t m = 1; m < s.M; ++m) {
        const double g = gamma(s, m);
        out.push_back(feasibility_lower_bound(m, s.M) <= g && g < 1.0);
    }
    return out;
}

}  // namespace gradopt
