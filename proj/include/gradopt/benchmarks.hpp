#pragma once

// The sixteen global-optimization test functions, with analytic gradients,
// search boxes, known optima and the per-function inner learning-rate rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradopt/errors.hpp"

namespace gradopt {

enum class FunctionId {
    Ackley,
    Alpine1,
    DropWave,
    Ellipsoid,
    Griewank,
    HappyCat,
    HGBat,
    ModifiedRidge,
    Rastrigin,
    Rosenbrock,
    RotatedHyperEllipsoid,
    Salomon,
    SchafferF7,
    Schwefel,
    Schwefel221,
    Sphere,
};

inline constexpr std::array<FunctionId, 16> kAllFunctions = {
    FunctionId::Ackley,     FunctionId::Alpine1,       FunctionId::DropWave,
    FunctionId::Ellipsoid,  FunctionId::Griewank,      FunctionId::HappyCat,
    FunctionId::HGBat,      FunctionId::ModifiedRidge, FunctionId::Rastrigin,
    FunctionId::Rosenbrock, FunctionId::RotatedHyperEllipsoid,
    FunctionId::Salomon,    FunctionId::SchafferF7,    FunctionId::Schwefel,
    FunctionId::Schwefel221, FunctionId::Sphere,
};

inline std::string_view to_string(FunctionId id) {
    switch (id) {
        case FunctionId::Ackley: return "ackley";
        case FunctionId::Alpine1: return "alpine1";
        case FunctionId::DropWave: return "drop_wave";
        case FunctionId::Ellipsoid: return "ellipsoid";
        case FunctionId::Griewank: return "griewank";
        case FunctionId::HappyCat: return "happy_cat";
        case FunctionId::HGBat: return "hgbat";
        case FunctionId::ModifiedRidge: return "modified_ridge";
        case FunctionId::Rastrigin: return "rastrigin";
        case FunctionId::Rosenbrock: return "rosenbrock";
        case FunctionId::RotatedHyperEllipsoid: return "rotated_hyper_ellipsoid";
        case FunctionId::Salomon: return "salomon";
        case FunctionId::SchafferF7: return "schaffer_f7";
        case FunctionId::Schwefel: return "schwefel";
        case FunctionId::Schwefel221: return "schwefel_221";
        case FunctionId::Sphere: return "sphere";
    }
    return "unknown";
}

inline FunctionId parse_function_id(std::string_view name) {
    for (FunctionId id : kAllFunctions)
        if (to_string(id) == name) return id;
    throw InvalidArgument("unknown benchmark function '" + std::string(name) + "'");
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// Inner learning rate as a function of the current smoothing level delta:
/// either scale*delta or (scale*delta)^delta.
struct LearningRateRule {
    enum class Form { ScaledDelta, ScaledDeltaPowDelta };

    Form form = Form::ScaledDelta;
    double scale = 1.0;

    static constexpr LearningRateRule scaled(double s) { return {Form::ScaledDelta, s}; }
    static constexpr LearningRateRule scaled_pow(double s) { return {Form::ScaledDeltaPowDelta, s}; }

    double operator()(double delta) const {
        const double d = std::abs(delta);
        return form == Form::ScaledDelta ? scale * d : std::pow(scale * d, d);
    }
};

struct FunctionMetadata {
    Interval range;
    std::vector<double> optimum_point;
    double optimum_value = 0.0;
    LearningRateRule lr_rule;
    bool finite_difference_gradient = false;  ///< all current gradients are analytic
};

namespace detail {

inline double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

inline double sum_sq(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double sum(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

// Maximizer of x*sin(sqrt(x)) on the Schwefel search box, by golden-section
// search on the bracket that contains the global peak.
inline double schwefel_coordinate_optimum() {
    static const double value = [] {
        auto h = [](double t) { return -t * std::sin(std::sqrt(t)); };
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = 400.0, b = 440.0;
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = h(c), fd = h(d);
        for (int i = 0; i < 200 && b - a > 1e-13; ++i) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = h(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = h(d);
            }
        }
        return 0.5 * (a + b);
    }();
    return value;
}

}  // namespace detail

class BenchmarkFunction {
public:
    BenchmarkFunction(FunctionId id, std::size_t dim) : id_(id), dim_(dim) {
        detail::require(dim >= 1, "benchmark dimension must be positive");
        if ((id == FunctionId::SchafferF7 || id == FunctionId::Rosenbrock) && dim < 2)
            throw InvalidArgument(std::string(to_string(id)) + " requires dimension >= 2");
    }

    FunctionId id() const noexcept { return id_; }
    std::size_t dim() const noexcept { return dim_; }
    std::string_view name() const noexcept { return to_string(id_); }

    double eval(std::span<const double> x) const {
        detail::require_dim(x.size(), dim_, "BenchmarkFunction::eval");
        return eval_unchecked(x);
    }

    void gradient(std::span<const double> x, std::span<double> g) const {
        detail::require_dim(x.size(), dim_, "BenchmarkFunction::gradient");
        detail::require_dim(g.size(), dim_, "BenchmarkFunction::gradient");
        gradient_unchecked(x, g);
    }

    std::vector<double> grad(std::span<const double> x) const {
        std::vector<double> g(dim_);
        gradient(x, g);
        return g;
    }

    FunctionMetadata metadata() const { return metadata_for(id_, dim_); }

    static FunctionMetadata metadata_for(FunctionId id, std::size_t dim);

    double eval_unchecked(std::span<const double> x) const;
    void gradient_unchecked(std::span<const double> x, std::span<double> g) const;

private:
    FunctionId id_;
    std::size_t dim_;
};

inline double eval(const BenchmarkFunction& fn, std::span<const double> x) { return fn.eval(x); }

inline std::vector<double> grad(const BenchmarkFunction& fn, std::span<const double> x) {
    return fn.grad(x);
}

inline FunctionMetadata metadata(FunctionId id, std::size_t dim) {
    return BenchmarkFunction::metadata_for(id, dim);
}

inline FunctionMetadata BenchmarkFunction::metadata_for(FunctionId id, std::size_t dim) {
    using R = LearningRateRule;
    FunctionMetadata m;
    m.optimum_point.assign(dim, 0.0);
    m.optimum_value = 0.0;
    switch (id) {
        case FunctionId::Ackley: m.range = {-32.768, 32.768}; m.lr_rule = R::scaled(5.0); break;
        case FunctionId::Alpine1: m.range = {-10, 10}; m.lr_rule = R::scaled(1.0); break;
        case FunctionId::DropWave: m.range = {-5.12, 5.12}; m.lr_rule = R::scaled(0.1); break;
        case FunctionId::Ellipsoid: m.range = {-100, 100}; m.lr_rule = R::scaled(0.01); break;
        case FunctionId::Griewank: m.range = {-100, 100}; m.lr_rule = R::scaled_pow(50.0); break;
        case FunctionId::HappyCat:
            m.range = {-20, 20};
            m.lr_rule = R::scaled_pow(10.0);
            m.optimum_point.assign(dim, -1.0);
            break;
        case FunctionId::HGBat:
            m.range = {-15, 15};
            m.lr_rule = R::scaled(0.1);
            m.optimum_point.assign(dim, -1.0);
            break;
        case FunctionId::ModifiedRidge: m.range = {-100, 100}; m.lr_rule = R::scaled(1.0); break;
        case FunctionId::Rastrigin: m.range = {-5.12, 5.12}; m.lr_rule = R::scaled(0.01); break;
        case FunctionId::Rosenbrock:
            // f(0, ..., 0) = D - 1; the minimizer is all-ones.
            m.range = {-10, 10};
            m.lr_rule = R::scaled(0.00005);
            m.optimum_point.assign(dim, 1.0);
            break;
        case FunctionId::RotatedHyperEllipsoid: m.range = {-100, 100}; m.lr_rule = R::scaled(0.01); break;
        case FunctionId::Salomon: m.range = {-20, 20}; m.lr_rule = R::scaled_pow(10.0); break;
        case FunctionId::SchafferF7: m.range = {-100, 100}; m.lr_rule = R::scaled(20.0); break;
        case FunctionId::Schwefel: {
            // f(0) = 418.9829*D; the true minimizer sits near 420.9687 per coordinate.
            m.range = {-500, 500};
            m.lr_rule = R::scaled(10.0);
            m.optimum_point.assign(dim, detail::schwefel_coordinate_optimum());
            m.optimum_value = BenchmarkFunction(id, dim).eval_unchecked(m.optimum_point);
            break;
        }
        case FunctionId::Schwefel221: m.range = {-100, 100}; m.lr_rule = R::scaled_pow(10.0); break;
        case FunctionId::Sphere: m.range = {-100, 100}; m.lr_rule = R::scaled(1.0); break;
    }
    return m;
}

inline double BenchmarkFunction::eval_unchecked(std::span<const double> x) const {
    using std::numbers::pi;
    const std::size_t D = x.size();
    const double dd = static_cast<double>(D);
    switch (id_) {
        case FunctionId::Ackley: {
            double s = 0.0, c = 0.0;
            for (double v : x) {
                s += v * v;
                c += std::cos(2.0 * pi * v);
            }
            return -20.0 * std::exp(-0.2 * std::sqrt(s / dd)) - std::exp(c / dd) + std::numbers::e + 20.0;
        }
        case FunctionId::Alpine1: {
            double s = 0.0;
            for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
            return s;
        }
        case FunctionId::DropWave: {
            const double s = detail::sum_sq(x);
            return 1.0 - (1.0 + std::cos(12.0 * std::sqrt(s))) / (0.5 * s + 2.0);
        }
        case FunctionId::Ellipsoid: {
            double s = 0.0;
            for (std::size_t i = 0; i < D; ++i) s += static_cast<double>(i + 1) * x[i] * x[i];
            return s;
        }
        case FunctionId::Griewank: {
            double s = 0.0, p = 1.0;
            for (std::size_t i = 0; i < D; ++i) {
                s += x[i] * x[i];
                p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
            }
            return s / 4000.0 - p + 1.0;
        }
        case FunctionId::HappyCat: {
            const double s = detail::sum_sq(x), t = detail::sum(x);
            return std::pow(std::abs(s - dd), 0.25) + (0.5 * s + t) / dd + 0.5;
        }
        case FunctionId::HGBat: {
            const double s = detail::sum_sq(x), t = detail::sum(x);
            return std::sqrt(std::abs(s * s - t * t)) + (0.5 * s + t) / dd + 0.5;
        }
        case FunctionId::ModifiedRidge: {
            double r = 0.0;
            for (std::size_t i = 1; i < D; ++i) r += x[i] * x[i];
            return std::abs(x[0]) + 2.0 * std::pow(r, 0.1);
        }
        case FunctionId::Rastrigin: {
            double s = 0.0;
            for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
            return s + 10.0 * dd;
        }
        case FunctionId::Rosenbrock: {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < D; ++i) {
                const double a = x[i + 1] - x[i] * x[i];
                const double b = x[i] - 1.0;
                s += 100.0 * a * a + b * b;
            }
            return s;
        }
        case FunctionId::RotatedHyperEllipsoid: {
            double s = 0.0;
            for (std::size_t i = 0; i < D; ++i) s += static_cast<double>(D - i) * x[i] * x[i];
            return s;
        }
        case FunctionId::Salomon: {
            const double r = std::sqrt(detail::sum_sq(x));
            return 1.0 - std::cos(2.0 * pi * r) + 0.1 * r;
        }
        case FunctionId::SchafferF7: {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < D; ++i) {
                const double s = x[i] * x[i] + x[i + 1] * x[i + 1];
                const double q = std::pow(s, 0.25);
                const double sn = std::sin(50.0 * std::pow(s, 0.1));
                acc += q + q * sn * sn;
            }
            const double mean = acc / static_cast<double>(D - 1);
            return mean * mean;
        }
        case FunctionId::Schwefel: {
            double s = 0.0;
            for (double v : x) s += v * std::sin(std::sqrt(std::abs(v)));
            return 418.9829 * dd - s;
        }
        case FunctionId::Schwefel221: {
            double m = 0.0;
            for (double v : x) m = std::max(m, std::abs(v));
            return m;
        }
        case FunctionId::Sphere: return detail::sum_sq(x);
    }
    return 0.0;
}

// Non-differentiable points get the subgradient choice sign(0) := 0.
inline void BenchmarkFunction::gradient_unchecked(std::span<const double> x, std::span<double> g) const {
    using std::numbers::pi;
    using detail::sgn;
    const std::size_t D = x.size();
    const double dd = static_cast<double>(D);
    switch (id_) {
        case FunctionId::Ackley: {
            double s = 0.0, c = 0.0;
            for (double v : x) {
                s += v * v;
                c += std::cos(2.0 * pi * v);
            }
            const double rho = std::sqrt(s / dd);
            const double radial = rho > 0.0 ? 4.0 * std::exp(-0.2 * rho) / (dd * rho) : 0.0;
            const double wave = 2.0 * pi * std::exp(c / dd) / dd;
            for (std::size_t i = 0; i < D; ++i) g[i] = radial * x[i] + wave * std::sin(2.0 * pi * x[i]);
            return;
        }
        case FunctionId::Alpine1:
            for (std::size_t i = 0; i < D; ++i) {
                const double v = x[i];
                g[i] = sgn(v * std::sin(v) + 0.1 * v) * (std::sin(v) + v * std::cos(v) + 0.1);
            }
            return;
        case FunctionId::DropWave: {
            const double s = detail::sum_sq(x);
            const double r = std::sqrt(s);
            const double q = 0.5 * s + 2.0;
            const double n = 1.0 + std::cos(12.0 * r);
            const double sinc = r > 0.0 ? std::sin(12.0 * r) / r : 12.0;
            const double k = (12.0 * sinc * q + n) / (q * q);
            for (std::size_t i = 0; i < D; ++i) g[i] = k * x[i];
            return;
        }
        case FunctionId::Ellipsoid:
            for (std::size_t i = 0; i < D; ++i) g[i] = 2.0 * static_cast<double>(i + 1) * x[i];
            return;
        case FunctionId::Griewank: {
            // Product over j != i via prefix/suffix products (robust when a factor is 0).
            std::vector<double> c(D), sq(D);
            for (std::size_t i = 0; i < D; ++i) {
                sq[i] = std::sqrt(static_cast<double>(i + 1));
                c[i] = std::cos(x[i] / sq[i]);
            }
            double prefix = 1.0;
            for (std::size_t i = 0; i < D; ++i) {
                g[i] = prefix;
                prefix *= c[i];
            }
            double suffix = 1.0;
            for (std::size_t i = D; i-- > 0;) {
                g[i] = x[i] / 2000.0 + std::sin(x[i] / sq[i]) / sq[i] * g[i] * suffix;
                suffix *= c[i];
            }
            return;
        }
        case FunctionId::HappyCat: {
            const double s = detail::sum_sq(x);
            const double a = s - dd;
            const double k = a != 0.0 ? 0.5 * sgn(a) * std::pow(std::abs(a), -0.75) : 0.0;
            for (std::size_t i = 0; i < D; ++i) g[i] = k * x[i] + (x[i] + 1.0) / dd;
            return;
        }
        case FunctionId::HGBat: {
            const double s = detail::sum_sq(x), t = detail::sum(x);
            const double a = s * s - t * t;
            const double k = a != 0.0 ? 0.5 * sgn(a) / std::sqrt(std::abs(a)) : 0.0;
            for (std::size_t i = 0; i < D; ++i) g[i] = k * (4.0 * s * x[i] - 2.0 * t) + (x[i] + 1.0) / dd;
            return;
        }
        case FunctionId::ModifiedRidge: {
            double r = 0.0;
            for (std::size_t i = 1; i < D; ++i) r += x[i] * x[i];
            const double k = r > 0.0 ? 0.4 * std::pow(r, -0.9) : 0.0;
            g[0] = sgn(x[0]);
            for (std::size_t i = 1; i < D; ++i) g[i] = k * x[i];
            return;
        }
        case FunctionId::Rastrigin:
            for (std::size_t i = 0; i < D; ++i) g[i] = 2.0 * x[i] + 20.0 * pi * std::sin(2.0 * pi * x[i]);
            return;
        case FunctionId::Rosenbrock:
            for (std::size_t i = 0; i < D; ++i) {
                double v = 0.0;
                if (i + 1 < D) v += -400.0 * x[i] * (x[i + 1] - x[i] * x[i]) + 2.0 * (x[i] - 1.0);
                if (i > 0) v += 200.0 * (x[i] - x[i - 1] * x[i - 1]);
                g[i] = v;
            }
            return;
        case FunctionId::RotatedHyperEllipsoid:
            for (std::size_t i = 0; i < D; ++i) g[i] = 2.0 * static_cast<double>(D - i) * x[i];
            return;
        case FunctionId::Salomon: {
            const double r = std::sqrt(detail::sum_sq(x));
            const double k = r > 0.0 ? (2.0 * pi * std::sin(2.0 * pi * r) + 0.1) / r : 0.0;
            for (std::size_t i = 0; i < D; ++i) g[i] = k * x[i];
            return;
        }
        case FunctionId::SchafferF7: {
            const double inv = 1.0 / static_cast<double>(D - 1);
            double acc = 0.0;
            std::vector<double> dterm(D - 1);
            for (std::size_t i = 0; i + 1 < D; ++i) {
                const double s = x[i] * x[i] + x[i + 1] * x[i + 1];
                if (s == 0.0) {
                    dterm[i] = 0.0;
                    continue;
                }
                const double q = std::pow(s, 0.25);
                const double a = 50.0 * std::pow(s, 0.1);
                const double sn = std::sin(a);
                acc += q + q * sn * sn;
                // d/ds [s^(1/4) (1 + sin^2(50 s^(1/10)))]
                dterm[i] = 0.25 * (1.0 + sn * sn) / (q * q * q) + 5.0 * std::sin(2.0 * a) * std::pow(s, -0.65);
            }
            const double outer = 2.0 * acc * inv * inv;
            std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t i = 0; i + 1 < D; ++i) {
                g[i] += outer * dterm[i] * 2.0 * x[i];
                g[i + 1] += outer * dterm[i] * 2.0 * x[i + 1];
            }
            return;
        }
        case FunctionId::Schwefel:
            for (std::size_t i = 0; i < D; ++i) {
                const double r = std::sqrt(std::abs(x[i]));
                g[i] = -(std::sin(r) + 0.5 * r * std::cos(r));
            }
            return;
        case FunctionId::Schwefel221: {
            std::size_t k = 0;
            for (std::size_t i = 1; i < D; ++i)
                if (std::abs(x[i]) > std::abs(x[k])) k = i;
            std::fill(g.begin(), g.end(), 0.0);
            g[k] = sgn(x[k]);
            return;
        }
        case FunctionId::Sphere:
            for (std::size_t i = 0; i < D; ++i) g[i] = 2.0 * x[i];
            return;
    }
}

}  // namespace gradopt
