#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradopt {

/// Precondition violations (dimension mismatch, out-of-range step index, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sampled objective value was not finite.
class NumericOverflow : public std::runtime_error {
public:
    NumericOverflow(const std::string& what, std::size_t sample_index)
        : std::runtime_error(what + " (sample " + std::to_string(sample_index) + ")"),
          sample_index_(sample_index) {}

    std::size_t sample_index() const noexcept { return sample_index_; }

private:
    std::size_t sample_index_;
};

/// An optimizer iterate left the finite region. Carries the last finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, std::vector<double> last_x, double last_f)
        : std::runtime_error("iterate diverged at step " + std::to_string(step)),
          step_(step), last_x_(std::move(last_x)), last_f_(last_f) {}

    std::size_t step() const noexcept { return step_; }
    const std::vector<double>& last_x() const noexcept { return last_x_; }
    double last_f() const noexcept { return last_f_; }

private:
    std::size_t step_;
    std::vector<double> last_x_;
    double last_f_;
};

/// No hyperparameter update satisfies the requested noise decay rate.
class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw InvalidArgument(msg);
}

inline void require_dim(std::size_t got, std::size_t want, const char* where) {
    if (got != want)
        throw InvalidArgument(std::string(where) + ": dimension mismatch (got " +
                              std::to_string(got) + ", expected " + std::to_string(want) + ")");
}

}  // namespace detail
}  // namespace gradopt
