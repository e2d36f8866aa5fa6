#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sublab/errors.hpp"
#include "sublab/test_function.hpp"

namespace sublab {

/// A functional of the partial-sum path (S_0 = 0, S_1, ..., S_n):
///   - Terminal:   phi(S_n)
///   - RunningMax: phi(max over k of S_k), the max taken over k = 0..n
///   - Skeleton:   product over i of phi_i(S at time t_i), the times in
///                 (0, 1] mapped to step indices round(t_i * n); at most 4
///                 recorded times.
class PathFunctional {
public:
    enum class Kind { Terminal, RunningMax, Skeleton };

    static PathFunctional terminal(TestFunction phi) {
        return PathFunctional(Kind::Terminal, {std::move(phi)}, {});
    }
    static PathFunctional running_max(TestFunction phi) {
        return PathFunctional(Kind::RunningMax, {std::move(phi)}, {});
    }
    static PathFunctional skeleton(std::vector<double> times,
                                   std::vector<TestFunction> components) {
        if (times.empty() || times.size() != components.size())
            throw std::invalid_argument("PathFunctional: times/components mismatch");
        if (times.size() > 4)
            throw TooLargeError("PathFunctional: at most 4 skeleton times");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!(times[i] > 0.0) || times[i] > 1.0)
                throw std::invalid_argument("PathFunctional: times must lie in (0, 1]");
            if (i > 0 && times[i] <= times[i - 1])
                throw std::invalid_argument("PathFunctional: times must be increasing");
        }
        return PathFunctional(Kind::Skeleton, std::move(components), std::move(times));
    }

    Kind kind() const { return kind_; }
    const TestFunction& phi() const { return components_.front(); }
    const std::vector<TestFunction>& components() const { return components_; }
    const std::vector<double>& times() const { return times_; }

    /// Step index at which the i-th skeleton time is recorded for an
    /// n-step array.
    int record_step(std::size_t i, int n_steps) const {
        const int k = static_cast<int>(std::lround(times_[i] * n_steps));
        return std::max(1, std::min(k, n_steps));
    }

private:
    PathFunctional(Kind kind, std::vector<TestFunction> components,
                   std::vector<double> times)
        : kind_(kind), components_(std::move(components)), times_(std::move(times)) {}

    Kind kind_;
    std::vector<TestFunction> components_;
    std::vector<double> times_;
};

} // namespace sublab
