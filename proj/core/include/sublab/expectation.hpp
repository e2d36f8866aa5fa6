#pragma once

#include <functional>
#include <limits>

#include "sublab/distribution.hpp"
#include "sublab/test_function.hpp"

namespace sublab {

/// Sandwich bracket for a capacity value; lower <= upper, both in [0, 1].
struct CapacityBracket {
    double lower;
    double upper;
};

/// Upper expectation of f over the family: max over members of the
/// classical expectation. This is the canonical sub-linear expectation;
/// it is monotone, constant preserving, sub-additive and positively
/// homogeneous by construction.
template <class F>
double expect_fn(const DistributionFamily& fam, F&& f) {
    double best = -std::numeric_limits<double>::infinity();
    for (const StepDistribution& d : fam.members()) {
        const double v = d.mean_of(f);
        if (v > best) best = v;
    }
    return best;
}

/// Lower (conjugate) expectation: -E[-f] = min over members.
template <class F>
double conjugate_expect_fn(const DistributionFamily& fam, F&& f) {
    double worst = std::numeric_limits<double>::infinity();
    for (const StepDistribution& d : fam.members()) {
        const double v = d.mean_of(f);
        if (v < worst) worst = v;
    }
    return worst;
}

double expect_step(const DistributionFamily& fam, const TestFunction& phi);
double conjugate_expect_step(const DistributionFamily& fam, const TestFunction& phi);

/// Sandwich bracket for the capacity of {X >= threshold} built from two
/// Lipschitz ramps of width ramp_width: the lower ramp vanishes on the
/// complement of the event, the upper ramp dominates its indicator.
CapacityBracket capacity_bracket(const DistributionFamily& fam, double threshold,
                                 double ramp_width);

/// Choquet integral of a nonincreasing capacity t -> V(X >= t):
/// integral over (0, inf) of V plus integral over (-inf, 0) of V - 1,
/// computed by the composite trapezoid rule on [lo, hi] with the capacity
/// treated as 1 below lo and 0 above hi. Rejects nonmonotone samples.
double choquet(const std::function<double(double)>& capacity, double lo, double hi,
               double quadrature_step);

} // namespace sublab
