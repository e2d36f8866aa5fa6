#pragma once

#include <string>
#include <vector>

#include "sublab/distribution.hpp"
#include "sublab/kernel_array.hpp"
#include "sublab/tree_oracle.hpp"

namespace sublab {

/// One verified inequality instance: both sides and the slack rhs - lhs.
/// The descriptor plus the batch seed reproduces the instance.
struct InequalityReport {
    double lhs;
    double rhs;
    double slack;
    std::string instance;
};

enum class RosenthalVariant {
    /// E[(max over k of S_n - S_k)^2] <= E[sum of conditional second
    /// moments]; requires nonpositive conditional upper means.
    SuffixSquared,
    /// E[max |S_k|^2] <= 256 (variance term + squared mean-drift term).
    MaxSquared,
    /// E[max |S_k|^p] <= C_p (p-th moments + variance^{p/2} + drift^p).
    MaxPower,
};

/// Moment bound on maxima of partial sums against sums of conditional
/// moments. The left side is evaluated exactly on the outcome tree; the
/// right side assembles the worst-case expectations of the per-step
/// conditional statistics. c_p only applies to MaxPower; c_p <= 0 selects
/// the default 2^{2p} p^2.
InequalityReport rosenthal_check(const KernelArray& arr, double p, RosenthalVariant variant,
                                 double c_p = 0.0, const TreeCaps& caps = {});

/// Independent-steps specialisation: the right side needs only
/// unconditional per-step statistics.
InequalityReport independent_rosenthal_check(const std::vector<DistributionFamily>& families,
                                             double p, double c_p, const TreeCaps& caps = {});

/// exp{-x^2 / (2(xy + A)) * (1 + 2/3 ln(1 + xy / A))}.
double exponential_bound_value(double x, double y, double A);

/// Tail bound for the sum of nonpositive-upper-mean steps in the regime
/// where every atom magnitude stays below y and A is the largest
/// path-accumulated conditional variance: the upper capacity bracket of
/// {sum >= x} against the closed-form exponential bound.
InequalityReport exponential_inequality_check(const KernelArray& arr, double x, double y,
                                              double ramp_width = 1e-6,
                                              const TreeCaps& caps = {});

/// Largest path-accumulated sum of conditional upper second moments.
double worst_path_variance(const KernelArray& arr, const TreeCaps& caps = {});

} // namespace sublab
