#pragma once

#include <functional>
#include <vector>

#include "sublab/distribution.hpp"

namespace sublab {

/// An n-step kernel mapping (step index, current state) to the family of
/// one-step conditional distributions. Constant kernels hold one family
/// per step; state-dependent kernels hold a callback plus a declared
/// uniform bound c_max on atom magnitudes.
///
/// The conditional upper/lower means and second moments at any state are
/// exact by construction: they are plain family statistics of the step's
/// returned family.
class KernelArray {
public:
    using KernelFn = std::function<DistributionFamily(int step, double state)>;

    static KernelArray iid(int n_steps, DistributionFamily fam);
    static KernelArray from_steps(std::vector<DistributionFamily> steps);
    static KernelArray state_dependent(int n_steps, KernelFn kernel, double c_max);

    int n_steps() const { return n_steps_; }
    bool is_state_dependent() const { return static_cast<bool>(fn_); }
    /// Uniform bound on atom magnitudes over all steps and states.
    double c_max() const { return c_max_; }

    /// Step family of a constant kernel, k in 1..n_steps.
    const DistributionFamily& step(int k) const;
    /// Step family at a given state, k in 1..n_steps. Copies for
    /// state-dependent kernels.
    DistributionFamily step_at(int k, double state) const;

private:
    KernelArray(int n, std::vector<DistributionFamily> steps, KernelFn fn, double c_max);

    int n_steps_;
    double c_max_;
    std::vector<DistributionFamily> steps_;
    KernelFn fn_;
};

} // namespace sublab
