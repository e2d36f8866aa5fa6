#include "sublab/kernel_array.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sublab {

KernelArray::KernelArray(int n, std::vector<DistributionFamily> steps, KernelFn fn,
                         double c_max)
    : n_steps_(n), c_max_(c_max), steps_(std::move(steps)), fn_(std::move(fn)) {
    if (n_steps_ < 1) throw std::invalid_argument("KernelArray: n_steps must be >= 1");
    if (!(c_max_ >= 0.0) || !std::isfinite(c_max_))
        throw std::invalid_argument("KernelArray: c_max must be finite and >= 0");
}

KernelArray KernelArray::iid(int n_steps, DistributionFamily fam) {
    std::vector<DistributionFamily> steps(static_cast<std::size_t>(n_steps), fam);
    return from_steps(std::move(steps));
}

KernelArray KernelArray::from_steps(std::vector<DistributionFamily> steps) {
    if (steps.empty()) throw std::invalid_argument("KernelArray: no steps");
    double c = 0.0;
    for (const DistributionFamily& f : steps) c = std::max(c, f.max_abs_point());
    const int n = static_cast<int>(steps.size());
    return KernelArray(n, std::move(steps), nullptr, c);
}

KernelArray KernelArray::state_dependent(int n_steps, KernelFn kernel, double c_max) {
    if (!kernel) throw std::invalid_argument("KernelArray: null kernel");
    // Spot-check the declared bound on a handful of states.
    for (int k = 1; k <= n_steps; ++k) {
        for (double s : {-c_max * n_steps, -1.0, 0.0, 1.0, c_max * n_steps}) {
            if (kernel(k, s).max_abs_point() > c_max + 1e-12)
                throw std::invalid_argument("KernelArray: declared c_max violated");
        }
    }
    return KernelArray(n_steps, {}, std::move(kernel), c_max);
}

const DistributionFamily& KernelArray::step(int k) const {
    if (is_state_dependent())
        throw std::logic_error("KernelArray::step: kernel is state-dependent");
    if (k < 1 || k > n_steps_) throw std::invalid_argument("KernelArray::step: bad index");
    return steps_[static_cast<std::size_t>(k - 1)];
}

DistributionFamily KernelArray::step_at(int k, double state) const {
    if (k < 1 || k > n_steps_) throw std::invalid_argument("KernelArray::step_at: bad index");
    if (fn_) return fn_(k, state);
    return steps_[static_cast<std::size_t>(k - 1)];
}

} // namespace sublab
