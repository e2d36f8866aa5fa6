#pragma once

#include "sublab/distribution.hpp"
#include "sublab/expectation.hpp"
#include "sublab/grid.hpp"
#include "sublab/kernel_array.hpp"
#include "sublab/path_functional.hpp"

namespace sublab {

/// Worst-case expectation of phi(Z_1 + ... + Z_n) by backward induction on
/// the grid: u_n = phi, and one step back
///   u_{k-1}(x) = max over members of kernel(k, x) of E[u_k(x + Z)],
/// with linear interpolation at off-grid children and constant extension
/// outside the grid. Returns u_0(0).
///
/// The grid must contain [-n c_max, n c_max]; otherwise the value at 0
/// would depend on the constant extension and a DomainOverflowError is
/// thrown. When every atom sum lands on a grid node the result is exact.
double dp_sum_expect(const KernelArray& arr, const TestFunction& phi, const Grid& grid);

/// Backward induction for path functionals over the augmented state.
/// Terminal functionals reduce to dp_sum_expect on the same grid (same
/// code path, bit-identical). Running-max functionals use a 2-D
/// (sum, max) grid induced from `grid`. Skeleton functionals propagate an
/// upper/lower value pair, multiplying in the recorded component at each
/// crossed time; this is exact for the product form because a recorded
/// factor is a constant inside every deeper conditional.
double dp_path_expect(const KernelArray& arr, const PathFunctional& functional,
                      const Grid& grid);

/// Conditional one-step statistics at (step k, state s): upper/lower means
/// and second moments over the family, plus the truncated second moment
/// sup E[(Z^2 - eps)^+] used by the Lindeberg sums.
struct StepStats {
    double mean_upper;
    double mean_lower;
    double var_upper;
    double var_lower;
    DistributionFamily family;

    double lindeberg(double eps) const {
        return expect_fn(family, [eps](double z) {
            const double t = z * z - eps;
            return t > 0.0 ? t : 0.0;
        });
    }
};

StepStats conditional_step_stats(const KernelArray& arr, int k, double state = 0.0);

} // namespace sublab
