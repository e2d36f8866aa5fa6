#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sublab/dp.hpp"
#include "sublab/g_heat.hpp"
#include "sublab/grid.hpp"
#include "sublab/kernel_array.hpp"
#include "sublab/path_functional.hpp"

namespace sublab {

/// Grid construction rules shared by the convergence experiments: a
/// symmetric dyadic-friendly grid covering the reachable set (for the
/// backward induction) or the terminal breakpoints plus the diffusion
/// margin (for the heat solves).
struct GridPolicy {
    double dx = 1.0 / 64;
    double padding = 1.0;
    double cfl_safety = 0.5;

    Grid dp_grid(const KernelArray& arr) const;
    Grid pde_grid(const TestFunction& phi, double sigma_upper_sq, double horizon) const;
    HeatSolveConfig pde_config(const TestFunction& phi, double sigma_upper_sq,
                               double horizon) const;
};

/// Finite-n values of the conditional Lindeberg-type conditions of the
/// martingale central limit theorem, summed over steps. For
/// state-dependent kernels each per-step quantity is maximised over the
/// reachable states of that step.
struct LindebergReport {
    /// (eps, sum over steps of sup E[(Z^2 - eps)^+ | past]).
    std::vector<std::pair<double, double>> truncation_sums;
    /// Sum over steps of the conditional upper second moments.
    double var_sum_upper = 0.0;
    /// |var_sum_upper - rho_target|.
    double rho_gap = 0.0;
    /// Sum over steps of |r_target * upper - lower| second-moment gaps.
    double r_gap = 0.0;
    /// Sum over steps of |upper mean| + |lower mean|.
    double mean_sum = 0.0;
    /// True when the per-step quantities were maximised over sampled
    /// reachable states (state-dependent kernel).
    bool worst_state = false;
};

LindebergReport lindeberg_conditions(const KernelArray& arr,
                                     const std::vector<double>& eps_list,
                                     double rho_target, double r_target);

struct ConvergenceRow {
    int n;
    double prelimit;
    double limit; // NaN when no closed limit is computed (Cauchy mode)
    double gap;   // NaN when not applicable
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

using ArrayBuilder = std::function<KernelArray(int)>;

/// Rows (n, backward-induction value, heat-solve limit, |difference|) for
/// the sum functional phi.
ConvergenceTable clt_gap(const ArrayBuilder& arr_builder, const TestFunction& phi,
                         const std::vector<int>& n_list, double rho,
                         const GCoefficients& g, const GridPolicy& policy);

/// Kernel array whose step-i family is the base family with every atom
/// scaled by weights[i], plus the two summary statistics of the weight
/// array.
struct WeightedArray {
    KernelArray array;
    double max_abs_weight;
    double weight_sq_sum;
};

WeightedArray weighted_sum_array(const std::vector<double>& weights,
                                 const DistributionFamily& base);

/// Coefficients a_{n,i} = (sum of coeffs[i-k] over k = 1..n) / sqrt(n) of
/// the length-(n + len - 1) weighted-sum representation of a moving
/// average with the given kernel coefficients.
std::vector<double> moving_average_weights(const std::vector<double>& coeffs, int n);

/// Functional analogue of clt_gap. Terminal functionals coincide with
/// clt_gap. Skeleton limits are computed by composing one heat solve per
/// inter-time interval (horizon rho_slope * dt). Running-max functionals
/// have no closed limit here; rows carry Cauchy gaps
/// |prelimit(n_i) - prelimit(n_{i-1})| instead and an empty limit column.
ConvergenceTable fclt_gap(const ArrayBuilder& arr_builder, const PathFunctional& functional,
                          const std::vector<int>& n_list, double rho_slope,
                          const GCoefficients& g, const GridPolicy& policy);

/// Marginal-convergence demo for the canonical discrete process with
/// conditional variance band [sigma_lower_sq, sigma_upper_sq] / n per
/// step: one table per test function.
std::vector<ConvergenceTable> levy_demo(const GCoefficients& g, const std::vector<int>& n_list,
                                        const std::vector<TestFunction>& phis,
                                        const GridPolicy& policy);

/// The canonical one-step family of the demo process at scale 1/sqrt(n).
DistributionFamily levy_step_family(const GCoefficients& g, int n);

struct CounterexampleConfig {
    double dx = 0.02;         // spacing of the single-variable solve
    double dx_compose = 0.04; // spacing of the composed two-stage solve
    double cfl_safety = 0.5;
    double clip_sigmas = 8.0; // clip level in std devs of the argument
    int points_per_unit = 64;
    double bounds_tol = 0.02;
    double composition_tol = 0.05;
};

/// Third-moment experiment for the sum xi + a * eta of a G-normal xi with
/// band [tau, 1] and an independent classical standard normal eta:
///   - the third moment of xi lies in the closed-form band,
///   - composing the two solves reproduces it (the classical summand does
///     not move the third moment),
///   - for |a| >= 6 the scaled lower bound exceeds the upper bound, so the
///     sum cannot be G-normal.
struct CounterexampleReport {
    double third_moment_xi;
    double third_moment_sum;
    double bound_lower;
    double bound_upper;
    double scaled_lower_bound;
    double clip_xi;
    double clip_sum;
    double tail_bound;
    bool within_bounds;
    bool composition_consistent;
    bool contradiction_holds;
    bool consistent;
};

CounterexampleReport counterexample_check(double tau, double a,
                                          const CounterexampleConfig& cfg = {});

} // namespace sublab
