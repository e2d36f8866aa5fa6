#include "sublab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sublab/errors.hpp"
#include "sublab/tree_oracle.hpp"

namespace sublab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Grid GridPolicy::dp_grid(const KernelArray& arr) const {
    const double radius = arr.n_steps() * arr.c_max() + padding;
    return Grid::symmetric(radius, dx);
}

Grid GridPolicy::pde_grid(const TestFunction& phi, double sigma_upper_sq,
                          double horizon) const {
    const double margin = 6.0 * std::sqrt(sigma_upper_sq * horizon);
    const double radius = std::max(std::fabs(phi.breakpoints().front()),
                                   std::fabs(phi.breakpoints().back())) +
                          margin + padding;
    return Grid::symmetric(radius, dx);
}

HeatSolveConfig GridPolicy::pde_config(const TestFunction& phi, double sigma_upper_sq,
                                       double horizon) const {
    return HeatSolveConfig{pde_grid(phi, sigma_upper_sq, horizon), cfl_safety};
}

LindebergReport lindeberg_conditions(const KernelArray& arr,
                                     const std::vector<double>& eps_list,
                                     double rho_target, double r_target) {
    for (double e : eps_list)
        if (!(e > 0.0)) throw std::invalid_argument("lindeberg_conditions: eps must be > 0");

    LindebergReport rep;
    rep.truncation_sums.reserve(eps_list.size());
    for (double e : eps_list) rep.truncation_sums.emplace_back(e, 0.0);

    std::vector<std::vector<double>> states;
    if (arr.is_state_dependent()) {
        states = reachable_states(arr); // throws TooLargeError beyond caps
        rep.worst_state = true;
    }

    for (int k = 1; k <= arr.n_steps(); ++k) {
        const std::vector<double> at_states =
            arr.is_state_dependent() ? states[static_cast<std::size_t>(k - 1)]
                                     : std::vector<double>{0.0};
        double var_upper = -HUGE_VAL;
        double r_term = -HUGE_VAL;
        double mean_term = -HUGE_VAL;
        std::vector<double> trunc(eps_list.size(), -HUGE_VAL);
        for (double s : at_states) {
            const StepStats st = conditional_step_stats(arr, k, s);
            var_upper = std::max(var_upper, st.var_upper);
            r_term = std::max(r_term, std::fabs(r_target * st.var_upper - st.var_lower));
            mean_term = std::max(mean_term, std::fabs(st.mean_upper) + std::fabs(st.mean_lower));
            for (std::size_t i = 0; i < eps_list.size(); ++i)
                trunc[i] = std::max(trunc[i], st.lindeberg(eps_list[i]));
        }
        rep.var_sum_upper += var_upper;
        rep.r_gap += r_term;
        rep.mean_sum += mean_term;
        for (std::size_t i = 0; i < eps_list.size(); ++i)
            rep.truncation_sums[i].second += trunc[i];
    }
    rep.rho_gap = std::fabs(rep.var_sum_upper - rho_target);
    return rep;
}

ConvergenceTable clt_gap(const ArrayBuilder& arr_builder, const TestFunction& phi,
                         const std::vector<int>& n_list, double rho,
                         const GCoefficients& g, const GridPolicy& policy) {
    const double limit = g_normal_expect(phi, rho, g, policy.pde_config(phi, g.sigma_upper_sq, rho));
    ConvergenceTable table;
    table.rows.reserve(n_list.size());
    for (int n : n_list) {
        const KernelArray arr = arr_builder(n);
        const double prelimit = dp_sum_expect(arr, phi, policy.dp_grid(arr));
        table.rows.push_back({n, prelimit, limit, std::fabs(prelimit - limit)});
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.n < b.n; });
    return table;
}

WeightedArray weighted_sum_array(const std::vector<double>& weights,
                                 const DistributionFamily& base) {
    if (weights.empty()) throw std::invalid_argument("weighted_sum_array: no weights");
    std::vector<DistributionFamily> steps;
    steps.reserve(weights.size());
    double max_abs = 0.0, sq = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("weighted_sum_array: non-finite weight");
        steps.push_back(base.scaled(w));
        max_abs = std::max(max_abs, std::fabs(w));
        sq += w * w;
    }
    return WeightedArray{KernelArray::from_steps(std::move(steps)), max_abs, sq};
}

std::vector<double> moving_average_weights(const std::vector<double>& coeffs, int n) {
    if (coeffs.empty()) throw std::invalid_argument("moving_average_weights: no coefficients");
    if (n < 1) throw std::invalid_argument("moving_average_weights: n must be >= 1");
    const int len = static_cast<int>(coeffs.size());
    const double root = std::sqrt(static_cast<double>(n));
    // a_{n,i} = (sum over k = 1..n of coeffs[i - k]) / sqrt(n), where the
    // coefficient index runs over 0..len-1 and is zero elsewhere.
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n + len - 1));
    for (int i = 1; i <= n + len - 1; ++i) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) {
            const int idx = i - k;
            if (idx >= 0 && idx < len) s += coeffs[static_cast<std::size_t>(idx)];
        }
        out.push_back(s / root);
    }
    return out;
}

namespace {

// Upper/lower conditional pair of a product skeleton functional, composed
// backward one heat solve per inter-time interval.
double skeleton_limit(const PathFunctional& f, double rho_slope, const GCoefficients& g,
                      const GridPolicy& policy) {
    const std::vector<double>& times = f.times();
    const std::vector<TestFunction>& comps = f.components();
    double bp_radius = 0.0;
    double margin = 0.0;
    double prev_t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        bp_radius = std::max({bp_radius, std::fabs(comps[i].breakpoints().front()),
                              std::fabs(comps[i].breakpoints().back())});
        margin += 6.0 * std::sqrt(g.sigma_upper_sq * rho_slope * (times[i] - prev_t));
        prev_t = times[i];
    }
    const Grid grid = Grid::symmetric(bp_radius + margin + policy.padding, policy.dx);
    const HeatSolveConfig cfg{grid, policy.cfl_safety};

    std::vector<double> upper(static_cast<std::size_t>(grid.n_points), 1.0);
    std::vector<double> lower = upper;
    for (std::size_t i = times.size(); i-- > 0;) {
        for (int j = 0; j < grid.n_points; ++j) {
            const double c = comps[i](grid.point(j));
            const double u = upper[static_cast<std::size_t>(j)];
            const double l = lower[static_cast<std::size_t>(j)];
            if (c >= 0.0) {
                upper[static_cast<std::size_t>(j)] = c * u;
                lower[static_cast<std::size_t>(j)] = c * l;
            } else {
                upper[static_cast<std::size_t>(j)] = c * l;
                lower[static_cast<std::size_t>(j)] = c * u;
            }
        }
        const double horizon = rho_slope * (times[i] - (i == 0 ? 0.0 : times[i - 1]));
        ValueFunction u_solved = solve_g_heat_values(std::move(upper), horizon, g, cfg);
        std::vector<double> neg_lower = std::move(lower);
        for (double& v : neg_lower) v = -v;
        ValueFunction l_solved = solve_g_heat_values(std::move(neg_lower), horizon, g, cfg);
        upper = std::move(u_solved.values());
        lower = std::move(l_solved.values());
        for (double& v : lower) v = -v;
    }
    return ValueFunction(grid, std::move(upper))(0.0);
}

} // namespace

ConvergenceTable fclt_gap(const ArrayBuilder& arr_builder, const PathFunctional& functional,
                          const std::vector<int>& n_list, double rho_slope,
                          const GCoefficients& g, const GridPolicy& policy) {
    if (functional.kind() == PathFunctional::Kind::Terminal)
        return clt_gap(arr_builder, functional.phi(), n_list, rho_slope, g, policy);

    std::vector<int> ns = n_list;
    std::sort(ns.begin(), ns.end());

    ConvergenceTable table;
    table.rows.reserve(ns.size());
    if (functional.kind() == PathFunctional::Kind::Skeleton) {
        const double limit = skeleton_limit(functional, rho_slope, g, policy);
        for (int n : ns) {
            const KernelArray arr = arr_builder(n);
            const double prelimit = dp_path_expect(arr, functional, policy.dp_grid(arr));
            table.rows.push_back({n, prelimit, limit, std::fabs(prelimit - limit)});
        }
    } else { // running max: Cauchy gaps between successive prelimits
        double prev = kNaN;
        for (int n : ns) {
            const KernelArray arr = arr_builder(n);
            const double prelimit = dp_path_expect(arr, functional, policy.dp_grid(arr));
            const double gap = std::isnan(prev) ? kNaN : std::fabs(prelimit - prev);
            table.rows.push_back({n, prelimit, kNaN, gap});
            prev = prelimit;
        }
    }
    return table;
}

DistributionFamily levy_step_family(const GCoefficients& g, int n) {
    const double root = std::sqrt(static_cast<double>(n));
    return DistributionFamily{
        StepDistribution::rademacher(std::sqrt(g.sigma_lower_sq) / root),
        StepDistribution::rademacher(std::sqrt(g.sigma_upper_sq) / root)};
}

std::vector<ConvergenceTable> levy_demo(const GCoefficients& g, const std::vector<int>& n_list,
                                        const std::vector<TestFunction>& phis,
                                        const GridPolicy& policy) {
    std::vector<ConvergenceTable> tables;
    tables.reserve(phis.size());
    for (const TestFunction& phi : phis) {
        tables.push_back(clt_gap(
            [&g](int n) { return KernelArray::iid(n, levy_step_family(g, n)); }, phi,
            n_list, 1.0, g, policy));
    }
    return tables;
}

CounterexampleReport counterexample_check(double tau, double a,
                                          const CounterexampleConfig& cfg) {
    const auto [lower, upper] = g_third_moment_bounds(tau); // validates tau
    const GCoefficients band(tau, 1.0);
    const GCoefficients classical(1.0, 1.0);

    CounterexampleReport rep{};
    rep.bound_lower = lower;
    rep.bound_upper = upper;

    // Third moment of xi alone.
    rep.clip_xi = cfg.clip_sigmas;
    const TestFunction cube = TestFunction::clipped_power(3, rep.clip_xi, cfg.points_per_unit);
    const Grid grid_xi = Grid::symmetric(rep.clip_xi + 6.0 + 1.0, cfg.dx);
    rep.third_moment_xi = g_normal_expect(cube, 1.0, band, {grid_xi, cfg.cfl_safety});
    rep.within_bounds = rep.third_moment_xi >= lower - cfg.bounds_tol &&
                        rep.third_moment_xi <= upper + cfg.bounds_tol;

    // Third moment of xi + a eta by composing the two solves: first the
    // classical smoothing over horizon a^2, then the band solve over 1.
    const double scale = std::sqrt(1.0 + a * a);
    rep.clip_sum = cfg.clip_sigmas * scale;
    const TestFunction cube_sum =
        TestFunction::clipped_power(3, rep.clip_sum, cfg.points_per_unit);
    const double inner_margin = 6.0 * std::fabs(a);
    const Grid grid_sum =
        Grid::symmetric(rep.clip_sum + inner_margin + 6.0 + 1.0, cfg.dx_compose);
    const HeatSolveConfig cfg_sum{grid_sum, cfg.cfl_safety};
    ValueFunction smoothed = solve_g_heat(cube_sum, a * a, classical, cfg_sum);
    rep.third_moment_sum =
        solve_g_heat_values(std::move(smoothed.values()), 1.0, band, cfg_sum)(0.0);
    rep.composition_consistent =
        std::fabs(rep.third_moment_sum - rep.third_moment_xi) <= cfg.composition_tol;

    // If the sum were G-normal it would scale like sqrt(1 + a^2) times a
    // G-normal with band [(tau + a^2) / (1 + a^2), 1], forcing a third
    // moment of at least scale * lower; beyond |a| = 6 that exceeds the
    // upper bound.
    rep.scaled_lower_bound = scale * lower;
    rep.contradiction_holds = rep.scaled_lower_bound > upper;

    // Gaussian tail mass of the clipped cube, both tails, at the upper
    // variance: 2 (L^2 + 2) density(L).
    const double L = cfg.clip_sigmas;
    rep.tail_bound = 2.0 * (L * L + 2.0) * std::exp(-0.5 * L * L) / std::sqrt(2.0 * M_PI);

    rep.consistent = rep.within_bounds && rep.composition_consistent &&
                     (std::fabs(a) < 6.0 || rep.contradiction_holds);
    return rep;
}

} // namespace sublab
