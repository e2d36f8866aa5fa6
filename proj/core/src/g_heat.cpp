#include "sublab/g_heat.hpp"

#include <cmath>
#include <stdexcept>

#include "sublab/errors.hpp"

namespace sublab {

GCoefficients::GCoefficients(double lower_sq, double upper_sq)
    : sigma_lower_sq(lower_sq), sigma_upper_sq(upper_sq) {
    if (!(lower_sq >= 0.0) || !(upper_sq > 0.0) || lower_sq > upper_sq ||
        !std::isfinite(upper_sq))
        throw std::invalid_argument("GCoefficients: need 0 <= lower_sq <= upper_sq, upper_sq > 0");
}

double g_operator(double alpha, const GCoefficients& g) {
    const double pos = alpha > 0.0 ? alpha : 0.0;
    const double neg = alpha < 0.0 ? -alpha : 0.0;
    return 0.5 * (g.sigma_upper_sq * pos - g.sigma_lower_sq * neg);
}

long g_heat_step_count(double horizon, const GCoefficients& g, const HeatSolveConfig& cfg) {
    if (horizon <= 0.0) return 0;
    const double dx = cfg.grid.dx();
    const double dt_max = cfg.cfl_safety * dx * dx / g.sigma_upper_sq;
    return static_cast<long>(std::ceil(horizon / dt_max - 1e-12));
}

ValueFunction solve_g_heat_values(std::vector<double> terminal, double horizon,
                                  const GCoefficients& g, const HeatSolveConfig& cfg) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("solve_g_heat: horizon must be >= 0");
    if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
        throw std::invalid_argument("solve_g_heat: cfl_safety must lie in (0, 1]");
    const Grid& grid = cfg.grid;
    if (static_cast<int>(terminal.size()) != grid.n_points)
        throw std::invalid_argument("solve_g_heat: terminal size mismatch");

    const long steps = g_heat_step_count(horizon, g, cfg);
    if (steps == 0) return ValueFunction(grid, std::move(terminal));

    const double dt = horizon / static_cast<double>(steps);
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    const int n = grid.n_points;
    std::vector<double> cur = std::move(terminal);
    std::vector<double> next(static_cast<std::size_t>(n));
    for (long m = 0; m < steps; ++m) {
        // constant extension: the ghost value equals the edge value, so the
        // edge second difference uses only the inward neighbour
        next[0] = cur[0] + dt * g_operator((cur[1] - cur[0]) * inv_dx2, g);
        for (int j = 1; j + 1 < n; ++j) {
            const double d2 = (cur[static_cast<std::size_t>(j) - 1] -
                               2.0 * cur[static_cast<std::size_t>(j)] +
                               cur[static_cast<std::size_t>(j) + 1]) *
                              inv_dx2;
            next[static_cast<std::size_t>(j)] =
                cur[static_cast<std::size_t>(j)] + dt * g_operator(d2, g);
        }
        next[static_cast<std::size_t>(n) - 1] =
            cur[static_cast<std::size_t>(n) - 1] +
            dt * g_operator((cur[static_cast<std::size_t>(n) - 2] -
                             cur[static_cast<std::size_t>(n) - 1]) *
                                inv_dx2,
                            g);
        std::swap(cur, next);
    }
    return ValueFunction(grid, std::move(cur));
}

ValueFunction solve_g_heat(const TestFunction& phi, double horizon, const GCoefficients& g,
                           const HeatSolveConfig& cfg) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("solve_g_heat: horizon must be >= 0");
    const double margin = 6.0 * std::sqrt(g.sigma_upper_sq * horizon);
    if (cfg.grid.lo > phi.breakpoints().front() - margin + 1e-9 ||
        cfg.grid.hi < phi.breakpoints().back() + margin - 1e-9)
        throw DomainOverflowError("solve_g_heat: grid narrower than breakpoint span plus 6 sigma");

    std::vector<double> terminal(static_cast<std::size_t>(cfg.grid.n_points));
    for (int j = 0; j < cfg.grid.n_points; ++j)
        terminal[static_cast<std::size_t>(j)] = phi(cfg.grid.point(j));
    return solve_g_heat_values(std::move(terminal), horizon, g, cfg);
}

double g_normal_expect(const TestFunction& phi, double rho, const GCoefficients& g,
                       const HeatSolveConfig& cfg) {
    if (!(rho >= 0.0)) throw std::invalid_argument("g_normal_expect: rho must be >= 0");
    return solve_g_heat(phi, rho, g, cfg)(0.0);
}

std::pair<double, double> g_third_moment_bounds(double tau) {
    if (!(tau > 0.0) || !(tau < 1.0))
        throw std::invalid_argument("g_third_moment_bounds: tau must lie in (0, 1)");
    const double scale = 3.0 * (1.0 - tau) / (4.0 * std::sqrt(M_PI));
    const double r2 = std::sqrt(2.0);
    return {scale * (2.0 - r2), scale * (2.0 + r2)};
}

} // namespace sublab
