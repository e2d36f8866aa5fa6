#pragma once

#include <utility>
#include <vector>

#include "sublab/grid.hpp"
#include "sublab/test_function.hpp"

namespace sublab {

/// Variance band [sigma_lower_sq, sigma_upper_sq] of a G-normal law.
struct GCoefficients {
    double sigma_lower_sq;
    double sigma_upper_sq;

    GCoefficients(double lower_sq, double upper_sq);

    bool classical() const { return sigma_lower_sq == sigma_upper_sq; }
};

/// Configuration of the explicit marching scheme. The time step is
/// cfl_safety * dx^2 / sigma_upper_sq; cfl_safety in (0, 1] is exactly the
/// monotonicity range of the scheme. Boundaries extend constantly.
struct HeatSolveConfig {
    Grid grid;
    double cfl_safety = 0.5;
};

/// G(alpha) = (sigma_upper_sq * alpha^+ - sigma_lower_sq * alpha^-) / 2.
double g_operator(double alpha, const GCoefficients& g);

/// Time-0 slice of the nonlinear heat evolution with terminal data phi at
/// the given horizon: explicit monotone marching of
///   V <- V + dt * G(centered second difference of V).
/// Converges to the viscosity solution as dx -> 0. The grid must span the
/// breakpoints of phi plus a 6 sigma sqrt(horizon) margin on both sides;
/// otherwise a DomainOverflowError is thrown.
ValueFunction solve_g_heat(const TestFunction& phi, double horizon, const GCoefficients& g,
                           const HeatSolveConfig& cfg);

/// Same marching on raw terminal samples (no margin check); used when
/// composing solves whose terminal data is itself a solved slice.
ValueFunction solve_g_heat_values(std::vector<double> terminal, double horizon,
                                  const GCoefficients& g, const HeatSolveConfig& cfg);

/// Expectation of phi(sqrt(rho) * xi) for xi G-normal with band g: the
/// solved slice evaluated at 0.
double g_normal_expect(const TestFunction& phi, double rho, const GCoefficients& g,
                       const HeatSolveConfig& cfg);

/// Closed-form band for the third moment of a G-normal variable with
/// variance band [tau, 1]:
///   3(2 -/+ sqrt 2) / (4 sqrt pi) * (1 - tau).
std::pair<double, double> g_third_moment_bounds(double tau);

/// Number of time steps the scheme takes for a given horizon and config.
long g_heat_step_count(double horizon, const GCoefficients& g, const HeatSolveConfig& cfg);

} // namespace sublab
