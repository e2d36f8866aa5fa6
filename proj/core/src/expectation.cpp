#include "sublab/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sublab {

double expect_step(const DistributionFamily& fam, const TestFunction& phi) {
    return expect_fn(fam, [&phi](double x) { return phi(x); });
}

double conjugate_expect_step(const DistributionFamily& fam, const TestFunction& phi) {
    return -expect_step(fam, -phi);
}

CapacityBracket capacity_bracket(const DistributionFamily& fam, double threshold,
                                 double ramp_width) {
    if (!(ramp_width > 0.0))
        throw std::invalid_argument("capacity_bracket: ramp_width must be > 0");
    const TestFunction below = TestFunction::ramp(threshold, threshold + ramp_width);
    const TestFunction above = TestFunction::ramp(threshold - ramp_width, threshold);
    const double lower = std::clamp(expect_step(fam, below), 0.0, 1.0);
    const double upper = std::clamp(expect_step(fam, above), 0.0, 1.0);
    return {lower, upper};
}

double choquet(const std::function<double(double)>& capacity, double lo, double hi,
               double quadrature_step) {
    if (!(lo < hi)) throw std::invalid_argument("choquet: lo must be < hi");
    if (!(quadrature_step > 0.0))
        throw std::invalid_argument("choquet: quadrature_step must be > 0");

    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / quadrature_step)));
    const double h = (hi - lo) / n;
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        v[static_cast<std::size_t>(i)] = capacity(lo + h * i);
        if (i > 0 && v[static_cast<std::size_t>(i)] >
                         v[static_cast<std::size_t>(i - 1)] + 1e-12)
            throw std::invalid_argument("choquet: capacity samples not nonincreasing");
    }

    // Trapezoid over [lo, hi] of the signed integrand: V on the positive
    // axis, V - 1 on the negative axis.
    double acc = 0.0;
    auto integrand = [&](int i) {
        const double t = lo + h * i;
        return t >= 0.0 ? v[static_cast<std::size_t>(i)]
                        : v[static_cast<std::size_t>(i)] - 1.0;
    };
    for (int i = 0; i < n; ++i) {
        const double a = lo + h * i;
        const double b = a + h;
        if (a < 0.0 && b > 0.0) {
            // split the straddling cell at zero so each side uses its own sign
            const double vz = capacity(0.0);
            acc += 0.5 * (-a) * ((v[static_cast<std::size_t>(i)] - 1.0) + (vz - 1.0));
            acc += 0.5 * b * (vz + v[static_cast<std::size_t>(i) + 1]);
        } else {
            acc += 0.5 * h * (integrand(i) + integrand(i + 1));
        }
    }
    // Tails: capacity 1 below lo (contributes lo on the negative axis when
    // lo > 0 via the positive-part integral), capacity 0 above hi.
    if (lo > 0.0) acc += lo;          // integral of V = 1 over (0, lo)
    if (hi < 0.0) acc += hi;          // integral of V - 1 = -1 over (hi, 0)
    return acc;
}

} // namespace sublab
