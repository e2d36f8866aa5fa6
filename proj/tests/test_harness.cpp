#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "sublab/errors.hpp"
#include "sublab/harness.hpp"
#include "sublab/inequalities.hpp"
#include "sublab/random_instances.hpp"
#include "test_util.hpp"

using namespace sublab;

namespace {
DistributionFamily rademacher_family(double a) {
    return DistributionFamily{StepDistribution::rademacher(a)};
}

DistributionFamily uncertain(double lo, double hi) {
    return {StepDistribution::rademacher(lo), StepDistribution::rademacher(hi)};
}

ArrayBuilder scaled_iid(const DistributionFamily& base) {
    return [base](int n) {
        return KernelArray::iid(n, base.scaled(1.0 / std::sqrt(static_cast<double>(n))));
    };
}
} // namespace

TEST_CASE("lindeberg condition sums") {
    const int n = 16;
    const double root = std::sqrt(static_cast<double>(n));

    const KernelArray classical = KernelArray::iid(n, rademacher_family(1.0 / root));
    const LindebergReport r1 = lindeberg_conditions(classical, {1.0}, 1.0, 1.0);
    CHECK(r1.truncation_sums[0].second == 0.0);
    CHECK(r1.rho_gap == doctest::Approx(0.0));
    CHECK(r1.mean_sum == 0.0);
    CHECK_FALSE(r1.worst_state);

    const KernelArray band = KernelArray::iid(n, uncertain(0.5 / root, 1.0 / root));
    const LindebergReport r2 = lindeberg_conditions(band, {1.0}, 1.0, 0.25);
    CHECK(r2.r_gap == doctest::Approx(0.0));
    CHECK(r2.var_sum_upper == doctest::Approx(1.0));

    const KernelArray drift =
        KernelArray::iid(1, DistributionFamily{StepDistribution::point_mass(0.3)});
    const LindebergReport r3 = lindeberg_conditions(drift, {1.0}, 0.0, 1.0);
    CHECK(r3.mean_sum == doctest::Approx(0.6));

    CHECK_THROWS_AS(lindeberg_conditions(drift, {0.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("lindeberg worst state over a state-dependent kernel") {
    // wider distribution after an up-move: the worst state drives the sums
    auto kernel = [](int, double s) {
        return DistributionFamily{StepDistribution::rademacher(s > 0.0 ? 1.0 : 0.5)};
    };
    const KernelArray arr = KernelArray::state_dependent(2, kernel, 1.0);
    const LindebergReport rep = lindeberg_conditions(arr, {0.1}, 0.0, 1.0);
    CHECK(rep.worst_state);
    // step 1 at state 0 gives 0.25; step 2's worst reachable state gives 1
    CHECK(rep.var_sum_upper == doctest::Approx(0.25 + 1.0));
}

TEST_CASE("classical positive-part gaps follow the binomial oracle") {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const TestFunction phi = TestFunction::positive_part_clipped(8.0);
    const ConvergenceTable table = clt_gap(scaled_iid(rademacher_family(1.0)), phi,
                                           {4, 16, 64}, 1.0, GCoefficients(1.0, 1.0), policy);
    REQUIRE(table.rows.size() == 3);
    for (const ConvergenceRow& row : table.rows) {
        const double oracle = test_util::binomial_walk_expect(
            row.n, [](double s) { return s > 0.0 ? s : 0.0; });
        CHECK(row.prelimit == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(table.rows[0].prelimit == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(table.rows[1].prelimit == doctest::Approx(0.39276123046875).epsilon(1e-12));
    CHECK(table.rows[2].prelimit == doctest::Approx(0.3973870149918676).epsilon(1e-9));
    CHECK(table.rows[2].gap < table.rows[0].gap);
}

TEST_CASE("uncertain-variance gaps shrink towards the band limit") {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const TestFunction phi = TestFunction::positive_part_clipped(8.0);
    const ConvergenceTable table =
        clt_gap(scaled_iid(uncertain(0.5, 1.0)), phi, {4, 16, 64}, 1.0,
                GCoefficients(0.25, 1.0), policy);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[1].gap <= table.rows[0].gap);
    CHECK(table.rows[2].gap <= table.rows[1].gap);
    CHECK(table.rows[2].gap <= 0.5 * table.rows[0].gap);
}

TEST_CASE("square test functions give exact variance on both sides") {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const TestFunction phi = TestFunction::clipped_power(2, 8.0);
    const ConvergenceTable table = clt_gap(scaled_iid(rademacher_family(1.0)), phi, {4, 16},
                                           1.0, GCoefficients(1.0, 1.0), policy);
    for (const ConvergenceRow& row : table.rows) {
        CHECK(row.prelimit == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.gap < 2e-3);
    }
}

TEST_CASE("weighted sums") {
    const DistributionFamily base = rademacher_family(1.0);

    const WeightedArray w1 = weighted_sum_array({0.5, 0.5, 0.5, 0.5}, base);
    CHECK(w1.max_abs_weight == doctest::Approx(0.5));
    CHECK(w1.weight_sq_sum == doctest::Approx(1.0));

    // equal weights 1/sqrt(n) reproduce the scaled i.i.d. array
    {
        const TestFunction phi = TestFunction::positive_part_clipped(8.0);
        const Grid g = Grid::symmetric(3.0, 1.0 / 64);
        const KernelArray iid = KernelArray::iid(4, base.scaled(0.5));
        CHECK(dp_sum_expect(w1.array, phi, g) == dp_sum_expect(iid, phi, g));
    }

    // degenerate weights: the sum is just the base variable
    const WeightedArray w2 = weighted_sum_array({1.0, 0.0, 0.0}, base);
    const TestFunction phi = TestFunction::clipped_power(2, 8.0);
    const Grid g = Grid::symmetric(4.0, 0.125);
    CHECK(dp_sum_expect(w2.array, phi, g) == doctest::Approx(1.0).epsilon(1e-9));

    // moving-average coefficients
    const std::vector<double> ma = moving_average_weights({1.0, 1.0}, 4);
    REQUIRE(ma.size() == 5);
    CHECK(ma[0] == doctest::Approx(0.5));
    CHECK(ma[1] == doctest::Approx(1.0));
    CHECK(ma[2] == doctest::Approx(1.0));
    CHECK(ma[3] == doctest::Approx(1.0));
    CHECK(ma[4] == doctest::Approx(0.5));
    const WeightedArray w3 = weighted_sum_array(ma, base);
    CHECK(w3.weight_sq_sum == doctest::Approx(3.5).epsilon(1e-12));

    // permutation of the weights leaves the classical value unchanged
    const WeightedArray fwd = weighted_sum_array({0.5, 1.0, 0.25}, base);
    const WeightedArray rev = weighted_sum_array({0.25, 1.0, 0.5}, base);
    const Grid g2 = Grid::symmetric(3.0, 1.0 / 64);
    CHECK(dp_sum_expect(fwd.array, phi, g2) ==
          doctest::Approx(dp_sum_expect(rev.array, phi, g2)).epsilon(1e-9));
}

TEST_CASE("suffix-maximum second-moment bound") {
    const KernelArray one = KernelArray::iid(1, rademacher_family(1.0));
    const InequalityReport rep = rosenthal_check(one, 2.0, RosenthalVariant::SuffixSquared);
    CHECK(rep.lhs == doctest::Approx(0.5));
    CHECK(rep.rhs == doctest::Approx(1.0));
    CHECK(rep.slack >= 0.0);

    const KernelArray still =
        KernelArray::iid(3, DistributionFamily{StepDistribution::point_mass(0.0)});
    const InequalityReport rep2 = rosenthal_check(still, 2.0, RosenthalVariant::SuffixSquared);
    CHECK(rep2.lhs == 0.0);
    CHECK(rep2.rhs == 0.0);

    const KernelArray drifting =
        KernelArray::iid(1, DistributionFamily{StepDistribution::point_mass(0.2)});
    CHECK_THROWS_AS(rosenthal_check(drifting, 2.0, RosenthalVariant::SuffixSquared),
                    InvalidInstanceError);
}

TEST_CASE("maximum second-moment bound with the fixed constant") {
    const KernelArray one = KernelArray::iid(1, rademacher_family(1.0));
    const InequalityReport rep = rosenthal_check(one, 2.0, RosenthalVariant::MaxSquared);
    CHECK(rep.lhs == doctest::Approx(1.0));
    CHECK(rep.rhs == doctest::Approx(256.0));
}

TEST_CASE("independent-steps maximum bound") {
    const std::vector<DistributionFamily> fams(2, rademacher_family(1.0));
    const InequalityReport rep = independent_rosenthal_check(fams, 2.0, 8.0);
    CHECK(rep.lhs == doctest::Approx(2.5));
    CHECK(rep.rhs == doctest::Approx(32.0));

    const std::vector<DistributionFamily> zero{
        DistributionFamily{StepDistribution::point_mass(0.0)}};
    const InequalityReport rep2 = independent_rosenthal_check(zero, 2.0, 8.0);
    CHECK(rep2.lhs == 0.0);
    CHECK(rep2.rhs == 0.0);
}

TEST_CASE("seeded batches never violate the moment bounds") {
    Rng rng(20240601);
    InstanceCaps caps;
    caps.max_steps = 5;

    for (int i = 0; i < 60; ++i) {
        caps.nonpositive_mean = true;
        const InequalityReport suffix =
            rosenthal_check(random_kernel_array(rng, caps), 2.0, RosenthalVariant::SuffixSquared);
        CHECK(suffix.slack >= -1e-9);

        caps.nonpositive_mean = false;
        const InequalityReport maxsq =
            rosenthal_check(random_kernel_array(rng, caps), 2.0, RosenthalVariant::MaxSquared);
        CHECK(maxsq.slack >= -1e-9);

        const InequalityReport maxp =
            rosenthal_check(random_kernel_array(rng, caps), 3.0, RosenthalVariant::MaxPower);
        CHECK(maxp.slack >= -1e-9);

        const int n = rng.uniform_int(1, 5);
        std::vector<DistributionFamily> fams;
        for (int k = 0; k < n; ++k) fams.push_back(random_family(rng, caps));
        const InequalityReport indep = independent_rosenthal_check(fams, 2.0, 8.0);
        CHECK(indep.slack >= -1e-9);
    }
}

TEST_CASE("closed-form exponential bound") {
    CHECK(exponential_bound_value(1.0, 1.0, 1.0) ==
          doctest::Approx(0.6938326193250071).epsilon(1e-12));
    CHECK(exponential_bound_value(1.0, 1.0, 1e9) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(exponential_bound_value(200.0, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(exponential_bound_value(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("exponential tail bound in the specialised regime") {
    const KernelArray walk = KernelArray::iid(2, rademacher_family(1.0));
    const InequalityReport rep = exponential_inequality_check(walk, 2.0, 1.5);
    CHECK(rep.lhs == doctest::Approx(0.25));
    CHECK(rep.rhs == doctest::Approx(0.5250067311857887).epsilon(1e-12));
    CHECK(rep.slack > 0.0);

    const KernelArray still =
        KernelArray::iid(2, DistributionFamily{StepDistribution::point_mass(0.0)});
    const InequalityReport rep2 = exponential_inequality_check(still, 1.0, 0.5);
    CHECK(rep2.lhs == 0.0);
    CHECK(rep2.rhs == 0.0);

    // atoms reaching y violate the specialisation
    CHECK_THROWS_AS(exponential_inequality_check(walk, 2.0, 1.0), InvalidInstanceError);
    // positive upper means violate it too
    const KernelArray drift =
        KernelArray::iid(2, DistributionFamily{StepDistribution::point_mass(0.2)});
    CHECK_THROWS_AS(exponential_inequality_check(drift, 1.0, 0.5), InvalidInstanceError);
}

TEST_CASE("worst path variance accumulates the widest member") {
    auto kernel = [](int, double s) {
        return DistributionFamily{StepDistribution::rademacher(s > 0.0 ? 1.0 : 0.5)};
    };
    const KernelArray arr = KernelArray::state_dependent(2, kernel, 1.0);
    CHECK(worst_path_variance(arr) == doctest::Approx(0.25 + 1.0));
}

TEST_CASE("functional gaps: terminal kind coincides with the sum table") {
    GridPolicy policy;
    policy.dx = 1.0 / 32;
    const TestFunction phi = TestFunction::positive_part_clipped(8.0);
    const ConvergenceTable direct = clt_gap(scaled_iid(rademacher_family(1.0)), phi, {4, 16},
                                            1.0, GCoefficients(1.0, 1.0), policy);
    const ConvergenceTable via_path =
        fclt_gap(scaled_iid(rademacher_family(1.0)), PathFunctional::terminal(phi), {4, 16},
                 1.0, GCoefficients(1.0, 1.0), policy);
    REQUIRE(direct.rows.size() == via_path.rows.size());
    for (std::size_t i = 0; i < direct.rows.size(); ++i) {
        CHECK(direct.rows[i].prelimit == via_path.rows[i].prelimit);
        CHECK(direct.rows[i].limit == via_path.rows[i].limit);
    }
}

TEST_CASE("skeleton gaps shrink for the classical walk") {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const TestFunction clip1 = TestFunction::identity_clipped(1.0);
    const PathFunctional f = PathFunctional::skeleton({0.5, 1.0}, {clip1, clip1});
    const ConvergenceTable table = fclt_gap(scaled_iid(rademacher_family(1.0)), f, {4, 16},
                                            1.0, GCoefficients(1.0, 1.0), policy);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].gap < table.rows[0].gap);
}

TEST_CASE("running-max prelimits are Cauchy along dyadic n") {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const TestFunction phi = TestFunction::identity_clipped(8.0);
    const ConvergenceTable table =
        fclt_gap(scaled_iid(uncertain(0.5, 1.0)), PathFunctional::running_max(phi),
                 {8, 16, 32, 64}, 1.0, GCoefficients(0.25, 1.0), policy);
    REQUIRE(table.rows.size() == 4);
    CHECK(std::isnan(table.rows[0].gap));
    for (std::size_t i = 1; i < 4; ++i) CHECK(table.rows[i].gap > 0.0);
    CHECK(table.rows[3].gap < table.rows[1].gap);
}

TEST_CASE("demo process has exact per-step statistics") {
    const GCoefficients g(0.25, 1.0);
    for (int n : {4, 16}) {
        const KernelArray arr = KernelArray::iid(n, levy_step_family(g, n));
        const StepStats st = conditional_step_stats(arr, 1);
        CHECK(st.mean_upper == 0.0);
        CHECK(st.mean_lower == 0.0);
        CHECK(st.var_upper * n == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(st.var_lower * n == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("demo process marginals approach the band law") {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    SUBCASE("classical band is exact for the square") {
        const std::vector<ConvergenceTable> tables =
            levy_demo(GCoefficients(1.0, 1.0), {4, 16},
                      {TestFunction::clipped_power(2, 8.0)}, policy);
        for (const ConvergenceRow& row : tables.front().rows) CHECK(row.gap < 2e-3);
    }
    SUBCASE("uncertain band gaps shrink") {
        const std::vector<ConvergenceTable> tables =
            levy_demo(GCoefficients(0.25, 1.0), {4, 16, 64},
                      {TestFunction::positive_part_clipped(8.0)}, policy);
        const auto& rows = tables.front().rows;
        CHECK(rows.back().gap < rows.front().gap);
    }
}

TEST_CASE("the scaling contradiction is tau-independent") {
    // sqrt(1 + 36) * lower(tau) > upper(tau) for every band floor: both
    // endpoints carry the same (1 - tau) factor
    for (double tau : {0.1, 0.25, 0.5}) {
        const auto [lo, hi] = g_third_moment_bounds(tau);
        CHECK(std::sqrt(1.0 + 36.0) * lo > hi);
    }
}

TEST_CASE("third-moment counterexample at desk resolution") {
    CounterexampleConfig cfg;
    cfg.dx = 0.05;
    cfg.dx_compose = 0.1;
    cfg.composition_tol = 0.1;
    const CounterexampleReport rep = counterexample_check(0.25, 6.0, cfg);
    CHECK(rep.within_bounds);
    CHECK(rep.composition_consistent);
    CHECK(rep.contradiction_holds);
    CHECK(rep.consistent);
    CHECK(rep.third_moment_xi >= rep.bound_lower - cfg.bounds_tol);
    CHECK(rep.third_moment_xi <= rep.bound_upper + cfg.bounds_tol);
    // sqrt(37) (2 - sqrt 2) > 2 + sqrt 2 certifies the contradiction
    CHECK(rep.scaled_lower_bound > rep.bound_upper);

    // closing the band kills the third moment
    CounterexampleConfig fast;
    fast.dx = 0.05;
    fast.dx_compose = 0.2;
    fast.composition_tol = 0.2;
    const CounterexampleReport tight = counterexample_check(0.999, 1.0, fast);
    CHECK(std::fabs(tight.third_moment_xi) < 0.02);
}
