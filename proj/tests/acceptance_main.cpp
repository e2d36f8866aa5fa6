// Acceptance suite: one check per release criterion, one line of output
// per criterion, nonzero exit code when any fails. Tolerances are fixed
// here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sublab/dp.hpp"
#include "sublab/expectation.hpp"
#include "sublab/g_heat.hpp"
#include "sublab/harness.hpp"
#include "sublab/inequalities.hpp"
#include "sublab/random_instances.hpp"
#include "sublab/scenario.hpp"
#include "sublab/tree_oracle.hpp"

using namespace sublab;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int number, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// 1. positive part of a G-normal variable, three band floors, dx = 0.02
void criterion_positive_part() {
    const double target = 0.3989422804014327;
    const TestFunction phi = TestFunction::positive_part_clipped(8.0);
    const HeatSolveConfig cfg{Grid::symmetric(15.0, 0.02), 0.5};
    bool ok = true;
    double worst_gap = 0.0, worst_time = 0.0;
    for (double r : {0.0, 0.25, 1.0}) {
        Timer t;
        const double v = g_normal_expect(phi, 1.0, GCoefficients(r, 1.0), cfg);
        worst_time = std::max(worst_time, t.seconds());
        worst_gap = std::max(worst_gap, std::fabs(v - target));
        ok = ok && std::fabs(v - target) <= 2e-3 && t.seconds() < 10.0;
    }
    report(1, "G-normal positive part = (2 pi)^{-1/2}", ok,
           "max |gap| = " + fmt(worst_gap) + " <= 2e-3, slowest solve " + fmt(worst_time) +
               " s");
}

// 2. second and first absolute moments at the upper variance
void criterion_moments() {
    const GCoefficients g(0.25, 1.0);
    const HeatSolveConfig cfg{Grid::symmetric(15.0, 0.02), 0.5};
    const double second = g_normal_expect(TestFunction::clipped_power(2, 8.0), 1.0, g, cfg);
    const double first = g_normal_expect(TestFunction::abs_clipped(8.0), 1.0, g, cfg);
    const double target1 = std::sqrt(2.0 / M_PI);
    const bool ok = std::fabs(second - 1.0) <= 0.01 && std::fabs(first - target1) <= 0.01 * target1;
    report(2, "G-normal moments track the upper variance", ok,
           "E[x^2] = " + fmt(second) + " vs 1, E|x| = " + fmt(first) + " vs " + fmt(target1));
}

// 3. third-moment band and the |a| = 6 contradiction
void criterion_third_moment() {
    CounterexampleConfig cfg; // dx = 0.02 for the single-variable solve
    const CounterexampleReport rep = counterexample_check(0.25, 6.0, cfg);
    const auto [lo, hi] = g_third_moment_bounds(0.25);
    const bool in_band = rep.third_moment_xi >= lo - 0.02 && rep.third_moment_xi <= hi + 0.02;
    const bool ok = in_band && rep.contradiction_holds && rep.consistent;
    report(3, "third-moment band and non-G-normality of the sum", ok,
           "E[x^3] = " + fmt(rep.third_moment_xi) + " in [" + fmt(lo) + ", " + fmt(hi) +
               "] +- 0.02, certificate margin " +
               fmt(rep.scaled_lower_bound - rep.bound_upper));
}

// 4. grid recursion vs exact tree on 200 lattice instances
void criterion_oracle_equivalence() {
    Timer t;
    Rng rng(424242);
    InstanceCaps caps;
    caps.max_steps = 6;
    caps.max_atoms = 3;
    caps.max_members = 3;
    caps.on_grid_dx = 0.125;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const KernelArray arr = random_kernel_array(rng, caps);
        const TestFunction phi = TestFunction::clipped_abs_power(1.5, 16.0, 8);
        const Grid g = Grid::symmetric(arr.n_steps() * arr.c_max() + 1.0, 0.125);
        const double dp = dp_sum_expect(arr, phi, g);
        const double exact = tree_expect_exact(arr, PathFunctional::terminal(phi));
        worst = std::max(worst, std::fabs(dp - exact));
    }
    const bool ok = worst <= 1e-6 && t.seconds() < 60.0;
    report(4, "backward induction matches the exact tree", ok,
           "200 instances, max |difference| = " + fmt(worst) + ", " + fmt(t.seconds()) + " s");
}

// 5. uncertain-variance convergence, nonincreasing and halved by n = 64
void criterion_clt_convergence() {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const DistributionFamily base{StepDistribution::rademacher(0.5),
                                  StepDistribution::rademacher(1.0)};
    const ConvergenceTable table = clt_gap(
        [&base](int n) {
            return KernelArray::iid(n, base.scaled(1.0 / std::sqrt(static_cast<double>(n))));
        },
        TestFunction::positive_part_clipped(8.0), {4, 16, 64}, 1.0, GCoefficients(0.25, 1.0),
        policy);
    const bool mono = table.rows[1].gap <= table.rows[0].gap &&
                      table.rows[2].gap <= table.rows[1].gap;
    const bool halved = table.rows[2].gap <= 0.5 * table.rows[0].gap;
    report(5, "uncertain-variance gaps shrink towards the band limit", mono && halved,
           "gaps " + fmt(table.rows[0].gap) + " >= " + fmt(table.rows[1].gap) +
               " >= " + fmt(table.rows[2].gap) + ", final <= half of first");
}

// 6. moment-bound batches: suffix form, constant-256 form, independent form
void criterion_rosenthal_batches() {
    Timer t;
    double min_slack = HUGE_VAL;
    long violations = 0;

    Rng rng_suffix(1001);
    InstanceCaps caps;
    caps.max_steps = 5;
    caps.max_atoms = 3;
    caps.max_members = 3;
    caps.nonpositive_mean = true;
    for (int i = 0; i < 100; ++i) {
        const InequalityReport rep = rosenthal_check(random_kernel_array(rng_suffix, caps),
                                                     2.0, RosenthalVariant::SuffixSquared);
        min_slack = std::min(min_slack, rep.slack);
        if (rep.slack < -1e-9) ++violations;
    }

    Rng rng_max(1002);
    caps.nonpositive_mean = false;
    for (int i = 0; i < 100; ++i) {
        const InequalityReport rep = rosenthal_check(random_kernel_array(rng_max, caps), 2.0,
                                                     RosenthalVariant::MaxSquared);
        min_slack = std::min(min_slack, rep.slack);
        if (rep.slack < -1e-9) ++violations;
    }

    Rng rng_indep(1003);
    for (int i = 0; i < 100; ++i) {
        const int n = rng_indep.uniform_int(1, 5);
        std::vector<DistributionFamily> fams;
        for (int k = 0; k < n; ++k) fams.push_back(random_family(rng_indep, caps));
        const InequalityReport rep = independent_rosenthal_check(fams, 2.0, 8.0);
        min_slack = std::min(min_slack, rep.slack);
        if (rep.slack < -1e-9) ++violations;
    }

    const bool ok = violations == 0 && t.seconds() < 120.0;
    report(6, "moment bounds hold on 300 seeded instances", ok,
           "violations = " + std::to_string(violations) + ", min slack = " + fmt(min_slack) +
               ", " + fmt(t.seconds()) + " s");
}

// 7. exponential tail bound on 100 seeded instances
void criterion_exponential_batch() {
    Rng rng(1004);
    InstanceCaps caps;
    caps.max_steps = 5;
    caps.max_atoms = 3;
    caps.max_members = 3;
    caps.nonpositive_mean = true;
    double min_slack = HUGE_VAL;
    long violations = 0;
    for (int i = 0; i < 100; ++i) {
        const KernelArray arr = random_kernel_array(rng, caps);
        const double y = arr.c_max() * 1.3 + 0.05;
        const double A = worst_path_variance(arr);
        const double target = rng.uniform(0.4, 1.8) * std::max(std::sqrt(A), 0.1);
        const std::vector<double> sums = reachable_states(arr).back();
        double x = target, width = 1e-6;
        const auto it = std::lower_bound(sums.begin(), sums.end(), target);
        if (it == sums.end() || it == sums.begin()) {
            x = std::max(sums.back() + 0.5, 0.1);
        } else {
            const double gap_len = *it - *(it - 1);
            x = 0.5 * (*it + *(it - 1));
            width = std::min(width, 0.25 * gap_len);
            if (x <= 0.0) x = std::max(sums.back() + 0.5, 0.1);
        }
        const InequalityReport rep = exponential_inequality_check(arr, x, y, width);
        min_slack = std::min(min_slack, rep.slack);
        if (rep.slack < -1e-9) ++violations;
    }
    report(7, "exponential tail bound holds on 100 seeded instances", violations == 0,
           "violations = " + std::to_string(violations) + ", min slack = " + fmt(min_slack));
}

// 8. functional axioms on 1000 random draws each
void criterion_axiom_suite() {
    Rng rng(1005);
    InstanceCaps caps;
    caps.max_atoms = 4;
    caps.max_members = 3;
    caps.scale = 3.0;
    long violations = 0;
    double min_margin = HUGE_VAL;

    auto random_pl = [&rng](bool nonneg) {
        const int k = rng.uniform_int(3, 6);
        std::vector<double> xs;
        while (static_cast<int>(xs.size()) < k) {
            const double x = rng.uniform(-4.0, 4.0);
            bool dup = false;
            for (double e : xs) dup = dup || std::fabs(e - x) < 1e-6;
            if (!dup) xs.push_back(x);
        }
        std::sort(xs.begin(), xs.end());
        std::vector<double> vs(xs.size());
        for (double& v : vs) v = nonneg ? rng.uniform(0.0, 5.0) : rng.uniform(-5.0, 5.0);
        return TestFunction(xs, vs);
    };

    auto tally = [&](double margin) {
        min_margin = std::min(min_margin, margin);
        if (margin < -1e-9) ++violations;
    };

    for (int i = 0; i < 1000; ++i) {
        const DistributionFamily fam = random_family(rng, caps);
        const TestFunction phi = random_pl(false);
        const TestFunction psi = random_pl(false);
        const double e_phi = expect_step(fam, phi);
        const double e_psi = expect_step(fam, psi);

        tally(expect_step(fam, phi + random_pl(true)) - e_phi); // monotonicity
        const double c = rng.uniform(-5.0, 5.0);
        tally(-std::fabs(expect_step(fam, TestFunction::constant(c)) - c));
        tally(e_phi + e_psi - expect_step(fam, phi + psi)); // sub-additivity
        const double lambda = rng.uniform(0.0, 3.0);
        tally(-std::fabs(expect_step(fam, phi.scaled(lambda)) - lambda * e_phi));
        tally(e_phi - conjugate_expect_step(fam, phi)); // conjugate dominance

        const double xy = expect_fn(fam, [&](double x) { return std::fabs(phi(x) * psi(x)); });
        const double xx = expect_fn(fam, [&](double x) { return phi(x) * phi(x); });
        const double yy = expect_fn(fam, [&](double x) { return psi(x) * psi(x); });
        tally(std::sqrt(xx) * std::sqrt(yy) - xy); // p = q = 2 bound
    }
    report(8, "axiom suite: 1000 randomized checks per property", violations == 0,
           "violations = " + std::to_string(violations) +
               ", min margin = " + fmt(min_margin));
}

// 9. functional convergence: skeleton gap shrinks, running-max gaps Cauchy
void criterion_functional_convergence() {
    GridPolicy policy;
    policy.dx = 1.0 / 64;
    const DistributionFamily classical{StepDistribution::rademacher(1.0)};
    auto classical_builder = [&classical](int n) {
        return KernelArray::iid(n, classical.scaled(1.0 / std::sqrt(static_cast<double>(n))));
    };

    const TestFunction clip1 = TestFunction::identity_clipped(1.0);
    const ConvergenceTable skel =
        fclt_gap(classical_builder, PathFunctional::skeleton({0.5, 1.0}, {clip1, clip1}),
                 {4, 16, 64}, 1.0, GCoefficients(1.0, 1.0), policy);
    const bool skel_ok = skel.rows.back().gap < skel.rows.front().gap;

    GridPolicy max_policy;
    max_policy.dx = 1.0 / 64;
    const DistributionFamily band{StepDistribution::rademacher(0.5),
                                  StepDistribution::rademacher(1.0)};
    auto band_builder = [&band](int n) {
        return KernelArray::iid(n, band.scaled(1.0 / std::sqrt(static_cast<double>(n))));
    };
    const ConvergenceTable rmax =
        fclt_gap(band_builder, PathFunctional::running_max(TestFunction::identity_clipped(8.0)),
                 {8, 16, 32, 64}, 1.0, GCoefficients(0.25, 1.0), max_policy);
    bool cauchy_ok = true;
    for (std::size_t i = 2; i < rmax.rows.size(); ++i)
        cauchy_ok = cauchy_ok && rmax.rows[i].gap < rmax.rows[i - 1].gap;

    report(9, "functional convergence (skeleton and running max)", skel_ok && cauchy_ok,
           "skeleton gap " + fmt(skel.rows.front().gap) + " -> " + fmt(skel.rows.back().gap) +
               "; Cauchy gaps " + fmt(rmax.rows[1].gap) + " > " + fmt(rmax.rows[2].gap) +
               " > " + fmt(rmax.rows[3].gap));
}

// 10. byte-identical CSV across repeated runs with a fixed seed
void criterion_determinism() {
    const char* config = R"({
      "scenarios": [
        {"id": "axioms", "kind": "axioms", "checks": 200},
        {"id": "bounds", "kind": "rosenthal", "variant": "independent",
         "p": 2.0, "c_p": 8.0, "instances": 25},
        {"id": "tail", "kind": "exponential", "instances": 25},
        {"id": "demo", "kind": "levy", "g": [0.25, 1.0], "n_list": [4, 16],
         "phis": [{"type": "pos_part", "clip": 8.0}], "dx": 0.015625}
      ]
    })";
    const std::vector<Scenario> scs = parse_scenarios_text(config);
    const std::string csv1 = to_csv(run(scs, 1, 97));
    const std::string csv2 = to_csv(run(scs, 2, 97));
    report(10, "repeated runs reproduce identical CSV bytes", csv1 == csv2,
           std::to_string(csv1.size()) + " bytes compared");
}

} // namespace

int main() {
    criterion_positive_part();
    criterion_moments();
    criterion_third_moment();
    criterion_oracle_equivalence();
    criterion_clt_convergence();
    criterion_rosenthal_batches();
    criterion_exponential_batch();
    criterion_axiom_suite();
    criterion_functional_convergence();
    criterion_determinism();
    if (g_failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
