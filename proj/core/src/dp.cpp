#include "sublab/dp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sublab/errors.hpp"

namespace sublab {

namespace {

void check_reach(const KernelArray& arr, const Grid& grid) {
    const double reach = arr.n_steps() * arr.c_max();
    if (grid.lo > -reach + 1e-12 || grid.hi < reach - 1e-12)
        throw DomainOverflowError("dp: grid does not cover the reachable set");
}

// One-step expectation of the next value function under one member,
// anchored at the first child so a constant next slice stays constant
// exactly.
double member_step(const ValueFunction& next, double s, const StepDistribution& d) {
    const std::vector<Atom>& atoms = d.atoms();
    const double ref = next(s + atoms.front().point);
    double acc = 0.0;
    for (const Atom& a : atoms) acc += a.weight * (next(s + a.point) - ref);
    return ref + acc;
}

ValueFunction dp_step_upper(const KernelArray& arr, int k, const ValueFunction& next) {
    const Grid& g = next.grid();
    std::vector<double> out(static_cast<std::size_t>(g.n_points));
    if (arr.is_state_dependent()) {
        for (int j = 0; j < g.n_points; ++j) {
            const double s = g.point(j);
            const DistributionFamily fam = arr.step_at(k, s);
            double best = -HUGE_VAL;
            for (const StepDistribution& d : fam.members())
                best = std::max(best, member_step(next, s, d));
            out[static_cast<std::size_t>(j)] = best;
        }
    } else {
        const DistributionFamily& fam = arr.step(k);
        for (int j = 0; j < g.n_points; ++j) {
            const double s = g.point(j);
            double best = -HUGE_VAL;
            for (const StepDistribution& d : fam.members())
                best = std::max(best, member_step(next, s, d));
            out[static_cast<std::size_t>(j)] = best;
        }
    }
    return ValueFunction(g, std::move(out));
}

ValueFunction dp_step_lower(const KernelArray& arr, int k, const ValueFunction& next) {
    const Grid& g = next.grid();
    std::vector<double> out(static_cast<std::size_t>(g.n_points));
    if (arr.is_state_dependent()) {
        for (int j = 0; j < g.n_points; ++j) {
            const double s = g.point(j);
            const DistributionFamily fam = arr.step_at(k, s);
            double worst = HUGE_VAL;
            for (const StepDistribution& d : fam.members())
                worst = std::min(worst, member_step(next, s, d));
            out[static_cast<std::size_t>(j)] = worst;
        }
    } else {
        const DistributionFamily& fam = arr.step(k);
        for (int j = 0; j < g.n_points; ++j) {
            const double s = g.point(j);
            double worst = HUGE_VAL;
            for (const StepDistribution& d : fam.members())
                worst = std::min(worst, member_step(next, s, d));
            out[static_cast<std::size_t>(j)] = worst;
        }
    }
    return ValueFunction(g, std::move(out));
}

// --- running max ------------------------------------------------------

// Rectangular (sum, max) table on the sum grid x the nonnegative part of
// the sum grid, bilinear interpolation with clamping.
struct MaxTable {
    Grid sum_grid;
    int m_offset;   // index of the first sum node >= 0
    int n_m;        // number of max nodes
    std::vector<double> v; // row-major: [sum index][max index]

    explicit MaxTable(const Grid& g)
        : sum_grid(g), m_offset(0), n_m(0),
          v() {
        while (m_offset < g.n_points && g.point(m_offset) < -1e-12) ++m_offset;
        n_m = g.n_points - m_offset;
        if (n_m < 2) throw DomainOverflowError("dp running max: grid has no room above 0");
        v.assign(static_cast<std::size_t>(g.n_points) * n_m, 0.0);
    }

    double& at(int j, int i) { return v[static_cast<std::size_t>(j) * n_m + i]; }
    double at(int j, int i) const { return v[static_cast<std::size_t>(j) * n_m + i]; }
    double m_point(int i) const { return sum_grid.point(m_offset + i); }

    double eval(double s, double m) const {
        const double dx = sum_grid.dx();
        double us = (s - sum_grid.lo) / dx;
        double um = (m - m_point(0)) / dx;
        us = std::clamp(us, 0.0, static_cast<double>(sum_grid.n_points - 1));
        um = std::clamp(um, 0.0, static_cast<double>(n_m - 1));
        int j = std::min(static_cast<int>(us), sum_grid.n_points - 2);
        int i = std::min(static_cast<int>(um), n_m - 2);
        const double ts = us - j;
        const double tm = um - i;
        const double a = at(j, i), b = at(j + 1, i), c = at(j, i + 1), d = at(j + 1, i + 1);
        return a + ts * (b - a) + tm * (c - a) + ts * tm * (a - b - c + d);
    }
};

double dp_running_max(const KernelArray& arr, const TestFunction& phi, const Grid& grid) {
    check_reach(arr, grid);
    MaxTable cur(grid);
    for (int j = 0; j < grid.n_points; ++j)
        for (int i = 0; i < cur.n_m; ++i) cur.at(j, i) = phi(cur.m_point(i));

    for (int k = arr.n_steps(); k >= 1; --k) {
        MaxTable prev(grid);
        const DistributionFamily* constant_fam =
            arr.is_state_dependent() ? nullptr : &arr.step(k);
        for (int j = 0; j < grid.n_points; ++j) {
            const double s = grid.point(j);
            std::optional<DistributionFamily> state_fam;
            if (!constant_fam) state_fam.emplace(arr.step_at(k, s));
            const DistributionFamily& fam = constant_fam ? *constant_fam : *state_fam;
            for (int i = 0; i < prev.n_m; ++i) {
                const double m = prev.m_point(i);
                double best = -HUGE_VAL;
                for (const StepDistribution& d : fam.members()) {
                    const std::vector<Atom>& atoms = d.atoms();
                    const double s0 = s + atoms.front().point;
                    const double ref = cur.eval(s0, std::max(m, s0));
                    double acc = 0.0;
                    for (const Atom& a : atoms) {
                        const double sn = s + a.point;
                        acc += a.weight * (cur.eval(sn, std::max(m, sn)) - ref);
                    }
                    best = std::max(best, ref + acc);
                }
                prev.at(j, i) = best;
            }
        }
        cur = std::move(prev);
    }
    return cur.eval(0.0, 0.0);
}

// --- skeleton (product form) -------------------------------------------

void apply_record(const TestFunction& phi, const Grid& g, std::vector<double>& upper,
                  std::vector<double>& lower) {
    for (int j = 0; j < g.n_points; ++j) {
        const double c = phi(g.point(j));
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
}

double dp_skeleton(const KernelArray& arr, const PathFunctional& f, const Grid& grid) {
    check_reach(arr, grid);
    const int n = arr.n_steps();
    std::vector<int> record(f.times().size());
    for (std::size_t i = 0; i < record.size(); ++i) record[i] = f.record_step(i, n);

    ValueFunction upper(grid, std::vector<double>(static_cast<std::size_t>(grid.n_points), 1.0));
    ValueFunction lower = upper;
    for (int k = n; k >= 1; --k) {
        for (std::size_t i = record.size(); i-- > 0;) {
            if (record[i] == k)
                apply_record(f.components()[i], grid, upper.values(), lower.values());
        }
        ValueFunction next_upper = dp_step_upper(arr, k, upper);
        lower = dp_step_lower(arr, k, lower);
        upper = std::move(next_upper);
    }
    return upper(0.0);
}

} // namespace

double dp_sum_expect(const KernelArray& arr, const TestFunction& phi, const Grid& grid) {
    check_reach(arr, grid);
    ValueFunction u = ValueFunction::sample(grid, phi);
    for (int k = arr.n_steps(); k >= 1; --k) u = dp_step_upper(arr, k, u);
    return u(0.0);
}

double dp_path_expect(const KernelArray& arr, const PathFunctional& functional,
                      const Grid& grid) {
    switch (functional.kind()) {
    case PathFunctional::Kind::Terminal:
        return dp_sum_expect(arr, functional.phi(), grid);
    case PathFunctional::Kind::RunningMax:
        return dp_running_max(arr, functional.phi(), grid);
    case PathFunctional::Kind::Skeleton:
        return dp_skeleton(arr, functional, grid);
    }
    throw std::logic_error("dp_path_expect: unreachable");
}

StepStats conditional_step_stats(const KernelArray& arr, int k, double state) {
    DistributionFamily fam = arr.step_at(k, state);
    StepStats st{
        expect_fn(fam, [](double z) { return z; }),
        conjugate_expect_fn(fam, [](double z) { return z; }),
        expect_fn(fam, [](double z) { return z * z; }),
        conjugate_expect_fn(fam, [](double z) { return z * z; }),
        std::move(fam),
    };
    return st;
}

} // namespace sublab
