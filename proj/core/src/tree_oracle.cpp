#include "sublab/tree_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "sublab/errors.hpp"

namespace sublab {

namespace {

void check_caps(const KernelArray& arr, const TreeCaps& caps) {
    if (arr.n_steps() > caps.max_steps)
        throw TooLargeError("tree oracle: too many steps");
    // For state-dependent kernels the widths are checked as nodes are
    // expanded; constant kernels are checked up front.
    if (!arr.is_state_dependent()) {
        for (int k = 1; k <= arr.n_steps(); ++k) {
            const DistributionFamily& fam = arr.step(k);
            if (static_cast<int>(fam.size()) > caps.max_members)
                throw TooLargeError("tree oracle: too many family members");
            for (const StepDistribution& d : fam.members())
                if (static_cast<int>(d.atoms().size()) > caps.max_atoms)
                    throw TooLargeError("tree oracle: too many atoms");
        }
    }
}

void check_family(const DistributionFamily& fam, const TreeCaps& caps) {
    if (static_cast<int>(fam.size()) > caps.max_members)
        throw TooLargeError("tree oracle: too many family members");
    for (const StepDistribution& d : fam.members())
        if (static_cast<int>(d.atoms().size()) > caps.max_atoms)
            throw TooLargeError("tree oracle: too many atoms");
}

double recurse(const KernelArray& arr, const TreeCaps& caps, int k, double state,
               std::vector<double>& path,
               const std::function<double(const std::vector<double>&)>& leaf) {
    if (k > arr.n_steps()) return leaf(path);
    const DistributionFamily fam = arr.step_at(k, state);
    if (arr.is_state_dependent()) check_family(fam, caps);
    double best = -HUGE_VAL;
    for (const StepDistribution& d : fam.members()) {
        double acc = 0.0;
        for (const Atom& a : d.atoms()) {
            path.push_back(a.point);
            acc += a.weight * recurse(arr, caps, k + 1, state + a.point, path, leaf);
            path.pop_back();
        }
        best = std::max(best, acc);
    }
    return best;
}

} // namespace

double tree_expect_path(const KernelArray& arr,
                        const std::function<double(const std::vector<double>&)>& leaf,
                        const TreeCaps& caps) {
    check_caps(arr, caps);
    std::vector<double> path;
    path.reserve(static_cast<std::size_t>(arr.n_steps()));
    return recurse(arr, caps, 1, 0.0, path, leaf);
}

double tree_expect_exact(const KernelArray& arr, const PathFunctional& functional,
                         const TreeCaps& caps) {
    const int n = arr.n_steps();
    switch (functional.kind()) {
    case PathFunctional::Kind::Terminal: {
        const TestFunction& phi = functional.phi();
        return tree_expect_path(
            arr,
            [&phi](const std::vector<double>& incs) {
                double s = 0.0;
                for (double z : incs) s += z;
                return phi(s);
            },
            caps);
    }
    case PathFunctional::Kind::RunningMax: {
        const TestFunction& phi = functional.phi();
        return tree_expect_path(
            arr,
            [&phi](const std::vector<double>& incs) {
                double s = 0.0, m = 0.0;
                for (double z : incs) {
                    s += z;
                    m = std::max(m, s);
                }
                return phi(m);
            },
            caps);
    }
    case PathFunctional::Kind::Skeleton: {
        std::vector<int> record(functional.times().size());
        for (std::size_t i = 0; i < record.size(); ++i)
            record[i] = functional.record_step(i, n);
        const std::vector<TestFunction>& comps = functional.components();
        return tree_expect_path(
            arr,
            [&record, &comps](const std::vector<double>& incs) {
                double s = 0.0, prod = 1.0;
                std::size_t next = 0;
                for (std::size_t k = 0; k < incs.size(); ++k) {
                    s += incs[k];
                    while (next < record.size() &&
                           record[next] == static_cast<int>(k) + 1) {
                        prod *= comps[next](s);
                        ++next;
                    }
                }
                return prod;
            },
            caps);
    }
    }
    throw std::logic_error("tree_expect_exact: unreachable");
}

std::vector<std::vector<double>> reachable_states(const KernelArray& arr,
                                                  const TreeCaps& caps) {
    check_caps(arr, caps);
    std::vector<std::vector<double>> levels;
    levels.push_back({0.0});
    for (int k = 1; k <= arr.n_steps(); ++k) {
        std::set<double> next;
        for (double s : levels.back()) {
            const DistributionFamily fam = arr.step_at(k, s);
            if (arr.is_state_dependent()) check_family(fam, caps);
            for (const StepDistribution& d : fam.members())
                for (const Atom& a : d.atoms()) next.insert(s + a.point);
        }
        if (next.size() > 200000)
            throw TooLargeError("reachable_states: state explosion");
        levels.emplace_back(next.begin(), next.end());
    }
    return levels;
}

} // namespace sublab
