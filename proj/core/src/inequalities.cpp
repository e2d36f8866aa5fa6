#include "sublab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sublab/dp.hpp"
#include "sublab/errors.hpp"
#include "sublab/expectation.hpp"
#include "sublab/path_functional.hpp"

namespace sublab {

namespace {

// Per-step conditional statistic accumulated along the realized path;
// each summand is a function of (step, state before the step) only.
template <class Stat>
double path_sum(const std::vector<double>& incs, Stat&& stat) {
    double s = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < incs.size(); ++k) {
        acc += stat(static_cast<int>(k) + 1, s);
        s += incs[k];
    }
    return acc;
}

double upper_mean(const KernelArray& arr, int k, double s) {
    return expect_fn(arr.step_at(k, s), [](double z) { return z; });
}

double lower_mean(const KernelArray& arr, int k, double s) {
    return conjugate_expect_fn(arr.step_at(k, s), [](double z) { return z; });
}

double upper_second(const KernelArray& arr, int k, double s) {
    return expect_fn(arr.step_at(k, s), [](double z) { return z * z; });
}

// sum over steps of (upper mean)^+ + (lower mean)^-
double drift_sum(const KernelArray& arr, const std::vector<double>& incs) {
    return path_sum(incs, [&arr](int k, double s) {
        return std::max(upper_mean(arr, k, s), 0.0) + std::max(-lower_mean(arr, k, s), 0.0);
    });
}

double variance_sum(const KernelArray& arr, const std::vector<double>& incs) {
    return path_sum(incs, [&arr](int k, double s) { return upper_second(arr, k, s); });
}

void require_nonpositive_upper_means(const KernelArray& arr, const TreeCaps& caps) {
    const std::vector<std::vector<double>> states = reachable_states(arr, caps);
    for (int k = 1; k <= arr.n_steps(); ++k)
        for (double s : states[static_cast<std::size_t>(k - 1)])
            if (upper_mean(arr, k, s) > 1e-12)
                throw InvalidInstanceError(
                    "rosenthal: conditional upper means must be nonpositive");
}

std::string describe(const KernelArray& arr) {
    std::ostringstream os;
    if (arr.is_state_dependent()) {
        os << "state_dependent(n=" << arr.n_steps() << ",c_max=" << arr.c_max() << ")";
        return os.str();
    }
    os << "steps[";
    for (int k = 1; k <= arr.n_steps(); ++k) {
        if (k > 1) os << ";";
        const DistributionFamily& fam = arr.step(k);
        for (std::size_t m = 0; m < fam.members().size(); ++m) {
            if (m > 0) os << "|";
            const auto& atoms = fam.members()[m].atoms();
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (i > 0) os << ",";
                os << atoms[i].point << ":" << atoms[i].weight;
            }
        }
    }
    os << "]";
    return os.str();
}

} // namespace

InequalityReport rosenthal_check(const KernelArray& arr, double p, RosenthalVariant variant,
                                 double c_p, const TreeCaps& caps) {
    InequalityReport rep;
    rep.instance = describe(arr);
    switch (variant) {
    case RosenthalVariant::SuffixSquared: {
        require_nonpositive_upper_means(arr, caps);
        rep.lhs = tree_expect_path(
            arr,
            [](const std::vector<double>& incs) {
                double s = 0.0;
                std::vector<double> partial{0.0};
                partial.reserve(incs.size() + 1);
                for (double z : incs) {
                    s += z;
                    partial.push_back(s);
                }
                double best = 0.0; // k = n term is zero
                for (double sk : partial) best = std::max(best, s - sk);
                return best * best;
            },
            caps);
        rep.rhs = tree_expect_path(
            arr, [&arr](const std::vector<double>& incs) { return variance_sum(arr, incs); },
            caps);
        break;
    }
    case RosenthalVariant::MaxSquared: {
        rep.lhs = tree_expect_path(
            arr,
            [](const std::vector<double>& incs) {
                double s = 0.0, m = 0.0;
                for (double z : incs) {
                    s += z;
                    m = std::max(m, std::fabs(s));
                }
                return m * m;
            },
            caps);
        const double variance = tree_expect_path(
            arr, [&arr](const std::vector<double>& incs) { return variance_sum(arr, incs); },
            caps);
        const double drift_sq = tree_expect_path(
            arr,
            [&arr](const std::vector<double>& incs) {
                const double d = drift_sum(arr, incs);
                return d * d;
            },
            caps);
        rep.rhs = 256.0 * (variance + drift_sq);
        break;
    }
    case RosenthalVariant::MaxPower: {
        if (!(p >= 2.0)) throw std::invalid_argument("rosenthal: MaxPower needs p >= 2");
        if (c_p <= 0.0) c_p = std::pow(2.0, 2.0 * p) * p * p;
        rep.lhs = tree_expect_path(
            arr,
            [p](const std::vector<double>& incs) {
                double s = 0.0, m = 0.0;
                for (double z : incs) {
                    s += z;
                    m = std::max(m, std::fabs(s));
                }
                return std::pow(m, p);
            },
            caps);
        const double pth = tree_expect_path(
            arr,
            [&arr, p](const std::vector<double>& incs) {
                return path_sum(incs, [&arr, p](int k, double s) {
                    return expect_fn(arr.step_at(k, s),
                                     [p](double z) { return std::pow(std::fabs(z), p); });
                });
            },
            caps);
        const double var_pow = tree_expect_path(
            arr,
            [&arr, p](const std::vector<double>& incs) {
                return std::pow(variance_sum(arr, incs), 0.5 * p);
            },
            caps);
        const double drift_pow = tree_expect_path(
            arr,
            [&arr, p](const std::vector<double>& incs) {
                return std::pow(drift_sum(arr, incs), p);
            },
            caps);
        rep.rhs = c_p * (pth + var_pow + drift_pow);
        break;
    }
    }
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

InequalityReport independent_rosenthal_check(const std::vector<DistributionFamily>& families,
                                             double p, double c_p, const TreeCaps& caps) {
    if (!(p >= 2.0))
        throw std::invalid_argument("independent_rosenthal_check: p must be >= 2");
    if (!(c_p > 0.0))
        throw std::invalid_argument("independent_rosenthal_check: c_p must be > 0");
    const KernelArray arr = KernelArray::from_steps(families);
    InequalityReport rep;
    rep.instance = describe(arr);
    rep.lhs = tree_expect_path(
        arr,
        [p](const std::vector<double>& incs) {
            double s = 0.0, m = 0.0;
            for (double z : incs) {
                s += z;
                m = std::max(m, std::fabs(s));
            }
            return std::pow(m, p);
        },
        caps);
    double pth = 0.0, variance = 0.0, drift = 0.0;
    for (const DistributionFamily& fam : families) {
        pth += expect_fn(fam, [p](double z) { return std::pow(std::fabs(z), p); });
        variance += expect_fn(fam, [](double z) { return z * z; });
        const double mu = expect_fn(fam, [](double z) { return z; });
        const double ml = conjugate_expect_fn(fam, [](double z) { return z; });
        drift += std::max(-ml, 0.0) + std::max(mu, 0.0);
    }
    rep.rhs = c_p * (pth + std::pow(variance, 0.5 * p) + std::pow(drift, p));
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

double exponential_bound_value(double x, double y, double A) {
    if (!(x > 0.0) || !(y > 0.0) || !(A > 0.0))
        throw std::invalid_argument("exponential_bound_value: parameters must be > 0");
    const double xy = x * y;
    const double exponent =
        -(x * x) / (2.0 * (xy + A)) * (1.0 + (2.0 / 3.0) * std::log1p(xy / A));
    return std::exp(exponent);
}

double worst_path_variance(const KernelArray& arr, const TreeCaps& caps) {
    const std::vector<std::vector<double>> states = reachable_states(arr, caps);
    // Backward max over the reachable graph: the accumulated conditional
    // variance is largest along the path maximising each step's
    // contribution plus the best continuation.
    std::vector<double> cont(states.back().size(), 0.0);
    for (int k = arr.n_steps(); k >= 1; --k) {
        const std::vector<double>& cur = states[static_cast<std::size_t>(k - 1)];
        const std::vector<double>& nxt = states[static_cast<std::size_t>(k)];
        std::vector<double> best(cur.size(), 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const double s = cur[i];
            const DistributionFamily fam = arr.step_at(k, s);
            const double here = expect_fn(fam, [](double z) { return z * z; });
            double tail = 0.0;
            for (const StepDistribution& d : fam.members()) {
                for (const Atom& a : d.atoms()) {
                    const double ns = s + a.point;
                    const auto it = std::lower_bound(nxt.begin(), nxt.end(), ns);
                    if (it != nxt.end() && *it == ns)
                        tail = std::max(tail, cont[static_cast<std::size_t>(it - nxt.begin())]);
                }
            }
            best[i] = here + tail;
        }
        cont = std::move(best);
    }
    return cont.front();
}

InequalityReport exponential_inequality_check(const KernelArray& arr, double x, double y,
                                              double ramp_width, const TreeCaps& caps) {
    if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("exponential_inequality_check: x, y must be > 0");
    if (!(ramp_width > 0.0))
        throw std::invalid_argument("exponential_inequality_check: ramp_width must be > 0");

    const std::vector<std::vector<double>> states = reachable_states(arr, caps);
    for (int k = 1; k <= arr.n_steps(); ++k) {
        for (double s : states[static_cast<std::size_t>(k - 1)]) {
            const DistributionFamily fam = arr.step_at(k, s);
            if (fam.max_abs_point() >= y)
                throw InvalidInstanceError(
                    "exponential_inequality_check: atom magnitude reaches y");
            if (expect_fn(fam, [](double z) { return z; }) > 1e-12)
                throw InvalidInstanceError(
                    "exponential_inequality_check: conditional upper mean must be nonpositive");
        }
    }

    const double A = worst_path_variance(arr, caps);
    InequalityReport rep;
    rep.instance = describe(arr);
    rep.lhs = tree_expect_exact(
        arr, PathFunctional::terminal(TestFunction::ramp(x - ramp_width, x)), caps);
    rep.rhs = A > 0.0 ? exponential_bound_value(x, y, A) : 0.0;
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

} // namespace sublab
