#include "sublab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sublab {

namespace {
constexpr double kMergeTol = 1e-12;
constexpr double kWeightTol = 1e-12;
} // namespace

StepDistribution::StepDistribution(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("StepDistribution: no atoms");
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.point) || !std::isfinite(a.weight))
            throw std::invalid_argument("StepDistribution: non-finite atom");
        if (a.weight <= 0.0)
            throw std::invalid_argument("StepDistribution: weight must be > 0");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.point < b.point; });
    atoms_.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!atoms_.empty() && a.point - atoms_.back().point <= kMergeTol) {
            atoms_.back().weight += a.weight;
        } else {
            atoms_.push_back(a);
        }
    }
    double total = 0.0;
    for (const Atom& a : atoms_) total += a.weight;
    if (std::fabs(total - 1.0) > kWeightTol)
        throw std::invalid_argument("StepDistribution: weights must sum to 1");
}

StepDistribution StepDistribution::point_mass(double c) {
    return StepDistribution({{c, 1.0}});
}

StepDistribution StepDistribution::rademacher(double a) {
    return StepDistribution({{-a, 0.5}, {a, 0.5}});
}

StepDistribution StepDistribution::two_point(double lo, double hi, double weight_lo) {
    return StepDistribution({{lo, weight_lo}, {hi, 1.0 - weight_lo}});
}

double StepDistribution::mean() const {
    return mean_of([](double x) { return x; });
}

double StepDistribution::second_moment() const {
    return mean_of([](double x) { return x * x; });
}

double StepDistribution::max_abs_point() const {
    return std::max(std::fabs(atoms_.front().point), std::fabs(atoms_.back().point));
}

StepDistribution StepDistribution::scaled(double factor) const {
    std::vector<Atom> out = atoms_;
    for (Atom& a : out) a.point *= factor;
    return StepDistribution(std::move(out));
}

DistributionFamily::DistributionFamily(std::vector<StepDistribution> members)
    : members_(std::move(members)) {
    if (members_.empty())
        throw std::invalid_argument("DistributionFamily: at least one member required");
}

DistributionFamily::DistributionFamily(std::initializer_list<StepDistribution> members)
    : DistributionFamily(std::vector<StepDistribution>(members)) {}

double DistributionFamily::max_abs_point() const {
    double m = 0.0;
    for (const StepDistribution& d : members_) m = std::max(m, d.max_abs_point());
    return m;
}

DistributionFamily DistributionFamily::scaled(double factor) const {
    std::vector<StepDistribution> out;
    out.reserve(members_.size());
    for (const StepDistribution& d : members_) out.push_back(d.scaled(factor));
    return DistributionFamily(std::move(out));
}

} // namespace sublab
