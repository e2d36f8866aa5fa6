#pragma once

#include <initializer_list>
#include <vector>

namespace sublab {

struct Atom {
    double point;
    double weight;
};

/// A finitely supported probability distribution on the real line.
///
/// Canonical form: atom points strictly increasing, weights strictly
/// positive, total weight 1 within 1e-12. The constructor sorts the atoms
/// and merges points that coincide up to 1e-12, so equality of
/// distributions is decidable.
class StepDistribution {
public:
    explicit StepDistribution(std::vector<Atom> atoms);

    static StepDistribution point_mass(double c);
    /// Equal mass at -a and +a. a == 0 collapses to a point mass.
    static StepDistribution rademacher(double a);
    static StepDistribution two_point(double lo, double hi, double weight_lo);

    const std::vector<Atom>& atoms() const { return atoms_; }

    /// Classical expectation of f under this distribution.
    template <class F>
    double mean_of(F&& f) const {
        double acc = 0.0;
        for (const Atom& a : atoms_) acc += a.weight * f(a.point);
        return acc;
    }

    double mean() const;
    double second_moment() const;
    double max_abs_point() const;

    StepDistribution scaled(double factor) const;

private:
    std::vector<Atom> atoms_;
};

/// A nonempty finite set of step distributions. The sub-linear expectation
/// of a function is the supremum of its classical expectations over the
/// members.
class DistributionFamily {
public:
    explicit DistributionFamily(std::vector<StepDistribution> members);
    DistributionFamily(std::initializer_list<StepDistribution> members);

    const std::vector<StepDistribution>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

    double max_abs_point() const;
    DistributionFamily scaled(double factor) const;

private:
    std::vector<StepDistribution> members_;
};

} // namespace sublab
