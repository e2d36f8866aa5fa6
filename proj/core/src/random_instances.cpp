#include "sublab/random_instances.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace sublab {

namespace {

// Distinct points within [-scale, scale], on the lattice when requested.
std::vector<double> draw_points(Rng& rng, int count, const InstanceCaps& caps,
                                bool nonnegative_only = false) {
    std::set<double> pts;
    if (caps.on_grid_dx > 0.0) {
        const int radius = std::max(1, static_cast<int>(caps.scale / caps.on_grid_dx));
        while (static_cast<int>(pts.size()) < count) {
            const int lo = nonnegative_only ? 0 : -radius;
            pts.insert(rng.uniform_int(lo, radius) * caps.on_grid_dx);
        }
    } else {
        while (static_cast<int>(pts.size()) < count) {
            const double lo = nonnegative_only ? 0.0 : -caps.scale;
            pts.insert(rng.uniform(lo, caps.scale));
        }
    }
    return {pts.begin(), pts.end()};
}

// Dyadic-ish weights from small integer masses; the float sum stays within
// the canonical 1e-12 tolerance.
std::vector<double> draw_weights(Rng& rng, int count) {
    std::vector<int> mass(static_cast<std::size_t>(count));
    int total = 0;
    for (int& m : mass) {
        m = rng.uniform_int(1, 8);
        total += m;
    }
    std::vector<double> w(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        w[static_cast<std::size_t>(i)] = static_cast<double>(mass[static_cast<std::size_t>(i)]) / total;
    return w;
}

StepDistribution random_member(Rng& rng, const InstanceCaps& caps) {
    if (caps.nonpositive_mean) {
        // Symmetric pairs (exact zero mean), optionally an atom at the
        // centre, then a nonnegative downward lattice shift.
        const int pairs = std::max(1, caps.max_atoms / 2);
        const int n_pairs = rng.uniform_int(1, pairs);
        const bool centre = (2 * n_pairs + 1 <= caps.max_atoms) && rng.coin();
        InstanceCaps positive = caps;
        std::vector<double> mags = draw_points(rng, n_pairs, positive, /*nonnegative_only=*/true);
        for (double& m : mags)
            if (m == 0.0) m = caps.on_grid_dx > 0.0 ? caps.on_grid_dx : 0.25 * caps.scale;
        std::sort(mags.begin(), mags.end());
        mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

        double shift = 0.0;
        if (rng.coin()) {
            shift = caps.on_grid_dx > 0.0
                        ? rng.uniform_int(0, 2) * caps.on_grid_dx
                        : rng.uniform(0.0, 0.2 * caps.scale);
        }
        std::vector<Atom> atoms;
        const int slots = static_cast<int>(mags.size()) * 2 + (centre ? 1 : 0);
        const std::vector<double> w = draw_weights(rng, slots);
        std::size_t wi = 0;
        for (double m : mags) {
            const double paired = w[wi];
            atoms.push_back({-m - shift, paired});
            atoms.push_back({m - shift, paired});
            wi += 2;
        }
        if (centre) atoms.push_back({-shift, w[wi]});
        // Re-balance so paired atoms share one weight and the total is 1.
        double total = 0.0;
        for (const Atom& a : atoms) total += a.weight;
        for (Atom& a : atoms) a.weight /= total;
        return StepDistribution(std::move(atoms));
    }
    const int n_atoms = rng.uniform_int(1, caps.max_atoms);
    const std::vector<double> pts = draw_points(rng, n_atoms, caps);
    const std::vector<double> w = draw_weights(rng, n_atoms);
    std::vector<Atom> atoms;
    atoms.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) atoms.push_back({pts[i], w[i]});
    return StepDistribution(std::move(atoms));
}

} // namespace

DistributionFamily random_family(Rng& rng, const InstanceCaps& caps) {
    const int members = rng.uniform_int(1, caps.max_members);
    std::vector<StepDistribution> out;
    out.reserve(static_cast<std::size_t>(members));
    for (int i = 0; i < members; ++i) out.push_back(random_member(rng, caps));
    return DistributionFamily(std::move(out));
}

KernelArray random_kernel_array(Rng& rng, const InstanceCaps& caps) {
    const int n = rng.uniform_int(1, caps.max_steps);
    std::vector<DistributionFamily> steps;
    steps.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) steps.push_back(random_family(rng, caps));
    return KernelArray::from_steps(std::move(steps));
}

} // namespace sublab
