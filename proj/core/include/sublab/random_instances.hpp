#pragma once

#include <cstdint>
#include <random>

#include "sublab/distribution.hpp"
#include "sublab/kernel_array.hpp"

namespace sublab {

/// Deterministic RNG with portable helpers; the raw mt19937_64 stream is
/// identical across standard libraries, and the helpers below avoid the
/// implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    bool coin() { return (eng_() & 1u) != 0; }

private:
    std::mt19937_64 eng_;
};

/// Shape constraints for the generated instances.
struct InstanceCaps {
    int max_steps = 5;
    int max_atoms = 3;
    int max_members = 3;
    double scale = 1.0;        // atom magnitudes stay within ~scale
    bool nonpositive_mean = false;
    double on_grid_dx = 0.0;   // > 0: atom points are multiples of this
};

/// A random family within the caps. With nonpositive_mean the members are
/// symmetric atom sets shifted down by a nonnegative amount, so every
/// member mean is exactly <= 0.
DistributionFamily random_family(Rng& rng, const InstanceCaps& caps);

/// A random constant kernel array within the caps.
KernelArray random_kernel_array(Rng& rng, const InstanceCaps& caps);

} // namespace sublab
