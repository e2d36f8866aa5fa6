#pragma once

#include <functional>
#include <vector>

#include "sublab/kernel_array.hpp"
#include "sublab/path_functional.hpp"

namespace sublab {

/// Size caps for the exact enumeration routines.
struct TreeCaps {
    int max_steps = 8;
    int max_atoms = 4;
    int max_members = 4;
};

/// Exact nested evaluation of the sub-linear expectation of a path
/// functional on the full outcome tree: at each node the value is the
/// maximum over family members of the member's expectation of the child
/// values. No grid, no interpolation; this is the brute-force oracle the
/// dynamic-programming layer is checked against.
///
/// Throws TooLargeError when the instance exceeds the caps.
double tree_expect_exact(const KernelArray& arr, const PathFunctional& functional,
                         const TreeCaps& caps = {});

/// Same recursion with an arbitrary leaf functional of the realized
/// increment path (increments[k] is the k+1-th step). Used for maxima of
/// partial sums and other path statistics outside the PathFunctional kinds.
double tree_expect_path(const KernelArray& arr,
                        const std::function<double(const std::vector<double>&)>& leaf,
                        const TreeCaps& caps = {});

/// States reachable after each step (index 0 holds the initial state 0).
/// Deduplicated on exact bit patterns, so lattice walks stay small.
std::vector<std::vector<double>> reachable_states(const KernelArray& arr,
                                                  const TreeCaps& caps = {});

} // namespace sublab
