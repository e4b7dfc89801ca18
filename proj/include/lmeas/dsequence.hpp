#pragma once

#include <functional>

#include "lmeas/regulator.hpp"

namespace lmeas {

/// A bounded double sequence whose rows are (o)-sequences. Exposed for the
/// D-sequence formulation; the main pipeline works with (o)-sequences, the two
/// being equivalent in this setting.
struct DSequence {
    int dim;
    std::function<Regulator(std::uint64_t)> rows; // i >= 1
    LatticeElement bound;                         // dominates every entry
};

/// ⋁_{i <= depth_i} rows(i).eval(phi(i)) — a lower bound of the true infinite
/// domination; always <= d.bound when the D-sequence invariant holds.
LatticeElement domination(const DSequence& d, const std::function<std::uint64_t(std::uint64_t)>& phi,
                          std::uint64_t depth_i);

/// inf over the sampled maps of their (truncated) dominations. A trend report,
/// never a proof of weak sigma-distributivity.
LatticeElement weak_sigma_distributivity_probe(
    const DSequence& d, const std::vector<std::function<std::uint64_t(std::uint64_t)>>& phis,
    std::uint64_t depth_i);

} // namespace lmeas
