#include "lmeas/dsequence.hpp"

namespace lmeas {

LatticeElement domination(const DSequence& d,
                          const std::function<std::uint64_t(std::uint64_t)>& phi,
                          std::uint64_t depth_i) {
    if (depth_i == 0) throw Error("domination: depth_i must be >= 1");
    LatticeElement acc = d.rows(1).eval(phi(1));
    for (std::uint64_t i = 2; i <= depth_i; ++i) acc = sup(acc, d.rows(i).eval(phi(i)));
    return acc;
}

LatticeElement weak_sigma_distributivity_probe(
    const DSequence& d, const std::vector<std::function<std::uint64_t(std::uint64_t)>>& phis,
    std::uint64_t depth_i) {
    if (phis.empty()) throw Error("weak_sigma_distributivity_probe: empty sample");
    LatticeElement acc = domination(d, phis[0], depth_i);
    for (std::size_t i = 1; i < phis.size(); ++i) acc = inf(acc, domination(d, phis[i], depth_i));
    return acc;
}

} // namespace lmeas
