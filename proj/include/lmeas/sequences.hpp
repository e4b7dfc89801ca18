#pragma once

#include <memory>
#include <optional>

#include "lmeas/lattice.hpp"
#include "lmeas/regulator.hpp"
#include "lmeas/sets.hpp"
#include "lmeas/verdict.hpp"

namespace lmeas {

/// Closed-form indexed family k ↦ x_k in Q^d (k >= 1). The closed forms are
/// what make tail envelopes and good-set computations certifiable; an
/// arbitrary materialized prefix can only ever witness failures.
class ElementSequence {
public:
    enum class Kind { AffineGeometric, Harmonic, NGeometric, CountGeometric, IndicatorMix, Table };

    /// x_k = offset + coeff·rho^k.
    static ElementSequence affine_geometric(LatticeElement offset, LatticeElement coeff,
                                            Rational rho);
    static ElementSequence constant(LatticeElement c);
    static ElementSequence geometric(LatticeElement coeff, Rational rho);
    /// x_k = coeff/k.
    static ElementSequence harmonic(LatticeElement coeff);
    /// x_k = coeff·k·rho^k.
    static ElementSequence n_geometric(LatticeElement coeff, Rational rho);
    /// x_k = coeff·rho^k·|S ∩ [1..k]|.
    static ElementSequence count_geometric(LatticeElement coeff, Rational rho, PeriodicSet s);
    /// x_k = a_k if k in S else b_k.
    static ElementSequence indicator_mix(PeriodicSet s, ElementSequence a, ElementSequence b);
    /// Explicit first values, then the tail sequence (indexed by the same k).
    static ElementSequence table(std::vector<LatticeElement> prefix, ElementSequence tail);

    Kind kind() const;
    int dim() const;
    LatticeElement at(std::uint64_t k) const;

    /// Upper bound for sup_{k>=n} |x_k − limit|; exact for monotone forms.
    /// nullopt when no closed-form tail is available for this shape/limit.
    std::optional<LatticeElement> tail_abs_sup(const LatticeElement& limit,
                                               std::uint64_t n) const;

    struct GoodSetBounds {
        std::optional<PeriodicSet> exact; // B = {k : |x_k − limit| <= t} when decidable
        std::optional<PeriodicSet> under; // certified subset of B
        std::optional<PeriodicSet> over;  // certified superset of B
    };
    /// Threshold set analysis for B = {k : |x_k − limit| <= t}.
    GoodSetBounds good_set(const LatticeElement& limit, const LatticeElement& t) const;

private:
    struct Node;
    explicit ElementSequence(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Order-convergence check against a given regulator at a truncation depth.
/// Holds requires the closed-form tail envelope; a bare prefix can Fail or
/// stay Unknown but never Holds.
Verdict o_convergence_check(const ElementSequence& x, const LatticeElement& limit,
                            const Regulator& r, std::uint64_t depth);
Verdict o_convergence_check(const std::vector<LatticeElement>& prefix,
                            const LatticeElement& limit, const Regulator& r, std::uint64_t depth);

} // namespace lmeas
