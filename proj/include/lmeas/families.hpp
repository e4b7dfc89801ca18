#pragma once

#include "lmeas/decompose.hpp"
#include "lmeas/sequences.hpp"

namespace lmeas {

/// Pairwise-disjoint indexed family of sets j ↦ H_j.
class SetFamily {
public:
    enum class Kind { Singletons, BlocksOf, Listed };

    static SetFamily singletons();
    static SetFamily blocks_of(PartitionFilter f);
    static SetFamily listed(std::vector<SetDescriptor> sets);

    Kind kind() const { return kind_; }
    SetDescriptor at(std::uint64_t j) const;
    /// Set count for Listed; unbounded otherwise.
    std::optional<std::uint64_t> count() const;
    const PartitionFilter& filter() const { return *filter_; }
    /// Lower bound on min ⋃_{j >= j_from} H_j; nullopt when no sets remain.
    std::optional<std::uint64_t> min_element_from(std::uint64_t j_from) const;

    std::string str() const;
    static SetFamily from_sexpr(const SExpr& e);

private:
    Kind kind_ = Kind::Singletons;
    std::optional<PartitionFilter> filter_;
    std::vector<SetDescriptor> sets_;
};

/// Serializable family of representable measures n ↦ m_n, with the closed
/// forms the checkers need: value sequences at a set, variation sequences,
/// and family-level tail bounds.
class ChargeFamily {
public:
    enum class Kind { Constant, GeometricPerturbation, TriangleRows, IndicatorDeltaRows };

    static ChargeFamily constant(Charge m);
    /// m_n = base + rho^n·dir.
    static ChargeFamily geometric_perturbation(Charge base, Charge dir, Rational rho);
    /// m_n({k}) = c·rho^n for k <= n (within the optional mask), else 0.
    static ChargeFamily triangle_rows(LatticeElement c, Rational rho,
                                      std::optional<SetDescriptor> mask = std::nullopt);
    /// m_n = c·δ_n when n in S, else the zero measure.
    static ChargeFamily indicator_delta_rows(SetDescriptor s, LatticeElement c);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    AtomicSpace space() const;
    Charge at(std::uint64_t n) const;

    /// n ↦ m_n(A) as an exact closed form; nullopt when the set analysis has
    /// no exact form (the caller then reports Unknown).
    std::optional<ElementSequence> value_sequence(const SetDescriptor& a,
                                                  std::uint64_t depth) const;

    struct VariationSeq {
        ElementSequence seq;
        bool exact; // false: certified upper bound
    };
    /// n ↦ v(m_n)(atoms ∪ [0,1)).
    std::optional<VariationSeq> variation_sequence(std::uint64_t depth) const;
    /// Least t with v(m_n)(Ω) <= bound for every n >= t.
    std::optional<std::uint64_t> variation_tail_threshold(const LatticeElement& bound,
                                                          std::uint64_t depth) const;

    /// Upper bound for sup_n sup_{j >= j_from} |m_n(H_j)|.
    std::optional<LatticeElement> family_tail_sup(const SetFamily& h,
                                                  std::uint64_t j_from) const;
    /// Same with the measure index restricted to an eventually periodic set.
    std::optional<LatticeElement> family_tail_sup_over(const PeriodicSet& index_set,
                                                       const SetFamily& h,
                                                       std::uint64_t j_from) const;

    /// u with v(m_n)(Ω) <= u for all n.
    LatticeElement equibound() const;

    ChargeFamily restricted(const MeasurableSet& e, bool include_charge) const;
    /// n ↦ charge-at-infinity part of m_n.
    ChargeFamily charge_part_family() const;
    /// n ↦ countably additive part of m_n.
    ChargeFamily sigma_part_family() const;
    /// Pointwise limit measure of the family (base for perturbations, zero
    /// for row families, the constant itself).
    Charge limit_charge() const;

    std::string str() const;
    static ChargeFamily from_sexpr(const SExpr& e);

private:
    Kind kind_ = Kind::Constant;
    int dim_ = 1;
    std::optional<Charge> base_, dir_;
    Rational rho_ = Rational(1, 2);
    LatticeElement coeff_ = LatticeElement::scalar(0);
    std::optional<SetDescriptor> mask_;
    std::optional<SetDescriptor> indicator_;
};

} // namespace lmeas
