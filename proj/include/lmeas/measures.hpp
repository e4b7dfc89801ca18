#pragma once

#include "lmeas/filters.hpp"
#include "lmeas/interval.hpp"
#include "lmeas/regulator.hpp"

namespace lmeas {

struct AtomicSpace {
    enum class Kind { FiniteAtoms, CountableAtoms };
    Kind kind = Kind::CountableAtoms;
    std::uint64_t atom_count = 0; // FiniteAtoms only

    static AtomicSpace finite(std::uint64_t n);
    static AtomicSpace countable();
    bool operator==(const AtomicSpace& o) const {
        return kind == o.kind && atom_count == o.atom_count;
    }
    std::string str() const;
    static AtomicSpace from_sexpr(const SExpr& e);
};

/// One closed-form tail summand: contributes [k in mask]·coeff·rho^k to
/// weight(k) beyond the explicit prefix.
struct TailTerm {
    LatticeElement coeff = LatticeElement::scalar(0);
    Rational rho = Rational(1, 2);         // 0 < rho < 1
    std::optional<SetDescriptor> mask;     // absent = all k
    std::optional<PeriodicSet> mask_ep;    // derived; present whenever mask is
};

/// Certified |weight(k)| <= coeff·rho^k for every k.
struct TailEnvelope {
    LatticeElement coeff;
    Rational rho;
    LatticeElement sum_from(std::uint64_t n) const; // Σ_{k>=n} coeff·rho^k
};

struct DiffusePiece {
    DyadicInterval iv;
    LatticeElement density;
};

struct ChargeAtInfinity {
    LatticeElement c;
    PartitionFilter f;
};

/// A representable measure: atomic weights (explicit prefix plus closed-form
/// geometric tail terms), an optional step density on the dyadic algebra of
/// [0,1), and an optional charge-at-infinity λ(A) = c·[A ∈ F] defined on the
/// subalgebra F ∪ I_F.
class Charge {
public:
    static Charge finite_atoms(std::vector<LatticeElement> weights);
    static Charge countable(std::vector<LatticeElement> prefix, std::vector<TailTerm> tail,
                            int dim);
    static Charge zero_charge(const AtomicSpace& space, int dim);

    Charge with_diffuse(std::vector<DiffusePiece> pieces) const;
    Charge with_charge(LatticeElement c, PartitionFilter f) const;

    int dim() const { return dim_; }
    const AtomicSpace& space() const { return space_; }
    const std::vector<LatticeElement>& atom_prefix() const { return prefix_; }
    const std::vector<TailTerm>& atom_tail() const { return tail_; }
    const std::vector<DiffusePiece>& diffuse_pieces() const { return diffuse_; }
    bool has_charge() const { return at_infinity_.has_value(); }
    const std::optional<ChargeAtInfinity>& at_infinity() const { return at_infinity_; }
    const TailEnvelope& envelope() const { return envelope_; }

    LatticeElement weight(std::uint64_t k) const; // exact
    /// EP form of {k : weight(k) != 0}.
    PeriodicSet atom_support() const;
    bool atoms_zero() const;
    bool diffuse_zero() const;
    bool sigma_part_zero() const;
    bool is_zero() const;
    bool nonnegative_structural() const;
    LatticeElement max_abs_density() const;
    /// Upper bound for v(m)(Ω), exact when tails are unmasked.
    LatticeElement total_variation_upper() const;

    Charge charge_part() const;
    Charge sigma_part() const;
    Charge atomic_part_only() const;
    Charge diffuse_part_only() const;

    /// m_{|E}: atomic weights masked by E.atoms (must be EP-decidable),
    /// diffuse pieces cut to E.diffuse, charge kept iff include_charge.
    Charge restricted(const MeasurableSet& e, bool include_charge) const;

    Charge scaled(const Rational& k) const;
    Charge abs_structural() const;
    Charge pos_structural() const;
    Charge neg_structural() const;
    friend Charge operator+(const Charge& a, const Charge& b);
    friend Charge operator-(const Charge& a, const Charge& b);

    ValueInterval evaluate(const SetDescriptor& a, std::uint64_t depth) const;
    ValueInterval evaluate(const MeasurableSet& a, std::uint64_t depth) const;
    ValueInterval variation(const SetDescriptor& h, std::uint64_t depth) const;
    ValueInterval variation(const MeasurableSet& h, std::uint64_t depth) const;
    ValueInterval v_plus(const MeasurableSet& h, std::uint64_t depth) const;
    ValueInterval v_minus(const MeasurableSet& h, std::uint64_t depth) const;

    std::string str() const;
    static Charge from_sexpr(const SExpr& e);

private:
    Charge() = default;
    void derive_envelope();

    AtomicSpace space_;
    int dim_ = 1;
    std::vector<LatticeElement> prefix_;
    std::vector<TailTerm> tail_;
    std::vector<DiffusePiece> diffuse_;
    std::optional<ChargeAtInfinity> at_infinity_;
    TailEnvelope envelope_{LatticeElement::scalar(0), Rational(1, 2)};
};

/// (o)-sequence p_n with: for every pairwise disjoint (F_k) there is k(n) with
/// ⋁_{k>=k(n)} |m(F_k)| <= p_n. Built from the atomic tail envelope plus a
/// harmonic bound for the diffuse part; for a charged measure this certifies
/// m minus its charge (at most one member of a disjoint measured family lies
/// in F, contributing a single |c| spike).
Regulator s_boundedness_certificate(const Charge& m);

Verdict check_absolutely_continuous(const Charge& m, const Charge& nu, std::uint64_t depth);
Verdict check_singular(const Charge& m, const Charge& nu, std::uint64_t depth);

struct ContinuityCertificate {
    Regulator p;          // p_n bound for the level-n dyadic partition
    std::uint64_t levels; // partitions pi_n, n <= levels
};
Verdict check_continuous(const Charge& m, std::uint64_t depth,
                         ContinuityCertificate* cert = nullptr);

Verdict check_purely_finitely_additive(const Charge& m, std::uint64_t depth);

/// Greedy diagonal subsequence selection: 1-based positions n_1 < n_2 < ...
/// into `h` with v(m_i)(H_{n_l}) <= q(l) for every measure and every l, so the
/// single regulator q regulates sigma-additivity along the selection for all
/// measures at once. Throws SelectionError with the blocking level.
std::vector<std::uint64_t> extract_sigma_subsequence(const std::vector<Charge>& ms,
                                                     const std::vector<SetDescriptor>& h,
                                                     const Regulator& q, std::uint64_t depth);

} // namespace lmeas
