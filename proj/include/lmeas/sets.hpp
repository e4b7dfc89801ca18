#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lmeas/rational.hpp"
#include "lmeas/sexpr.hpp"

namespace lmeas {

// ---------------------------------------------------------------------------
// Eventually periodic subsets of N = {1, 2, ...}
// ---------------------------------------------------------------------------

/// Normal form for the decidable fragment of the descriptor grammar:
/// membership is listed explicitly below `threshold` and periodic from it on.
/// Closed under boolean operations (up to the period/enumeration caps).
struct PeriodicSet {
    std::uint64_t threshold = 1;      // periodic behavior for n >= threshold
    std::uint64_t period = 1;         // >= 1
    std::vector<bool> residues;       // size == period; n in S iff residues[n % period]
    std::vector<std::uint64_t> prefix; // sorted members in [1, threshold)

    static constexpr std::uint64_t kPeriodCap = 1u << 20;
    static constexpr std::uint64_t kEnumCap = 1u << 21;

    bool member(std::uint64_t n) const;
    bool residues_empty() const;
    bool is_finite() const { return residues_empty(); }
    bool is_empty() const;
    std::optional<std::uint64_t> least() const;
    std::optional<std::uint64_t> least_geq(std::uint64_t n) const;
    std::optional<std::uint64_t> max_finite() const; // max element when finite
    std::vector<std::uint64_t> elements_leq(std::uint64_t bound) const;
    std::uint64_t count_leq(std::uint64_t bound) const;

    static PeriodicSet finite(std::vector<std::uint64_t> elems);
    static PeriodicSet arith_prog(std::uint64_t a, std::uint64_t d);
    static PeriodicSet naturals();
    static PeriodicSet empty_set();
    static PeriodicSet tail_from(std::uint64_t a);

    PeriodicSet complemented() const;
    static std::optional<PeriodicSet> unite(const PeriodicSet& a, const PeriodicSet& b);
    static std::optional<PeriodicSet> intersect(const PeriodicSet& a, const PeriodicSet& b);
};

// ---------------------------------------------------------------------------
// Partition filters (countably generated free filters, Def-style: the dual
// ideal is the family of sets meeting only finitely many blocks)
// ---------------------------------------------------------------------------

class SetDescriptor;

class PartitionFilter {
public:
    enum class Family { Singletons, Ranges, DyadicValuationBlocks, TableWithTailRule };

    /// A_k = {k}: the cofinite filter.
    static PartitionFilter singletons();
    /// Consecutive blocks, len(k) = a*k + b (a + b >= 1).
    static PartitionFilter ranges(std::uint64_t a, std::uint64_t b);
    /// A_k = {n : v2(n) = k - 1}; infinitely many infinite blocks.
    static PartitionFilter dyadic_valuation_blocks();
    /// Explicit block indices for 1..table.size(), singleton blocks after.
    /// Every index in 1..table.size() must occur in the table.
    static PartitionFilter table_with_tail(std::vector<std::uint64_t> table);

    Family family() const;
    bool blocks_finite() const; // every block a finite set?

    std::uint64_t block_of(std::uint64_t n) const; // n >= 1
    /// A_k ∩ [1..depth], increasing.
    std::vector<std::uint64_t> block_members(std::uint64_t k, std::uint64_t depth) const;
    /// Bound B such that every block index k <= K owns some n <= B.
    std::uint64_t witness_bound(std::uint64_t K) const;

    // family-specific accessors
    std::uint64_t range_start(std::uint64_t k) const;
    std::uint64_t range_len(std::uint64_t k) const;
    std::uint64_t table_prefix() const;

    bool operator==(const PartitionFilter& other) const;
    std::string str() const;
    static PartitionFilter from_sexpr(const SExpr& e);

private:
    struct Data;
    std::shared_ptr<const Data> data_;
    explicit PartitionFilter(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
};

// ---------------------------------------------------------------------------
// Symbolic subsets of N
// ---------------------------------------------------------------------------

/// Symbolic subset of N, closed under boolean operations, with decidable
/// pointwise membership. Opaque predicates are quarantined: they are total
/// but excluded from exact ideal decisions.
class SetDescriptor {
public:
    enum class Kind {
        Finite,
        ArithProg,
        DyadicValuation,
        BlockUnion,
        Complement,
        Union,
        Intersection,
        LeastInBlocks,
        Predicate
    };

    static SetDescriptor finite(std::vector<std::uint64_t> elems);
    /// {a, a+d, a+2d, ...} ∩ N (a >= 0, d >= 1).
    static SetDescriptor arith_prog(std::uint64_t a, std::uint64_t d);
    /// {n : 2^v exactly divides n} (v <= 62).
    static SetDescriptor dyadic_valuation(unsigned v);
    /// Union of the blocks A_k of `f` for k in `indices`.
    static SetDescriptor block_union(PartitionFilter f, SetDescriptor indices);
    static SetDescriptor complement(SetDescriptor s);
    static SetDescriptor set_union(SetDescriptor a, SetDescriptor b);
    static SetDescriptor set_intersection(SetDescriptor a, SetDescriptor b);
    /// {min(J ∩ A_k) : k, J ∩ A_k nonempty} — the one-point-per-block
    /// selector. For the singleton family this is J itself and is normalized
    /// away.
    static SetDescriptor least_in_blocks(PartitionFilter f, SetDescriptor j);
    static SetDescriptor predicate(std::string name, std::function<bool(std::uint64_t)> fn);
    /// Named predicate from the built-in registry ("primes", "squares").
    static SetDescriptor predicate_named(const std::string& name);

    static SetDescriptor naturals();
    static SetDescriptor empty();

    Kind kind() const;
    bool contains(std::uint64_t n) const; // n >= 1
    bool opaque() const;                  // any Predicate node inside

    const std::vector<std::uint64_t>& finite_elements() const;
    std::uint64_t ap_a() const;
    std::uint64_t ap_d() const;
    unsigned dv_v() const;
    const PartitionFilter& node_filter() const; // BlockUnion / LeastInBlocks
    const SetDescriptor& child() const;         // Complement / BlockUnion idx / LeastInBlocks base
    const SetDescriptor& left() const;
    const SetDescriptor& right() const;
    const std::string& predicate_name() const;

    std::string str() const;
    static SetDescriptor from_sexpr(const SExpr& e);

    friend bool operator==(const SetDescriptor& a, const SetDescriptor& b) {
        return a.str() == b.str();
    }

private:
    struct Node;
    std::shared_ptr<const Node> node_;
    explicit SetDescriptor(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

/// Exact eventually-periodic form, when the descriptor lies in the decidable
/// fragment and the caps are not exceeded.
std::optional<PeriodicSet> to_periodic(const SetDescriptor& s);

/// Canonical descriptor denoting exactly the given eventually periodic set:
/// a finite part unioned with one arithmetic progression per live residue.
SetDescriptor descriptor_of(const PeriodicSet& ep);

/// Least element of S ∩ A_k, exact where the analysis is exact; nullopt when
/// the intersection is (or cannot be shown within budget to be non-) empty.
std::optional<std::uint64_t> least_element_in_block(const PartitionFilter& f, std::uint64_t k,
                                                    const SetDescriptor& s,
                                                    std::uint64_t budget = 1u << 16);

// ---------------------------------------------------------------------------
// Dyadic subsets of [0,1) and two-part measurable sets
// ---------------------------------------------------------------------------

struct DyadicInterval {
    Rational lo, hi; // dyadic rationals, 0 <= lo < hi <= 1
};

/// Finite union of half-open intervals with dyadic endpoints; kept sorted,
/// disjoint and merged.
class DyadicSet {
public:
    static DyadicSet empty_set();
    static DyadicSet full();
    static DyadicSet of(std::vector<DyadicInterval> ivs);

    const std::vector<DyadicInterval>& intervals() const { return iv_; }
    bool is_empty() const { return iv_.empty(); }
    Rational length() const;

    DyadicSet complemented() const;
    static DyadicSet unite(const DyadicSet& a, const DyadicSet& b);
    static DyadicSet intersect(const DyadicSet& a, const DyadicSet& b);
    Rational overlap_length(const DyadicInterval& piece) const;

    std::string str() const;
    static DyadicSet from_sexpr(const SExpr& e);
    friend bool operator==(const DyadicSet& a, const DyadicSet& b);

private:
    std::vector<DyadicInterval> iv_;
};

/// Subset of the two-part space: atom indices plus a dyadic chunk of [0,1).
struct MeasurableSet {
    SetDescriptor atoms;
    DyadicSet diffuse;

    static MeasurableSet atoms_only(SetDescriptor s) { return {std::move(s), DyadicSet::empty_set()}; }
    static MeasurableSet everything() { return {SetDescriptor::naturals(), DyadicSet::full()}; }
    static MeasurableSet nothing() { return {SetDescriptor::empty(), DyadicSet::empty_set()}; }

    MeasurableSet complemented() const {
        return {SetDescriptor::complement(atoms), diffuse.complemented()};
    }
    static MeasurableSet intersect(const MeasurableSet& a, const MeasurableSet& b) {
        return {SetDescriptor::set_intersection(a.atoms, b.atoms),
                DyadicSet::intersect(a.diffuse, b.diffuse)};
    }
    static MeasurableSet unite(const MeasurableSet& a, const MeasurableSet& b) {
        return {SetDescriptor::set_union(a.atoms, b.atoms), DyadicSet::unite(a.diffuse, b.diffuse)};
    }

    std::string str() const;
    static MeasurableSet from_sexpr(const SExpr& e);
};

} // namespace lmeas
