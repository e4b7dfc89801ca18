#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lmeas/lattice.hpp"

namespace lmeas {

/// A closed-form (o)-sequence: decreasing, positive, with componentwise
/// infimum zero. Closed forms keep the infimum-zero invariant certifiable and
/// make tail bounds computable; arbitrary callbacks are deliberately not
/// accepted as regulators.
class Regulator {
public:
    enum class Kind { Harmonic, Geometric, Scaled, Sum, Shifted, Tail };

    /// n ↦ c/n with c >= 0.
    static Regulator harmonic(LatticeElement c);
    /// n ↦ c·rho^n with c >= 0 and 0 < rho < 1.
    static Regulator geometric(LatticeElement c, Rational rho);
    static Regulator zero(int dim);
    /// n ↦ k·base(n) with k > 0.
    static Regulator scaled(Regulator base, Rational k);
    static Regulator sum(Regulator a, Regulator b);
    /// n ↦ base(n + offset).
    static Regulator shifted(Regulator base, std::uint64_t offset);
    /// n ↦ Σ_{j>=n} base(j). Requires a geometrically summable base;
    /// throws NoClosedFormTailError otherwise (e.g. harmonic).
    static Regulator tail(Regulator base);

    Kind kind() const;
    int dim() const;

    /// Value at n >= 1. Exact.
    LatticeElement eval(std::uint64_t n) const;

    bool component_identically_zero(int i) const;
    bool identically_zero() const;

    /// Least n >= from with eval(n) <= target componentwise; nullopt when no
    /// such index exists (a strictly positive component against a zero or
    /// negative target). Throws Error if the search exceeds 2^61.
    std::optional<std::uint64_t> first_index_leq(const LatticeElement& target,
                                                 std::uint64_t from = 1) const;

    struct GeomTerm {
        LatticeElement coeff;
        Rational rho;
    };
    /// Exact representation eval(n) = Σ coeff_i·rho_i^n when the tree is
    /// harmonic-free; nullopt otherwise.
    std::optional<std::vector<GeomTerm>> as_geometric_terms() const;

    std::string str() const;

private:
    struct Node;
    explicit Regulator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static LatticeElement eval_node(const Node& n, std::uint64_t k);
    static bool comp_zero(const Node& n, int i);
    std::shared_ptr<const Node> node_;
};

Regulator regulator_from_sexpr(const SExpr& e);

} // namespace lmeas
