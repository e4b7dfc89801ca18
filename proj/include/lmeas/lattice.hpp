#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "lmeas/rational.hpp"
#include "lmeas/sexpr.hpp"

namespace lmeas {

/// An element of the vector lattice: a vector in Q^d ordered componentwise.
/// All arithmetic is exact; order queries are partial (leq(a,b) and leq(b,a)
/// may both be false).
class LatticeElement {
public:
    explicit LatticeElement(std::vector<Rational> coords);
    LatticeElement(std::initializer_list<Rational> coords);

    static LatticeElement zero(int dim);
    static LatticeElement constant(int dim, const Rational& value);
    static LatticeElement scalar(const Rational& value);

    int dim() const { return static_cast<int>(coords_.size()); }
    const Rational& operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
    const std::vector<Rational>& coords() const { return coords_; }

    bool is_zero() const;
    bool is_nonneg() const;

    std::string str() const; // canonical "(vec a b ...)"

    friend bool operator==(const LatticeElement& a, const LatticeElement& b) {
        return a.coords_ == b.coords_;
    }
    friend bool operator!=(const LatticeElement& a, const LatticeElement& b) { return !(a == b); }

private:
    std::vector<Rational> coords_;
};

void require_same_dim(const LatticeElement& a, const LatticeElement& b, const char* who);

LatticeElement sup(const LatticeElement& a, const LatticeElement& b);
LatticeElement inf(const LatticeElement& a, const LatticeElement& b);
LatticeElement abs(const LatticeElement& a);
LatticeElement pos_part(const LatticeElement& a); // a ∨ 0
LatticeElement neg_part(const LatticeElement& a); // (−a) ∨ 0

LatticeElement operator+(const LatticeElement& a, const LatticeElement& b);
LatticeElement operator-(const LatticeElement& a, const LatticeElement& b);
LatticeElement operator-(const LatticeElement& a);
LatticeElement operator*(const Rational& k, const LatticeElement& a);

/// Componentwise a ≤ b.
bool leq(const LatticeElement& a, const LatticeElement& b);

LatticeElement sup_finite(std::span<const LatticeElement> xs);
LatticeElement inf_finite(std::span<const LatticeElement> xs);

/// Parses "(vec a b ...)".
LatticeElement lattice_from_sexpr(const SExpr& e);

} // namespace lmeas
