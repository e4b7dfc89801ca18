#pragma once

#include "lmeas/lattice.hpp"

namespace lmeas {

/// Componentwise interval [lower, upper] certifying a truncated countable sum.
/// Exact values have lower == upper.
class ValueInterval {
public:
    ValueInterval(LatticeElement lower, LatticeElement upper);

    static ValueInterval exact(const LatticeElement& x) { return {x, x}; }
    static ValueInterval zero(int dim) { return exact(LatticeElement::zero(dim)); }

    const LatticeElement& lower() const { return lo_; }
    const LatticeElement& upper() const { return hi_; }
    int dim() const { return lo_.dim(); }
    bool is_exact() const { return lo_ == hi_; }

    /// Widen symmetrically by a nonnegative slack.
    ValueInterval widened(const LatticeElement& slack) const;

    /// Interval of |x| over x in this interval.
    ValueInterval abs_bounds() const;

    bool contains(const LatticeElement& x) const { return leq(lo_, x) && leq(x, hi_); }

    /// Every representable value is <= bound.
    bool certainly_leq(const LatticeElement& bound) const { return leq(hi_, bound); }
    /// No representable value is <= bound (some component's lower end exceeds it).
    bool certainly_not_leq(const LatticeElement& bound) const;

    friend ValueInterval operator+(const ValueInterval& a, const ValueInterval& b);
    friend ValueInterval operator-(const ValueInterval& a, const ValueInterval& b);
    friend ValueInterval operator*(const Rational& k, const ValueInterval& a);

    friend bool operator==(const ValueInterval& a, const ValueInterval& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

    std::string str() const;

private:
    LatticeElement lo_, hi_;
};

/// Both intervals can describe the same true value.
bool consistent(const ValueInterval& a, const ValueInterval& b);

} // namespace lmeas
