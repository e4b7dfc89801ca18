#include "lmeas/interval.hpp"

namespace lmeas {

ValueInterval::ValueInterval(LatticeElement lower, LatticeElement upper)
    : lo_(std::move(lower)), hi_(std::move(upper)) {
    require_same_dim(lo_, hi_, "ValueInterval");
    if (!leq(lo_, hi_)) throw Error("ValueInterval: lower must be <= upper");
}

ValueInterval ValueInterval::widened(const LatticeElement& slack) const {
    if (!slack.is_nonneg()) throw Error("ValueInterval::widened: slack must be nonnegative");
    return {lo_ - slack, hi_ + slack};
}

ValueInterval ValueInterval::abs_bounds() const {
    std::vector<Rational> lo, hi;
    lo.reserve(static_cast<std::size_t>(dim()));
    hi.reserve(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) {
        const Rational& a = lo_[i];
        const Rational& b = hi_[i];
        Rational alo = a > 0 ? a : (b < 0 ? Rational(-b) : Rational(0));
        Rational ahi = (a < 0 ? Rational(-a) : a);
        Rational babs = (b < 0 ? Rational(-b) : b);
        if (babs > ahi) ahi = babs;
        lo.push_back(std::move(alo));
        hi.push_back(std::move(ahi));
    }
    return {LatticeElement(std::move(lo)), LatticeElement(std::move(hi))};
}

bool ValueInterval::certainly_not_leq(const LatticeElement& bound) const {
    require_same_dim(lo_, bound, "certainly_not_leq");
    for (int i = 0; i < dim(); ++i)
        if (lo_[i] > bound[i]) return true;
    return false;
}

ValueInterval operator+(const ValueInterval& a, const ValueInterval& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
}

ValueInterval operator-(const ValueInterval& a, const ValueInterval& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
}

ValueInterval operator*(const Rational& k, const ValueInterval& a) {
    if (k >= 0) return {k * a.lo_, k * a.hi_};
    return {k * a.hi_, k * a.lo_};
}

std::string ValueInterval::str() const {
    if (is_exact()) return lo_.str();
    return "[" + lo_.str() + ", " + hi_.str() + "]";
}

bool consistent(const ValueInterval& a, const ValueInterval& b) {
    require_same_dim(a.lower(), b.lower(), "consistent");
    for (int i = 0; i < a.dim(); ++i) {
        Rational lo = a.lower()[i] > b.lower()[i] ? a.lower()[i] : b.lower()[i];
        Rational hi = a.upper()[i] < b.upper()[i] ? a.upper()[i] : b.upper()[i];
        if (lo > hi) return false;
    }
    return true;
}

} // namespace lmeas
