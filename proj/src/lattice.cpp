#include "lmeas/lattice.hpp"

#include <algorithm>

namespace lmeas {

LatticeElement::LatticeElement(std::vector<Rational> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw DimensionMismatchError("lattice element needs dim >= 1");
}

LatticeElement::LatticeElement(std::initializer_list<Rational> coords)
    : LatticeElement(std::vector<Rational>(coords)) {}

LatticeElement LatticeElement::zero(int dim) {
    return constant(dim, Rational(0));
}

LatticeElement LatticeElement::constant(int dim, const Rational& value) {
    if (dim < 1) throw DimensionMismatchError("dim must be positive");
    return LatticeElement(std::vector<Rational>(static_cast<std::size_t>(dim), value));
}

LatticeElement LatticeElement::scalar(const Rational& value) {
    return LatticeElement({value});
}

bool LatticeElement::is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
}

bool LatticeElement::is_nonneg() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c >= 0; });
}

std::string LatticeElement::str() const {
    std::string out = "(vec";
    for (const Rational& c : coords_) {
        out += ' ';
        out += rational_str(c);
    }
    out += ')';
    return out;
}

void require_same_dim(const LatticeElement& a, const LatticeElement& b, const char* who) {
    if (a.dim() != b.dim())
        throw DimensionMismatchError(std::string(who) + ": dims " + std::to_string(a.dim()) +
                                     " vs " + std::to_string(b.dim()));
}

namespace {

template <typename F>
LatticeElement zip(const LatticeElement& a, const LatticeElement& b, const char* who, F&& f) {
    require_same_dim(a, b, who);
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(a.dim()));
    for (int i = 0; i < a.dim(); ++i) out.push_back(f(a[i], b[i]));
    return LatticeElement(std::move(out));
}

} // namespace

LatticeElement sup(const LatticeElement& a, const LatticeElement& b) {
    return zip(a, b, "sup", [](const Rational& x, const Rational& y) { return x >= y ? x : y; });
}

LatticeElement inf(const LatticeElement& a, const LatticeElement& b) {
    return zip(a, b, "inf", [](const Rational& x, const Rational& y) { return x <= y ? x : y; });
}

LatticeElement abs(const LatticeElement& a) {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(a.dim()));
    for (int i = 0; i < a.dim(); ++i) out.push_back(a[i] < 0 ? Rational(-a[i]) : a[i]);
    return LatticeElement(std::move(out));
}

LatticeElement pos_part(const LatticeElement& a) {
    return sup(a, LatticeElement::zero(a.dim()));
}

LatticeElement neg_part(const LatticeElement& a) {
    return sup(-a, LatticeElement::zero(a.dim()));
}

LatticeElement operator+(const LatticeElement& a, const LatticeElement& b) {
    return zip(a, b, "operator+", [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

LatticeElement operator-(const LatticeElement& a, const LatticeElement& b) {
    return zip(a, b, "operator-", [](const Rational& x, const Rational& y) { return Rational(x - y); });
}

LatticeElement operator-(const LatticeElement& a) {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(a.dim()));
    for (int i = 0; i < a.dim(); ++i) out.push_back(Rational(-a[i]));
    return LatticeElement(std::move(out));
}

LatticeElement operator*(const Rational& k, const LatticeElement& a) {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(a.dim()));
    for (int i = 0; i < a.dim(); ++i) out.push_back(Rational(k * a[i]));
    return LatticeElement(std::move(out));
}

bool leq(const LatticeElement& a, const LatticeElement& b) {
    require_same_dim(a, b, "leq");
    for (int i = 0; i < a.dim(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

LatticeElement sup_finite(std::span<const LatticeElement> xs) {
    if (xs.empty()) throw DimensionMismatchError("sup_finite: empty list");
    LatticeElement acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = sup(acc, xs[i]);
    return acc;
}

LatticeElement inf_finite(std::span<const LatticeElement> xs) {
    if (xs.empty()) throw DimensionMismatchError("inf_finite: empty list");
    LatticeElement acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = inf(acc, xs[i]);
    return acc;
}

LatticeElement lattice_from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("vec");
    if (args.empty()) throw ParseError("(vec ...) needs at least one coordinate", 0);
    std::vector<Rational> coords;
    for (const auto& a : args) coords.push_back(parse_rational(a.atom_value()));
    return LatticeElement(std::move(coords));
}

} // namespace lmeas
