#include "lmeas/rational.hpp"

namespace lmeas {

Rational rational_pow(const Rational& base, std::uint64_t e) {
    if (e == 0) return Rational(1);
    BigInt n = boost::multiprecision::pow(numerator(base), static_cast<unsigned>(e));
    BigInt d = boost::multiprecision::pow(denominator(base), static_cast<unsigned>(e));
    return Rational(n, d);
}

unsigned dyadic_valuation_of(std::uint64_t n) {
    unsigned v = 0;
    while (n % 2 == 0) {
        ++v;
        n /= 2;
    }
    return v;
}

bool is_dyadic(const Rational& r) {
    BigInt d = denominator(r);
    while (d % 2 == 0) d /= 2;
    return d == 1;
}

std::string rational_str(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(std::string_view text) {
    if (text.empty()) throw ParseError("empty rational", 0);
    try {
        return Rational(std::string(text));
    } catch (const std::exception&) {
        throw ParseError("bad rational '" + std::string(text) + "'", 0);
    }
}

} // namespace lmeas
