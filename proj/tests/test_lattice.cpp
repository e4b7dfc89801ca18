#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmeas/dsequence.hpp"
#include "lmeas/interval.hpp"
#include "lmeas/sequences.hpp"

using namespace lmeas;

namespace {

// deterministic generator for property tests
struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
    Rational small_rational() {
        long num = static_cast<long>(below(41)) - 20;
        long den = 1 + static_cast<long>(below(7));
        return Rational(num, den);
    }
    LatticeElement element(int dim) {
        std::vector<Rational> c;
        for (int i = 0; i < dim; ++i) c.push_back(small_rational());
        return LatticeElement(std::move(c));
    }
};

LatticeElement vec2(long a, long b) {
    return LatticeElement({Rational(a), Rational(b)});
}

} // namespace

TEST_CASE("sup_finite componentwise maxima") {
    std::vector<LatticeElement> xs{vec2(1, 3), vec2(2, 0)};
    CHECK(sup_finite(xs) == vec2(2, 3));

    std::vector<LatticeElement> single{vec2(5, -7)};
    CHECK(sup_finite(single) == vec2(5, -7));

    // componentwise max by hand: (-1,2), (0,0), (1,-5) -> (1,2)
    std::vector<LatticeElement> three{vec2(-1, 2), vec2(0, 0), vec2(1, -5)};
    CHECK(sup_finite(three) == vec2(1, 2));

    CHECK_THROWS_AS(sup_finite(std::span<const LatticeElement>{}), DimensionMismatchError);
    std::vector<LatticeElement> mixed{vec2(1, 2), LatticeElement::scalar(1)};
    CHECK_THROWS_AS(sup_finite(mixed), DimensionMismatchError);
}

TEST_CASE("lattice identities on random triples") {
    SplitMix rng{42};
    for (int trial = 0; trial < 200; ++trial) {
        int dim = 1 + static_cast<int>(rng.below(3));
        LatticeElement a = rng.element(dim), b = rng.element(dim), c = rng.element(dim);
        CHECK(sup(a, a) == a);
        CHECK(inf(a, a) == a);
        CHECK(sup(a, b) == sup(b, a));
        CHECK(inf(a, b) == inf(b, a));
        CHECK(sup(sup(a, b), c) == sup(a, sup(b, c)));
        CHECK(inf(inf(a, b), c) == inf(a, inf(b, c)));
        // triangle inequality and the sup-contraction bound
        CHECK(leq(abs(a + b), abs(a) + abs(b)));
        CHECK(leq(abs(sup(a, c) - sup(b, c)), abs(a - b)));
        // |a| = a ∨ (-a) >= 0
        CHECK(abs(a) == sup(a, -a));
        CHECK(abs(a).is_nonneg());
    }
}

TEST_CASE("regulator closed forms evaluate exactly") {
    Regulator g = Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2));
    CHECK(g.eval(1) == LatticeElement::scalar(Rational(1, 2)));
    CHECK(g.eval(10) == LatticeElement::scalar(Rational(1, 1024)));

    Regulator h = Regulator::harmonic(LatticeElement::scalar(3));
    CHECK(h.eval(4) == LatticeElement::scalar(Rational(3, 4)));

    Regulator s = Regulator::sum(Regulator::scaled(g, Rational(2)), h);
    CHECK(s.eval(2) == LatticeElement::scalar(Rational(1, 2) + Rational(3, 2)));

    Regulator sh = Regulator::shifted(g, 3);
    CHECK(sh.eval(1) == g.eval(4));

    // tail of a geometric: Σ_{j>=n} 2^-j = 2^(1-n)
    Regulator t = Regulator::tail(g);
    CHECK(t.eval(1) == LatticeElement::scalar(1));
    CHECK(t.eval(5) == LatticeElement::scalar(Rational(1, 16)));
    CHECK_THROWS_AS(Regulator::tail(h), NoClosedFormTailError);

    CHECK_THROWS_AS(Regulator::geometric(LatticeElement::scalar(-1), Rational(1, 2)), Error);
    CHECK_THROWS_AS(Regulator::geometric(LatticeElement::scalar(1), Rational(2)), Error);
}

TEST_CASE("regulators are nonincreasing") {
    // full sweep for a plain geometric, incremental oracle
    Rational rho(3, 5);
    Rational value = rho;
    Regulator g = Regulator::geometric(LatticeElement::scalar(2), rho);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        CHECK(g.eval(n) == LatticeElement::scalar(2 * value));
        Rational next = value * rho;
        CHECK(next <= value);
        value = next;
    }
    // sampled sweep for every constructor combination
    std::vector<Regulator> regs{
        Regulator::harmonic(LatticeElement::scalar(5)),
        Regulator::geometric(vec2(1, 3), Rational(1, 4)),
        Regulator::scaled(Regulator::harmonic(vec2(2, 1)), Rational(3, 2)),
        Regulator::sum(Regulator::harmonic(LatticeElement::scalar(1)),
                       Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2))),
        Regulator::shifted(Regulator::geometric(LatticeElement::scalar(1), Rational(2, 3)), 7),
        Regulator::tail(Regulator::geometric(vec2(1, 2), Rational(1, 3))),
        Regulator::zero(2),
    };
    std::vector<std::uint64_t> samples{1, 2, 3, 5, 10, 100, 999, 1000, 9999, 10000};
    for (const auto& r : regs) {
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            CHECK(leq(r.eval(samples[i + 1]), r.eval(samples[i])));
            CHECK(r.eval(samples[i]).is_nonneg());
        }
    }
}

TEST_CASE("first_index_leq") {
    Regulator g = Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2));
    CHECK(*g.first_index_leq(LatticeElement::scalar(Rational(1, 8))) == 3);
    CHECK(*g.first_index_leq(LatticeElement::scalar(1)) == 1);
    CHECK(!g.first_index_leq(LatticeElement::scalar(0)));
    Regulator z = Regulator::zero(1);
    CHECK(*z.first_index_leq(LatticeElement::scalar(0)) == 1);
}

TEST_CASE("o-convergence check against closed forms") {
    Regulator r = Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2));

    // x_k = 2^-k converges with its own regulator
    ElementSequence x = ElementSequence::geometric(LatticeElement::scalar(1), Rational(1, 2));
    Verdict v = o_convergence_check(x, LatticeElement::scalar(0), r, 30);
    CHECK(v.outcome == Outcome::Holds);

    // a constant nonzero sequence fails, witness re-verifiable
    ElementSequence c = ElementSequence::constant(LatticeElement::scalar(Rational(1, 3)));
    Verdict vc = o_convergence_check(c, LatticeElement::scalar(0), r, 10);
    CHECK(vc.outcome == Outcome::Fails);
    REQUIRE(vc.witness.has_value());
    {
        std::uint64_t n = vc.witness->indices[0], k = vc.witness->indices[1];
        CHECK(k >= n);
        CHECK(!leq(abs(c.at(k) - LatticeElement::scalar(0)), r.eval(n)));
    }

    // x_k = 1/k against a geometric regulator: oracle = exhaustive comparison
    ElementSequence hseq = ElementSequence::harmonic(LatticeElement::scalar(1));
    Verdict vh = o_convergence_check(hseq, LatticeElement::scalar(0), r, 50);
    CHECK(vh.outcome == Outcome::Fails);
    bool oracle_found = false;
    for (std::uint64_t n = 1; n <= 50 && !oracle_found; ++n)
        for (std::uint64_t k = n; k <= 50 && !oracle_found; ++k)
            if (Rational(1, BigInt(k)) > rational_pow(Rational(1, 2), n)) oracle_found = true;
    CHECK(oracle_found);
    // Fails is monotone in depth
    CHECK(o_convergence_check(hseq, LatticeElement::scalar(0), r, 80).outcome == Outcome::Fails);

    // a bare prefix can never certify Holds
    std::vector<LatticeElement> prefix;
    for (std::uint64_t k = 1; k <= 20; ++k)
        prefix.push_back(rational_pow(Rational(1, 2), k) * LatticeElement::scalar(1));
    Verdict vp = o_convergence_check(prefix, LatticeElement::scalar(0), r, 20);
    CHECK(vp.outcome == Outcome::Unknown);
}

TEST_CASE("domination and the distributivity probe") {
    // rows(i).eval(j) = 2^-j for every i
    DSequence d{1,
                [](std::uint64_t) {
                    return Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2));
                },
                LatticeElement::scalar(1)};
    auto phi3 = [](std::uint64_t) -> std::uint64_t { return 3; };
    CHECK(domination(d, phi3, 5) == LatticeElement::scalar(Rational(1, 8)));
    auto phi_id = [](std::uint64_t i) { return i; };
    CHECK(domination(d, phi_id, 1) == d.rows(1).eval(phi_id(1)));

    // rows(i).eval(j) = (1/i)·2^-j, phi = id, depth 4: hand-enumerated sup
    DSequence d2{1,
                 [](std::uint64_t i) {
                     return Regulator::scaled(
                         Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2)),
                         Rational(1, BigInt(i)));
                 },
                 LatticeElement::scalar(1)};
    // terms: 1/2, 1/8, 1/24, 1/64 -> sup 1/2
    CHECK(domination(d2, phi_id, 4) == LatticeElement::scalar(Rational(1, 2)));

    // domination is nondecreasing in depth
    for (std::uint64_t depth = 1; depth < 8; ++depth)
        CHECK(leq(domination(d2, phi_id, depth), domination(d2, phi_id, depth + 1)));

    // probe over constant maps phi_m ≡ m, m <= 10: min over 2^-m = 2^-10
    std::vector<std::function<std::uint64_t(std::uint64_t)>> phis;
    for (std::uint64_t m = 1; m <= 10; ++m)
        phis.push_back([m](std::uint64_t) { return m; });
    CHECK(weak_sigma_distributivity_probe(d, phis, 5) ==
          LatticeElement::scalar(Rational(1, 1024)));
    // singleton sample equals the domination itself
    std::vector<std::function<std::uint64_t(std::uint64_t)>> one{phi_id};
    CHECK(weak_sigma_distributivity_probe(d2, one, 4) == domination(d2, phi_id, 4));
    // zero rows give zero
    DSequence dz{1, [](std::uint64_t) { return Regulator::zero(1); },
                 LatticeElement::scalar(0)};
    CHECK(weak_sigma_distributivity_probe(dz, one, 4) == LatticeElement::scalar(0));
}

TEST_CASE("value intervals") {
    ValueInterval a(LatticeElement::scalar(Rational(-1)), LatticeElement::scalar(Rational(2)));
    CHECK(a.abs_bounds().lower() == LatticeElement::scalar(0));
    CHECK(a.abs_bounds().upper() == LatticeElement::scalar(2));
    CHECK(a.contains(LatticeElement::scalar(0)));
    CHECK(!a.certainly_leq(LatticeElement::scalar(1)));
    CHECK(!a.certainly_not_leq(LatticeElement::scalar(1)));
    ValueInterval b = ValueInterval::exact(LatticeElement::scalar(3));
    CHECK(b.certainly_not_leq(LatticeElement::scalar(2)));
    CHECK(consistent(a, ValueInterval::exact(LatticeElement::scalar(1))));
    CHECK(!consistent(b, a));
    CHECK((a + b).upper() == LatticeElement::scalar(5));
    CHECK((Rational(-2) * a).lower() == LatticeElement::scalar(-4));
}
