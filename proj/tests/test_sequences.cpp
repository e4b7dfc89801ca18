#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmeas/filters.hpp"
#include "lmeas/sequences.hpp"

using namespace lmeas;

namespace {

struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
    Rational rat(long lo, long hi, long den_max = 4) {
        long num = lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
        long den = 1 + static_cast<long>(below(static_cast<std::uint64_t>(den_max)));
        return Rational(num, den);
    }
};

LatticeElement sc(const Rational& r) { return LatticeElement::scalar(r); }

// brute-force check of a good-set analysis against pointwise membership
void check_good_set(const ElementSequence& x, const LatticeElement& limit,
                    const LatticeElement& t, std::uint64_t probe_to) {
    auto gb = x.good_set(limit, t);
    for (std::uint64_t k = 1; k <= probe_to; ++k) {
        bool in = leq(abs(x.at(k) - limit), t);
        if (gb.exact) CHECK(gb.exact->member(k) == in);
        if (gb.under && gb.under->member(k)) CHECK(in);
        if (gb.over && !gb.over->member(k)) CHECK(!in);
    }
}

} // namespace

TEST_CASE("good-set analysis matches pointwise membership") {
    SplitMix rng{2024};
    for (int trial = 0; trial < 80; ++trial) {
        Rational rho(1 + static_cast<long>(rng.below(3)), 4); // 1/4, 1/2, 3/4
        LatticeElement offset = sc(rng.rat(-3, 3));
        LatticeElement coeff = sc(rng.rat(-4, 4));
        LatticeElement limit = sc(rng.rat(-3, 3));
        LatticeElement t = sc(rng.rat(0, 3));
        check_good_set(ElementSequence::affine_geometric(offset, coeff, rho), limit, t, 150);
        check_good_set(ElementSequence::harmonic(coeff), limit, t, 150);
        check_good_set(ElementSequence::n_geometric(coeff, rho), LatticeElement::scalar(0), t,
                       150);
        auto ep = PeriodicSet::arith_prog(1 + rng.below(4), 1 + rng.below(4));
        check_good_set(ElementSequence::count_geometric(coeff, rho, ep),
                       LatticeElement::scalar(0), t, 150);
        check_good_set(
            ElementSequence::indicator_mix(ep, ElementSequence::constant(offset),
                                           ElementSequence::geometric(coeff, rho)),
            limit, t, 150);
    }
}

TEST_CASE("tail_abs_sup is a sound upper bound, exact for monotone forms") {
    SplitMix rng{77};
    for (int trial = 0; trial < 60; ++trial) {
        Rational rho(1 + static_cast<long>(rng.below(3)), 4);
        LatticeElement offset = sc(rng.rat(-2, 2));
        LatticeElement coeff = sc(rng.rat(-3, 3));
        LatticeElement limit = sc(rng.rat(-2, 2));
        std::uint64_t from = 1 + rng.below(10);

        ElementSequence seqs[] = {ElementSequence::affine_geometric(offset, coeff, rho),
                                  ElementSequence::harmonic(coeff),
                                  ElementSequence::n_geometric(coeff, rho)};
        for (const auto& x : seqs) {
            auto ts = x.tail_abs_sup(limit, from);
            REQUIRE(ts.has_value());
            LatticeElement brute = LatticeElement::zero(1);
            for (std::uint64_t k = from; k <= from + 400; ++k)
                brute = sup(brute, abs(x.at(k) - limit));
            CHECK(leq(brute, *ts)); // soundness on a long window
        }
        // exactness for the affine geometric family: the sup is attained at
        // the first index or at the limit
        ElementSequence ag = ElementSequence::affine_geometric(offset, coeff, rho);
        LatticeElement expect = sup(abs(ag.at(from) - limit), abs(offset - limit));
        CHECK(*ag.tail_abs_sup(limit, from) == expect);
    }
}

TEST_CASE("table sequences") {
    ElementSequence tail = ElementSequence::geometric(sc(Rational(1)), Rational(1, 2));
    ElementSequence t = ElementSequence::table({sc(Rational(5)), sc(Rational(0))}, tail);
    CHECK(t.at(1) == sc(Rational(5)));
    CHECK(t.at(2) == sc(Rational(0)));
    CHECK(t.at(3) == sc(Rational(1, 8)));
    auto gb = t.good_set(LatticeElement::scalar(0), sc(Rational(1, 4)));
    REQUIRE(gb.exact.has_value());
    CHECK(!gb.exact->member(1));
    CHECK(gb.exact->member(2));
    CHECK(!gb.exact->member(3));
    CHECK(gb.exact->member(4));
}

TEST_CASE("cofinite-filter convergence agrees with order convergence on aligned families") {
    // envelope-aligned families: dominated by the regulator (both Hold) or
    // violating on a stationary set (both Fail); see the generator notes
    PartitionFilter cof = PartitionFilter::singletons();
    SplitMix rng{5150};
    int holds = 0, fails = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rational rho(1 + static_cast<long>(rng.below(2)), 4); // 1/4 or 1/2
        LatticeElement c = sc(Rational(1 + static_cast<long>(rng.below(5))));
        Regulator r = Regulator::geometric(c, rho);
        ElementSequence x = [&]() {
            switch (rng.below(3)) {
                case 0: {
                    // dominated: x_k = alpha·c·rho^k with alpha <= 1
                    Rational alpha(static_cast<long>(rng.below(3)), 2);
                    return ElementSequence::geometric(alpha * c, rho);
                }
                case 1:
                    // constant offset: violates persistently
                    return ElementSequence::constant(sc(rng.rat(1, 3)));
                default: {
                    // regulator-dominated plus a persistent bump on a progression
                    auto ep = PeriodicSet::arith_prog(1 + rng.below(3), 2 + rng.below(3));
                    return ElementSequence::indicator_mix(
                        ep, ElementSequence::constant(c + sc(Rational(1))),
                        ElementSequence::geometric(c, rho));
                }
            }
        }();
        Verdict vo = o_convergence_check(x, LatticeElement::scalar(0), r, 48);
        Verdict vf = filter_o_convergence(cof, x, LatticeElement::scalar(0), r, 48);
        CHECK(vo.outcome == vf.outcome);
        if (vo.outcome == Outcome::Holds) ++holds;
        if (vo.outcome == Outcome::Fails) ++fails;
    }
    CHECK(holds > 10);
    CHECK(fails > 10);
}
