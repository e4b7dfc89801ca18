#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmeas/filters.hpp"

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
};

SetDescriptor evens() { return SetDescriptor::arith_prog(2, 2); }
SetDescriptor odds() { return SetDescriptor::arith_prog(1, 2); }

// random descriptor from the non-opaque grammar
SetDescriptor random_descriptor(SplitMix& rng, int budget) {
    if (budget <= 0 || rng.below(3) == 0) {
        switch (rng.below(3)) {
            case 0: {
                std::vector<std::uint64_t> elems;
                for (std::uint64_t i = rng.below(5); i > 0; --i)
                    elems.push_back(1 + rng.below(40));
                return SetDescriptor::finite(std::move(elems));
            }
            case 1:
                return SetDescriptor::arith_prog(rng.below(12), 1 + rng.below(8));
            default:
                return SetDescriptor::dyadic_valuation(static_cast<unsigned>(rng.below(5)));
        }
    }
    switch (rng.below(4)) {
        case 0:
            return SetDescriptor::complement(random_descriptor(rng, budget - 1));
        case 1:
            return SetDescriptor::set_union(random_descriptor(rng, budget - 1),
                                            random_descriptor(rng, budget - 1));
        case 2:
            return SetDescriptor::set_intersection(random_descriptor(rng, budget - 1),
                                                   random_descriptor(rng, budget - 1));
        default:
            return SetDescriptor::block_union(PartitionFilter::dyadic_valuation_blocks(),
                                              SetDescriptor::finite({1 + rng.below(4)}));
    }
}

} // namespace

TEST_CASE("descriptor membership basics") {
    CHECK(evens().contains(4));
    CHECK(!evens().contains(5));
    CHECK(!evens().contains(0));
    // dyadic valuation: 2^3 exactly divides 24
    SetDescriptor v3 = SetDescriptor::dyadic_valuation(3);
    CHECK(v3.contains(8));
    CHECK(v3.contains(24));
    CHECK(!v3.contains(16));
    CHECK(!v3.contains(4));
    // block union over the dyadic filter: odds are block 1
    SetDescriptor blk1 = SetDescriptor::block_union(PartitionFilter::dyadic_valuation_blocks(),
                                                    SetDescriptor::finite({1}));
    CHECK(blk1.contains(7));
    CHECK(!blk1.contains(6));
    CHECK(SetDescriptor::naturals().contains(12345));
    CHECK(!SetDescriptor::empty().contains(1));
}

TEST_CASE("eventually periodic conversion agrees with membership") {
    SplitMix rng{7};
    for (int trial = 0; trial < 120; ++trial) {
        SetDescriptor s = random_descriptor(rng, 3);
        auto ep = to_periodic(s);
        if (!ep) continue;
        for (int probe = 0; probe < 64; ++probe) {
            std::uint64_t n = 1 + rng.below(3000);
            CHECK(ep->member(n) == s.contains(n));
        }
        // counting agrees with a direct scan
        std::uint64_t bound = 200 + rng.below(200);
        std::uint64_t scan = 0;
        for (std::uint64_t n = 1; n <= bound; ++n)
            if (s.contains(n)) ++scan;
        CHECK(ep->count_leq(bound) == scan);
    }
}

TEST_CASE("boolean algebra laws pointwise") {
    SplitMix rng{11};
    for (int trial = 0; trial < 60; ++trial) {
        SetDescriptor a = random_descriptor(rng, 2);
        SetDescriptor b = random_descriptor(rng, 2);
        SetDescriptor lhs = SetDescriptor::complement(SetDescriptor::set_union(a, b));
        SetDescriptor rhs = SetDescriptor::set_intersection(SetDescriptor::complement(a),
                                                            SetDescriptor::complement(b));
        for (int probe = 0; probe < 40; ++probe) {
            std::uint64_t n = 1 + rng.below(500);
            CHECK(lhs.contains(n) == rhs.contains(n));
            CHECK(SetDescriptor::complement(SetDescriptor::complement(a)).contains(n) ==
                  a.contains(n));
        }
    }
}

TEST_CASE("in_ideal: exact decisions") {
    PartitionFilter cof = PartitionFilter::singletons();
    CHECK(in_ideal(cof, SetDescriptor::finite({3, 7}), 16).outcome == Outcome::Holds);
    CHECK(in_ideal(cof, evens(), 16).outcome == Outcome::Fails);

    PartitionFilter dy = PartitionFilter::dyadic_valuation_blocks();
    // one full valuation class is exactly one block
    Verdict v = in_ideal(dy, SetDescriptor::dyadic_valuation(3), 16);
    CHECK(v.outcome == Outcome::Holds);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->indices == std::vector<std::uint64_t>{4});
    // odds are block 1: in the ideal despite being infinite
    CHECK(in_ideal(dy, odds(), 16).outcome == Outcome::Holds);
    // evens meet every block beyond the first: stationary
    CHECK(in_ideal(dy, evens(), 16).outcome == Outcome::Fails);
    // multiples of 3 hit unbounded valuations
    CHECK(in_ideal(dy, SetDescriptor::arith_prog(3, 3), 16).outcome == Outcome::Fails);
    // a + jd with v2(a) < v2(d) stays in one valuation class
    CHECK(in_ideal(dy, SetDescriptor::arith_prog(2, 4), 16).outcome == Outcome::Holds);

    // ideal closed under finite unions; downward closure
    SplitMix rng{23};
    for (int trial = 0; trial < 40; ++trial) {
        SetDescriptor s = random_descriptor(rng, 2);
        SetDescriptor t = random_descriptor(rng, 2);
        for (const auto& f : {cof, dy}) {
            if (in_ideal(f, s, 12).outcome == Outcome::Holds &&
                in_ideal(f, t, 12).outcome == Outcome::Holds) {
                CHECK(in_ideal(f, SetDescriptor::set_union(s, t), 12).outcome == Outcome::Holds);
            }
            if (in_ideal(f, s, 12).outcome == Outcome::Holds) {
                CHECK(in_ideal(f, SetDescriptor::set_intersection(s, t), 12).outcome ==
                      Outcome::Holds);
            }
            if (is_stationary(f, s, 12).outcome == Outcome::Holds) {
                CHECK(is_stationary(f, SetDescriptor::set_union(s, t), 12).outcome ==
                      Outcome::Holds);
            }
        }
    }
}

TEST_CASE("stationarity and witnesses") {
    PartitionFilter cof = PartitionFilter::singletons();
    Verdict v = is_stationary(cof, SetDescriptor::naturals(), 10);
    CHECK(v.outcome == Outcome::Holds);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->indices.size() >= 10);

    CHECK(is_stationary(cof, SetDescriptor::finite({1, 2, 3}), 10).outcome == Outcome::Fails);

    // first element of each block of the ranges filter
    PartitionFilter rg = PartitionFilter::ranges(1, 0); // len(k) = k
    SetDescriptor firsts = select_sparse_stationary(rg, SetDescriptor::naturals(), 10);
    Verdict st = is_stationary(rg, firsts, 10);
    CHECK(st.outcome == Outcome::Holds);
    for (std::uint64_t k = 1; k <= 10; ++k) {
        CHECK(firsts.contains(rg.range_start(k)));
        if (rg.range_len(k) > 1) CHECK(!firsts.contains(rg.range_start(k) + 1));
    }
}

TEST_CASE("select_sparse_stationary") {
    // singleton blocks force the identity
    PartitionFilter cof = PartitionFilter::singletons();
    SetDescriptor j1 = select_sparse_stationary(cof, evens(), 16);
    CHECK(j1.str() == evens().str());

    // dyadic blocks on all of N select the powers of two
    PartitionFilter dy = PartitionFilter::dyadic_valuation_blocks();
    SetDescriptor j2 = select_sparse_stationary(dy, SetDescriptor::naturals(), 16);
    for (unsigned k = 0; k <= 20; ++k) {
        CHECK(j2.contains(std::uint64_t(1) << k));
        CHECK(!j2.contains(3 * (std::uint64_t(1) << k)));
    }

    // one point in the fully contained block
    PartitionFilter rg = PartitionFilter::ranges(1, 0);
    SetDescriptor j = SetDescriptor::set_union(
        SetDescriptor::block_union(rg, SetDescriptor::finite({5})), evens());
    SetDescriptor j3 = select_sparse_stationary(rg, j, 16);
    std::uint64_t s5 = rg.range_start(5);
    CHECK(j3.contains(s5)); // least element of J ∩ A_5 (the block is inside J)
    for (std::uint64_t n = s5 + 1; n < s5 + rg.range_len(5); ++n) CHECK(!j3.contains(n));

    // |J' ∩ A_k ∩ [1..bound]| <= 1 for every builtin filter family
    std::vector<PartitionFilter> filters{cof, rg, dy,
                                         PartitionFilter::table_with_tail({2, 1, 3, 3})};
    for (const auto& f : filters) {
        SetDescriptor sel = select_sparse_stationary(f, SetDescriptor::naturals(), 12);
        for (std::uint64_t k = 1; k <= 12; ++k) {
            std::uint64_t bound = std::min<std::uint64_t>(f.witness_bound(12), 4096);
            int hits = 0;
            for (std::uint64_t n : f.block_members(k, bound))
                if (sel.contains(n)) ++hits;
            CHECK(hits <= 1);
        }
    }

    CHECK_THROWS_AS(select_sparse_stationary(cof, SetDescriptor::finite({1, 2}), 16),
                    NotStationaryError);
}

TEST_CASE("diagonal_witness") {
    PartitionFilter cof = PartitionFilter::singletons();
    // As[n] = cofinite sets missing [1..n]
    std::vector<SetDescriptor> as;
    for (std::uint64_t n = 1; n <= 5; ++n) {
        std::vector<std::uint64_t> head;
        for (std::uint64_t i = 1; i <= n; ++i) head.push_back(i);
        as.push_back(SetDescriptor::complement(SetDescriptor::finite(head)));
    }
    SetDescriptor j = diagonal_witness(cof, as, SetDescriptor::naturals(), 12);
    CHECK(is_stationary(cof, j, 12).outcome == Outcome::Holds);
    // J \ As[n] must be finite; here it is empty on a generous scan
    for (const auto& a : as)
        for (std::uint64_t n = 6; n <= 300; ++n)
            if (j.contains(n)) CHECK(a.contains(n));

    // trivial case: nothing to remove
    std::vector<SetDescriptor> all_n{SetDescriptor::naturals()};
    SetDescriptor j2 = diagonal_witness(cof, all_n, SetDescriptor::naturals(), 12);
    CHECK(is_stationary(cof, j2, 12).outcome == Outcome::Holds);

    // ranges filter with block complements
    PartitionFilter rg = PartitionFilter::ranges(1, 0);
    std::vector<SetDescriptor> as2;
    for (std::uint64_t n = 1; n <= 3; ++n) {
        std::vector<std::uint64_t> ks;
        for (std::uint64_t i = 1; i <= n; ++i) ks.push_back(i);
        as2.push_back(
            SetDescriptor::complement(SetDescriptor::block_union(rg, SetDescriptor::finite(ks))));
    }
    SetDescriptor j3 = diagonal_witness(rg, as2, evens(), 12);
    CHECK(is_stationary(rg, j3, 12).outcome == Outcome::Holds);
    for (const auto& a : as2)
        for (std::uint64_t n = 1; n <= 300; ++n)
            if (j3.contains(n)) CHECK(a.contains(n));
}

TEST_CASE("filter_o_convergence") {
    PartitionFilter cof = PartitionFilter::singletons();
    Regulator r = Regulator::geometric(LatticeElement::scalar(1), Rational(1, 2));

    ElementSequence x = ElementSequence::geometric(LatticeElement::scalar(1), Rational(1, 2));
    CHECK(filter_o_convergence(cof, x, LatticeElement::scalar(0), r, 20).outcome ==
          Outcome::Holds);

    // indicator of the evens: the bad set is stationary under the cofinite filter
    auto ep_evens = *to_periodic(evens());
    ElementSequence ind = ElementSequence::indicator_mix(
        ep_evens, ElementSequence::constant(LatticeElement::scalar(1)),
        ElementSequence::constant(LatticeElement::scalar(0)));
    Verdict v = filter_o_convergence(cof, ind, LatticeElement::scalar(0), r, 20);
    CHECK(v.outcome == Outcome::Fails);

    // the same exceptional set is a single block of the dyadic filter
    PartitionFilter dy = PartitionFilter::dyadic_valuation_blocks();
    auto ep_odds = *to_periodic(odds());
    ElementSequence mix = ElementSequence::indicator_mix(
        ep_odds, ElementSequence::constant(LatticeElement::scalar(1)),
        ElementSequence::geometric(LatticeElement::scalar(1), Rational(1, 2)));
    CHECK(filter_o_convergence(dy, mix, LatticeElement::scalar(0), r, 20).outcome ==
          Outcome::Holds);
    CHECK(filter_o_convergence(cof, mix, LatticeElement::scalar(0), r, 20).outcome ==
          Outcome::Fails);
}

TEST_CASE("partition filter mechanics") {
    std::vector<PartitionFilter> filters{
        PartitionFilter::singletons(), PartitionFilter::ranges(1, 0),
        PartitionFilter::ranges(0, 3), PartitionFilter::dyadic_valuation_blocks(),
        PartitionFilter::table_with_tail({3, 1, 2, 2, 5, 4})};
    for (const auto& f : filters) {
        // block_of is consistent with block_members
        for (std::uint64_t n = 1; n <= 600; ++n) {
            auto members = f.block_members(f.block_of(n), 600);
            CHECK(std::find(members.begin(), members.end(), n) != members.end());
        }
        // every index k <= 12 appears within the witness bound
        for (std::uint64_t k = 1; k <= 12; ++k) {
            std::uint64_t bound = f.witness_bound(k);
            auto least = least_element_in_block(f, k, SetDescriptor::naturals());
            REQUIRE(least.has_value());
            CHECK(*least <= bound);
            CHECK(f.block_of(*least) == k);
        }
        // finite sets always in the ideal (free filter)
        CHECK(in_ideal(f, SetDescriptor::finite({1, 5, 9}), 8).outcome == Outcome::Holds);
    }
    CHECK_THROWS_AS(PartitionFilter::table_with_tail({2, 2}), Error);
}

TEST_CASE("opaque predicates are quarantined") {
    PartitionFilter cof = PartitionFilter::singletons();
    SetDescriptor primes = SetDescriptor::predicate_named("primes");
    CHECK(primes.opaque());
    CHECK(primes.contains(7));
    CHECK(!primes.contains(9));
    // sampled path: enough distinct blocks observed -> certified Fails
    CHECK(in_ideal(cof, primes, 10).outcome == Outcome::Fails);
    // but a deep request cannot be certified either way from samples
    PartitionFilter dy = PartitionFilter::dyadic_valuation_blocks();
    Verdict v = in_ideal(dy, SetDescriptor::set_intersection(primes, evens()), 40);
    CHECK(v.outcome == Outcome::Unknown); // {2} is the only even prime, but opacity blocks the proof
}

TEST_CASE("canonical serialization round-trips byte-identically") {
    std::vector<std::string> canonical{
        "(finite)",
        "(finite 3 7 12)",
        "(arith-prog 2 2)",
        "(dyadic-valuation 3)",
        "(block-union (filter dyadic) (finite 1 2))",
        "(complement (finite))",
        "(union (arith-prog 1 2) (finite 4))",
        "(intersection (arith-prog 0 3) (complement (finite 9)))",
        "(least-in-blocks (filter ranges 1 0) (arith-prog 2 2))",
        "(predicate primes)",
    };
    for (const auto& text : canonical) {
        SetDescriptor s = SetDescriptor::from_sexpr(parse_sexpr(text));
        CHECK(s.str() == text);
    }
    std::vector<std::string> filters{"(filter singletons)", "(filter ranges 2 1)",
                                     "(filter dyadic)", "(filter table 2 1 3)"};
    for (const auto& text : filters) {
        PartitionFilter f = PartitionFilter::from_sexpr(parse_sexpr(text));
        CHECK(f.str() == text);
    }
    // property: print-parse-print is stable on random descriptors
    SplitMix rng{99};
    for (int trial = 0; trial < 50; ++trial) {
        SetDescriptor s = random_descriptor(rng, 3);
        std::string text = s.str();
        CHECK(SetDescriptor::from_sexpr(parse_sexpr(text)).str() == text);
    }
}

TEST_CASE("block validation") {
    // pieces D_k = {2k-1, 2k} partition N
    Block b{[](std::uint64_t k) {
                return SetDescriptor::finite({2 * k - 1, 2 * k});
            },
            SetDescriptor::naturals()};
    CHECK(validate_block(b, 12));
    Block bad{[](std::uint64_t k) {
                  return SetDescriptor::finite({k, k + 1}); // overlapping pieces
              },
              SetDescriptor::naturals()};
    CHECK(!validate_block(bad, 12));
}
