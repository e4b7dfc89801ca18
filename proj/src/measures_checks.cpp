#include <algorithm>

#include "lmeas/measures.hpp"

namespace lmeas {

Regulator s_boundedness_certificate(const Charge& m) {
    Regulator cert =
        Regulator::tail(Regulator::geometric(m.envelope().coeff, m.envelope().rho));
    if (!m.diffuse_pieces().empty())
        cert = Regulator::sum(cert, Regulator::harmonic(m.max_abs_density()));
    return cert;
}

namespace {

bool charge_is_trivial(const Charge& m) {
    return !m.has_charge() || m.at_infinity()->c.is_zero();
}

DyadicSet diffuse_support(const Charge& m) {
    std::vector<DyadicInterval> ivs;
    for (const auto& p : m.diffuse_pieces())
        if (!p.density.is_zero()) ivs.push_back(p.iv);
    return DyadicSet::of(std::move(ivs));
}

// exact brute-force p_j table for small finite spaces:
// p_j = sup{|m(A)| : nu(A) <= 1/j}, all subsets enumerated
std::string brute_force_ac_table(const Charge& m, const Charge& nu, std::uint64_t depth) {
    std::uint64_t n = m.space().atom_count;
    if (n > 20) return "";
    std::size_t total = std::size_t(1) << n;
    std::vector<LatticeElement> msum(total, LatticeElement::zero(m.dim()));
    std::vector<Rational> nsum(total, Rational(0));
    for (std::size_t mask = 1; mask < total; ++mask) {
        std::size_t low = mask & (~mask + 1);
        std::size_t rest = mask ^ low;
        std::uint64_t atom = 1;
        for (std::size_t b = low; b > 1; b >>= 1) ++atom;
        msum[mask] = msum[rest] + m.weight(atom);
        nsum[mask] = nsum[rest] + nu.weight(atom)[0];
    }
    std::string out;
    std::uint64_t levels = std::min<std::uint64_t>(depth, 8);
    for (std::uint64_t j = 1; j <= levels; ++j) {
        LatticeElement pj = LatticeElement::zero(m.dim());
        Rational bound(1, BigInt(j));
        for (std::size_t mask = 0; mask < total; ++mask)
            if (nsum[mask] <= bound) pj = sup(pj, abs(msum[mask]));
        out += " p" + std::to_string(j) + "=" + pj.str();
    }
    return out;
}

} // namespace

Verdict check_absolutely_continuous(const Charge& m, const Charge& nu, std::uint64_t depth) {
    if (!(m.space() == nu.space())) throw Error("check_absolutely_continuous: space mismatch");
    if (nu.dim() != 1) throw Error("check_absolutely_continuous: nu must be scalar");
    if (!nu.nonnegative_structural())
        throw Error("check_absolutely_continuous: nu must be nonnegative");

    // charge-at-infinity rules: a live m-charge needs a live nu-charge on the
    // same filter (otherwise small-nu sets at infinity carry full m-mass)
    if (!charge_is_trivial(m)) {
        if (charge_is_trivial(nu))
            return Verdict::fails(
                depth, Witness{"charge-vs-null-at-infinity", {},
                               "block-tail sets have arbitrarily small nu but m = c"});
        if (!(m.at_infinity()->f == nu.at_infinity()->f))
            throw UnsupportedCombinationError("charges on different filters");
    }

    // atoms: every nu-null atom must be m-null
    PeriodicSet m_support = m.atom_support();
    PeriodicSet nu_support = nu.atom_support();
    auto bad = PeriodicSet::intersect(m_support, nu_support.complemented());
    if (!bad) return Verdict::unknown(depth);
    if (!bad->is_empty()) {
        std::uint64_t atom = *bad->least();
        return Verdict::fails(depth, Witness{"nu-null-atom-with-mass", {atom}, ""});
    }

    // diffuse: m's density support must sit inside nu's
    DyadicSet m_diff = diffuse_support(m);
    DyadicSet nu_diff = diffuse_support(nu);
    DyadicSet escaped = DyadicSet::intersect(m_diff, nu_diff.complemented());
    if (!escaped.is_empty())
        return Verdict::fails(depth,
                              Witness{"nu-null-piece-with-mass", {}, escaped.str()});

    Witness w{"absolutely-continuous", {}, ""};
    if (m.space().kind == AtomicSpace::Kind::FiniteAtoms && m.space().atom_count <= 20)
        w.text = "brute-force" + brute_force_ac_table(m, nu, depth);
    return Verdict::holds(depth, std::move(w));
}

Verdict check_singular(const Charge& m, const Charge& nu, std::uint64_t depth) {
    if (!(m.space() == nu.space())) throw Error("check_singular: space mismatch");
    if (nu.dim() != 1) throw Error("check_singular: nu must be scalar");

    PeriodicSet m_support = m.atom_support();
    PeriodicSet nu_support = nu.atom_support();
    auto shared = PeriodicSet::intersect(m_support, nu_support);
    if (!shared) return Verdict::unknown(depth);
    if (!shared->is_empty()) {
        std::uint64_t atom = *shared->least();
        return Verdict::fails(depth, Witness{"shared-support-atom", {atom}, ""});
    }
    DyadicSet shared_diff = DyadicSet::intersect(diffuse_support(m), diffuse_support(nu));
    if (!shared_diff.is_empty())
        return Verdict::fails(depth, Witness{"shared-support-piece", {}, shared_diff.str()});
    if (!charge_is_trivial(m) && !charge_is_trivial(nu))
        return Verdict::fails(depth, Witness{"both-charges-at-infinity", {}, ""});

    // Holds. Witness convention: F = m's support; nu vanishes on F.
    MeasurableSet f{descriptor_of(m_support), diffuse_support(m)};
    Witness w{"singular-witness-set", {}, f.str()};
    if (!charge_is_trivial(m) && charge_is_trivial(nu) &&
        m.space().kind == AtomicSpace::Kind::CountableAtoms) {
        // (A_k, q_k) construction: A_k = complement of the first k blocks of
        // m's filter; nu(A_k) -> 0 while m(E \ A_k) = 0 for measured E
        w.text += " tail-sets=(complement (block-union " + m.at_infinity()->f.str() +
                  " (finite 1..k)))";
    }
    return Verdict::holds(depth, std::move(w));
}

Verdict check_continuous(const Charge& m, std::uint64_t depth, ContinuityCertificate* cert) {
    Charge mm = m;
    if (!m.nonnegative_structural()) {
        try {
            mm = m.abs_structural(); // continuity of signed m is continuity of v(m)
        } catch (const UnsupportedCombinationError&) {
            return Verdict::unknown(depth);
        }
    }
    if (!mm.atoms_zero()) {
        std::uint64_t atom = *mm.atom_support().least();
        return Verdict::fails(depth, Witness{"indivisible-atom", {atom}, ""});
    }
    if (!charge_is_trivial(mm))
        return Verdict::fails(
            depth, Witness{"charge-at-infinity", {},
                           "every measured finite partition has exactly one piece in F"});
    // purely diffuse (or zero): level-n dyadic partitions with piece mass
    // at most max|density|·2^-n
    LatticeElement md = mm.max_abs_density();
    Regulator p = md.is_zero() ? Regulator::zero(mm.dim())
                               : Regulator::geometric(md, Rational(1, 2));
    if (cert) *cert = ContinuityCertificate{p, depth};
    return Verdict::holds(depth, Witness{"dyadic-partition-certificate", {}, p.str()});
}

Verdict check_purely_finitely_additive(const Charge& m, std::uint64_t depth) {
    if (!m.atoms_zero()) {
        std::uint64_t atom = *m.atom_support().least();
        return Verdict::fails(depth, Witness{"sigma-additive-minorant-atom", {atom}, ""});
    }
    if (!m.diffuse_zero()) {
        const auto& p = m.diffuse_pieces().front();
        return Verdict::fails(depth, Witness{"sigma-additive-minorant-piece", {},
                                             rational_str(p.iv.lo) + " " + rational_str(p.iv.hi)});
    }
    return Verdict::holds(depth);
}

std::vector<std::uint64_t> extract_sigma_subsequence(const std::vector<Charge>& ms,
                                                     const std::vector<SetDescriptor>& h,
                                                     const Regulator& q, std::uint64_t depth) {
    if (ms.empty()) throw Error("extract_sigma_subsequence: no measures");
    // sampled pairwise-disjointness validation
    std::uint64_t bound = std::min<std::uint64_t>(4096, 64 * (h.size() + 1));
    for (std::uint64_t n = 1; n <= bound; ++n) {
        int owners = 0;
        for (const auto& s : h)
            if (s.contains(n)) ++owners;
        if (owners > 1) throw Error("extract_sigma_subsequence: sets not pairwise disjoint");
    }
    std::vector<std::uint64_t> selected;
    std::size_t pos = 0;
    for (std::uint64_t level = 1; level <= depth; ++level) {
        LatticeElement target = q.eval(level);
        bool found = false;
        for (std::size_t j = pos; j < h.size(); ++j) {
            bool ok = true;
            for (const auto& m : ms) {
                if (!leq(m.variation(h[j], depth).upper(), target)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                selected.push_back(static_cast<std::uint64_t>(j + 1));
                pos = j + 1;
                found = true;
                break;
            }
        }
        if (!found) {
            if (selected.size() >= depth) break;
            throw SelectionError("extract_sigma_subsequence: no admissible set at level " +
                                     std::to_string(level),
                                 level);
        }
    }
    return selected;
}

} // namespace lmeas
