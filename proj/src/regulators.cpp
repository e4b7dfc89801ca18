#include "lmeas/regulators.hpp"

#include <algorithm>

namespace lmeas {

Regulator schur_regulator(const Regulator& a, const Regulator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("schur_regulator");
    return Regulator::sum(Regulator::scaled(a, Rational(2)), Regulator::scaled(b, Rational(4)));
}

Regulator finale_regulator(const Regulator& q, const Regulator& b) {
    if (q.dim() != b.dim()) throw DimensionMismatchError("finale_regulator");
    return Regulator::sum(Regulator::sum(Regulator::scaled(q, Rational(2)),
                                         Regulator::scaled(b, Rational(4))),
                          q);
}

std::vector<std::uint64_t> find_w(const Regulator& q, const LatticeElement& u,
                                  std::uint64_t count) {
    if (q.dim() != u.dim()) throw DimensionMismatchError("find_w");
    if (!u.is_nonneg()) throw Error("find_w: u must be nonnegative");
    for (int i = 0; i < u.dim(); ++i)
        if (u[i] == 0 && !q.component_identically_zero(i))
            throw NoSuchMapError("find_w: component " + std::to_string(i) +
                                 " of u is zero against a positive regulator");
    std::vector<std::uint64_t> w;
    std::uint64_t from = 1;
    for (std::uint64_t j = 1; j <= count; ++j) {
        LatticeElement target = rational_pow(Rational(1, 2), j) * u;
        auto idx = q.first_index_leq(target, from);
        if (!idx) throw NoSuchMapError("find_w: no index for level " + std::to_string(j));
        w.push_back(*idx);
        from = *idx + 1;
    }
    return w;
}

Regulator nuovoschur_regulator(const Regulator& q, const Regulator& b,
                               const LatticeElement& u) {
    // validates the existence of the increasing map for both series
    find_w(q, u, 4);
    find_w(b, u, 4);
    Rational two(2);
    LatticeElement two_u = two * u;
    Regulator qb_tail = Regulator::geometric(two_u, Rational(1, 2)); // u·2^(1-N)
    // r_p = 2 b_p + 2 B_p + 2 Q_p with B = Q = qb_tail
    return Regulator::sum(Regulator::scaled(b, Rational(2)),
                          Regulator::scaled(qb_tail, Rational(4)));
}

// ---------------------------------------------------------------------------
// uniform s-boundedness checks
// ---------------------------------------------------------------------------

namespace {

// certified-unbounded violation: (n, j) with j arbitrarily large and
// |m_n(H_j)| not <= target; only the delta-style families support this
std::optional<std::pair<std::uint64_t, std::uint64_t>> unbounded_violation(
    const ChargeFamily& ms, const SetFamily& h, const LatticeElement& target,
    const std::optional<PeriodicSet>& index_set, std::uint64_t depth) {
    if (ms.kind() != ChargeFamily::Kind::IndicatorDeltaRows) return std::nullopt;
    if (h.count()) return std::nullopt; // finite families cannot violate unboundedly
    // m_n = c·δ_n on S: violations at (n, j) with n in S, n in H_j
    Charge probe = ms.at(1); // dim access only
    LatticeElement c_abs = ms.equibound();
    if (leq(c_abs, target)) return std::nullopt;
    // violating measure indices: S (restricted to index_set)
    auto find_desc = [&]() -> std::optional<PeriodicSet> {
        // reconstruct S from the family serialization is heavy; probe instead:
        // scan n and query m_n({n})
        return std::nullopt;
    };
    (void)find_desc;
    // probe rows directly: the violation is reproducible evidence
    for (std::uint64_t n = depth; n <= depth + 4096; ++n) {
        if (index_set && !index_set->member(n)) continue;
        Charge m_n = ms.at(n);
        std::uint64_t j = 0;
        switch (h.kind()) {
            case SetFamily::Kind::Singletons:
                j = n;
                break;
            case SetFamily::Kind::BlocksOf:
                j = h.filter().block_of(n);
                break;
            case SetFamily::Kind::Listed:
                continue;
        }
        ValueInterval v = m_n.evaluate(h.at(j), depth).abs_bounds();
        if (v.certainly_not_leq(target)) return std::make_pair(n, j);
    }
    return std::nullopt;
}

} // namespace

UniformSBoundednessReport uniform_sbounded_check(const ChargeFamily& ms, const SetFamily& h,
                                                 const Regulator& r, std::uint64_t depth) {
    UniformSBoundednessReport rep{UniformMode::Plain, r, Verdict::unknown(depth), {}};
    bool all_found = true;
    for (std::uint64_t k = 1; k <= depth; ++k) {
        LatticeElement target = r.eval(k);
        std::optional<std::uint64_t> jk;
        for (std::uint64_t j = 1; j <= depth + 1 && !jk; ++j) {
            auto bound = ms.family_tail_sup(h, j);
            if (bound && leq(*bound, target)) jk = j;
        }
        if (jk) {
            rep.thresholds.push_back({k, *jk, ""});
        } else {
            all_found = false;
            auto bad = unbounded_violation(ms, h, target, std::nullopt, depth);
            if (bad) {
                rep.verdict = Verdict::fails(
                    depth, Witness{"uniform-sbounded-violation", {k, bad->first, bad->second}, ""});
                return rep;
            }
        }
    }
    rep.verdict = all_found ? Verdict::holds(depth) : Verdict::unknown(depth);
    return rep;
}

UniformSBoundednessReport ideal_uniform_sbounded_check(
    const ChargeFamily& ms, const PartitionFilter& f, const SetFamily& h, const Regulator& r,
    const std::vector<SetDescriptor>& ideal_sample, std::uint64_t depth) {
    UniformSBoundednessReport rep{UniformMode::Ideal, r, Verdict::unknown(depth), {}};
    for (const auto& i : ideal_sample) {
        Verdict v = in_ideal(f, i, depth);
        if (v.outcome != Outcome::Holds)
            throw Error("ideal_uniform_sbounded_check: sample member not in the dual ideal: " +
                        i.str());
    }
    bool all_found = true;
    for (std::uint64_t k = 1; k <= depth; ++k) {
        LatticeElement target = r.eval(k);
        for (const auto& i : ideal_sample) {
            auto iep = to_periodic(i);
            if (!iep) {
                all_found = false;
                continue;
            }
            std::optional<std::uint64_t> lk;
            for (std::uint64_t l = 1; l <= depth + 1 && !lk; ++l) {
                auto bound = ms.family_tail_sup_over(*iep, h, l);
                if (bound && leq(*bound, target)) lk = l;
            }
            if (lk) {
                rep.thresholds.push_back({k, *lk, i.str()});
            } else {
                all_found = false;
                auto bad = unbounded_violation(ms, h, target, iep, depth);
                if (bad) {
                    rep.verdict = Verdict::fails(depth, Witness{"ideal-uniform-violation",
                                                                {k, bad->first, bad->second},
                                                                i.str()});
                    return rep;
                }
            }
        }
    }
    rep.verdict = all_found ? Verdict::holds(depth) : Verdict::unknown(depth);
    return rep;
}

UniformSBoundednessReport F_uniform_sbounded_check(const ChargeFamily& ms,
                                                   const PartitionFilter& f, const SetFamily& h,
                                                   const Regulator& r, std::uint64_t depth) {
    UniformSBoundednessReport rep{UniformMode::FilterUniform, r, Verdict::unknown(depth), {}};
    bool all_found = true;
    for (std::uint64_t p = 1; p <= depth; ++p) {
        LatticeElement target = r.eval(p);
        bool found = false;
        for (std::uint64_t t = 0; t <= depth && !found; ++t) {
            // F(p) candidate: complement of the first t blocks
            SetDescriptor fp =
                t == 0 ? SetDescriptor::naturals()
                       : SetDescriptor::complement(SetDescriptor::block_union(
                             f, SetDescriptor::finite([&] {
                                 std::vector<std::uint64_t> ks;
                                 for (std::uint64_t k = 1; k <= t; ++k) ks.push_back(k);
                                 return ks;
                             }())));
            auto ep = to_periodic(fp);
            if (!ep) continue;
            std::optional<std::uint64_t> kp;
            for (std::uint64_t k = 1; k <= depth + 1 && !kp; ++k) {
                auto bound = ms.family_tail_sup_over(*ep, h, k);
                if (bound && leq(*bound, target)) kp = k;
            }
            if (kp) {
                rep.thresholds.push_back({p, *kp, fp.str()});
                found = true;
            }
        }
        if (!found) {
            all_found = false;
            auto bad = unbounded_violation(ms, h, target, std::nullopt, depth);
            if (bad) {
                // a violation on a stationary index set defeats every F(p)
                if (ms.kind() == ChargeFamily::Kind::IndicatorDeltaRows) {
                    rep.verdict = Verdict::fails(
                        depth,
                        Witness{"F-uniform-violation", {p, bad->first, bad->second}, ""});
                    return rep;
                }
            }
        }
    }
    rep.verdict = all_found ? Verdict::holds(depth) : Verdict::unknown(depth);
    return rep;
}

// ---------------------------------------------------------------------------
// theorem verifiers
// ---------------------------------------------------------------------------

namespace {

// audit: pointwise (o_F)-convergence of m_n(A) to limit(A) with regulator b
std::optional<SetDescriptor> convergence_audit(const ChargeFamily& ms, const Charge& limit,
                                               const PartitionFilter& f, const Regulator& b,
                                               const std::vector<SetDescriptor>& sample,
                                               std::uint64_t depth, bool* any_unknown) {
    for (const auto& a : sample) {
        auto vs = ms.value_sequence(a, depth);
        if (!vs) {
            if (any_unknown) *any_unknown = true;
            continue;
        }
        ValueInterval lv = limit.evaluate(a, depth);
        if (!lv.is_exact()) {
            if (any_unknown) *any_unknown = true;
            continue;
        }
        Verdict v = filter_o_convergence(f, *vs, lv.lower(), b, depth);
        if (v.outcome == Outcome::Fails) return a;
        if (v.outcome == Outcome::Unknown && any_unknown) *any_unknown = true;
    }
    return std::nullopt;
}

// spot audit that `a` regulates sigma-additivity of every row: along the
// canonical decreasing family F_k = {n >= k} each measure must reach level
// a(j) at SOME index k(j) (the index may depend on the measure)
void audit_sigma_regulator(const ChargeFamily& ms, const Regulator& a, std::uint64_t depth) {
    std::uint64_t scan = std::min<std::uint64_t>(depth, 12);
    for (std::uint64_t n = 1; n <= scan; ++n) {
        Charge m = ms.at(n);
        for (std::uint64_t j = 1; j <= scan; ++j) {
            LatticeElement target = a.eval(j);
            bool found = false;
            for (std::uint64_t k = 1; k <= depth + 64 && !found; ++k) {
                SetDescriptor tail =
                    k == 1 ? SetDescriptor::naturals()
                           : SetDescriptor::complement(SetDescriptor::finite([&] {
                                 std::vector<std::uint64_t> ks;
                                 for (std::uint64_t i = 1; i < k; ++i) ks.push_back(i);
                                 return ks;
                             }()));
                if (leq(m.variation(tail, depth).upper(), target)) found = true;
            }
            if (!found)
                throw HypothesisError("sigma-additivity regulator",
                                      "row " + std::to_string(n) + " level " + std::to_string(j));
        }
    }
}

} // namespace

Verdict schur_verify(const ChargeFamily& ms, const PartitionFilter& f, const Regulator& b,
                     const Regulator& a, const std::vector<SetDescriptor>& sample,
                     std::uint64_t depth, SchurWitnessTable* table) {
    if (ms.space().kind != AtomicSpace::Kind::CountableAtoms)
        throw Error("schur_verify: measures must live on countable atoms");
    audit_sigma_regulator(ms, a, depth);

    // Phase 1: hypothesis audit on the samples (convergence to 0)
    Charge zero = Charge::countable({}, {}, ms.dim());
    bool unknown = false;
    if (auto bad = convergence_audit(ms, zero, f, b, sample, depth, &unknown))
        return Verdict::fails(depth, Witness{"hypothesis", {}, bad->str()});

    // Phase 2: conclusion, p_j = 2(a_j + 2 b_j)
    Regulator p = schur_regulator(a, b);
    bool all_found = true;
    for (std::uint64_t j = 1; j <= depth; ++j) {
        LatticeElement target = p.eval(j);
        auto t = ms.variation_tail_threshold(target, depth);
        if (!t) {
            all_found = false;
            continue;
        }
        SetDescriptor fj = *t <= 1 ? SetDescriptor::naturals()
                                   : SetDescriptor::complement(SetDescriptor::finite([&] {
                                         std::vector<std::uint64_t> ks;
                                         for (std::uint64_t k = 1; k < *t; ++k) ks.push_back(k);
                                         return ks;
                                     }()));
        if (in_filter(f, fj, depth).outcome != Outcome::Holds) {
            all_found = false;
            continue;
        }
        // grid re-verification of the certified threshold
        for (std::uint64_t n = *t; n <= std::min(depth, *t + 16); ++n) {
            ValueInterval v = ms.at(n).variation(SetDescriptor::naturals(), depth);
            if (!leq(v.upper(), target))
                return Verdict::fails(depth, Witness{"threshold-reverify", {j, n}, fj.str()});
        }
        if (table) table->filter_sets.emplace_back(j, fj.str());
    }
    if (unknown || !all_found) return Verdict::unknown(depth);
    return Verdict::holds(depth);
}

Verdict finale_verify(const ChargeFamily& ms, const PartitionFilter& f, const Regulator& b,
                      const Regulator& q, const SetFamily& h,
                      const std::vector<SetDescriptor>& ideal_sample,
                      const std::vector<SetDescriptor>& sample, std::uint64_t depth,
                      UniformSBoundednessReport* conclusion) {
    // hypothesis audits
    UniformSBoundednessReport ideal = ideal_uniform_sbounded_check(ms, f, h, q, ideal_sample, depth);
    if (ideal.verdict.outcome == Outcome::Fails)
        throw HypothesisError("ideal uniform s-boundedness", ideal.verdict.str());
    if (ideal.verdict.outcome == Outcome::Unknown)
        throw HypothesisError("ideal uniform s-boundedness", "not certifiable at depth");
    Charge limit = ms.limit_charge();
    bool unknown = false;
    if (auto bad = convergence_audit(ms, limit, f, b, sample, depth, &unknown))
        throw HypothesisError("pointwise filter convergence", bad->str());
    if (unknown) throw HypothesisError("pointwise filter convergence", "no closed form on a sample");

    Regulator r = finale_regulator(q, b);
    UniformSBoundednessReport rep = uniform_sbounded_check(ms, h, r, depth);
    if (conclusion) *conclusion = rep;
    return rep.verdict;
}

Verdict nuovoschur_verify(const ChargeFamily& ms, const PartitionFilter& f, const Regulator& b,
                          const Regulator& q, const LatticeElement& u, const SetFamily& h,
                          const std::vector<SetDescriptor>& sample, std::uint64_t depth,
                          Regulator* derived) {
    LatticeElement eq = ms.equibound();
    if (!leq(eq, u))
        throw HypothesisError("uniform boundedness", "family bound " + eq.str() +
                                                          " exceeds supplied u " + u.str());
    audit_sigma_regulator(ms, q, depth);
    Charge zero = Charge::countable({}, {}, ms.dim());
    bool unknown = false;
    if (auto bad = convergence_audit(ms, zero, f, b, sample, depth, &unknown))
        throw HypothesisError("pointwise filter convergence", bad->str());
    if (unknown) throw HypothesisError("pointwise filter convergence", "no closed form on a sample");

    Regulator r = nuovoschur_regulator(q, b, u);
    if (derived) *derived = r;

    // claim: for each p, {j : ⋁_k |m_j(H_k)| <= r_p} has complement in the
    // ideal; v(m_j)(Ω) dominates sup_k |m_j(H_k)| and is exact for the
    // delta-style rows when the set family covers every row's atom
    auto vs = ms.variation_sequence(depth);
    if (!vs) return Verdict::unknown(depth);
    bool exact = vs->exact && ms.kind() == ChargeFamily::Kind::IndicatorDeltaRows &&
                 h.kind() != SetFamily::Kind::Listed;
    bool all_ok = true;
    for (std::uint64_t p = 1; p <= depth; ++p) {
        LatticeElement target = r.eval(p);
        auto gb = vs->seq.good_set(LatticeElement::zero(ms.dim()), target);
        const std::optional<PeriodicSet>& good = gb.exact ? gb.exact : gb.under;
        if (good && in_ideal_periodic(f, good->complemented())) continue;
        if (exact && gb.exact && !in_ideal_periodic(f, gb.exact->complemented()))
            return Verdict::fails(depth, Witness{"claim-zero-violation", {p}, ""});
        all_ok = false;
    }
    return all_ok ? Verdict::holds(depth) : Verdict::unknown(depth);
}

} // namespace lmeas
