#include "lmeas/sequences.hpp"

#include <algorithm>
#include <functional>

namespace lmeas {

struct ElementSequence::Node {
    Kind kind;
    int dim;
    LatticeElement offset = LatticeElement::scalar(0);
    LatticeElement coeff = LatticeElement::scalar(0);
    Rational rho;
    std::optional<PeriodicSet> set; // CountGeometric / IndicatorMix
    std::vector<ElementSequence> kids;
    std::vector<LatticeElement> prefix; // Table
};

ElementSequence ElementSequence::affine_geometric(LatticeElement offset, LatticeElement coeff,
                                                  Rational rho) {
    require_same_dim(offset, coeff, "affine_geometric");
    if (!(rho > 0 && rho < 1)) throw Error("affine_geometric: 0 < rho < 1 required");
    auto n = std::make_shared<Node>();
    n->kind = Kind::AffineGeometric;
    n->dim = offset.dim();
    n->offset = std::move(offset);
    n->coeff = std::move(coeff);
    n->rho = std::move(rho);
    return ElementSequence(std::move(n));
}

ElementSequence ElementSequence::constant(LatticeElement c) {
    int d = c.dim();
    return affine_geometric(std::move(c), LatticeElement::zero(d), Rational(1, 2));
}

ElementSequence ElementSequence::geometric(LatticeElement coeff, Rational rho) {
    int d = coeff.dim();
    return affine_geometric(LatticeElement::zero(d), std::move(coeff), std::move(rho));
}

ElementSequence ElementSequence::harmonic(LatticeElement coeff) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Harmonic;
    n->dim = coeff.dim();
    n->coeff = std::move(coeff);
    return ElementSequence(std::move(n));
}

ElementSequence ElementSequence::n_geometric(LatticeElement coeff, Rational rho) {
    if (!(rho > 0 && rho < 1)) throw Error("n_geometric: 0 < rho < 1 required");
    auto n = std::make_shared<Node>();
    n->kind = Kind::NGeometric;
    n->dim = coeff.dim();
    n->coeff = std::move(coeff);
    n->rho = std::move(rho);
    return ElementSequence(std::move(n));
}

ElementSequence ElementSequence::count_geometric(LatticeElement coeff, Rational rho,
                                                 PeriodicSet s) {
    if (!(rho > 0 && rho < 1)) throw Error("count_geometric: 0 < rho < 1 required");
    auto n = std::make_shared<Node>();
    n->kind = Kind::CountGeometric;
    n->dim = coeff.dim();
    n->coeff = std::move(coeff);
    n->rho = std::move(rho);
    n->set = std::move(s);
    return ElementSequence(std::move(n));
}

ElementSequence ElementSequence::indicator_mix(PeriodicSet s, ElementSequence a,
                                               ElementSequence b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("indicator_mix: dim mismatch");
    auto n = std::make_shared<Node>();
    n->kind = Kind::IndicatorMix;
    n->dim = a.dim();
    n->set = std::move(s);
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    return ElementSequence(std::move(n));
}

ElementSequence ElementSequence::table(std::vector<LatticeElement> prefix, ElementSequence tail) {
    for (const auto& x : prefix)
        if (x.dim() != tail.dim()) throw DimensionMismatchError("table: dim mismatch");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Table;
    n->dim = tail.dim();
    n->prefix = std::move(prefix);
    n->kids.push_back(std::move(tail));
    return ElementSequence(std::move(n));
}

ElementSequence::Kind ElementSequence::kind() const { return node_->kind; }
int ElementSequence::dim() const { return node_->dim; }

LatticeElement ElementSequence::at(std::uint64_t k) const {
    if (k == 0) throw Error("sequence index starts at 1");
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::AffineGeometric:
            return n.offset + rational_pow(n.rho, k) * n.coeff;
        case Kind::Harmonic:
            return Rational(BigInt(1), BigInt(k)) * n.coeff;
        case Kind::NGeometric: {
            Rational f = Rational(BigInt(k)) * rational_pow(n.rho, k);
            return f * n.coeff;
        }
        case Kind::CountGeometric: {
            Rational f = rational_pow(n.rho, k) * Rational(BigInt(n.set->count_leq(k)));
            return f * n.coeff;
        }
        case Kind::IndicatorMix:
            return n.set->member(k) ? n.kids[0].at(k) : n.kids[1].at(k);
        case Kind::Table:
            if (k <= n.prefix.size()) return n.prefix[static_cast<std::size_t>(k - 1)];
            return n.kids[0].at(k);
    }
    throw Error("unreachable sequence kind");
}

// ---------------------------------------------------------------------------
// threshold helpers (all exact; monotone searches over k >= 1)
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kSearchCap = std::uint64_t(1) << 40;

Rational ceil_rat(const Rational& q) {
    BigInt n = numerator(q), d = denominator(q);
    BigInt c = n / d;
    if (n % d != 0 && n > 0) c += 1;
    return Rational(c);
}

// least k >= 1 with a·rho^k <= x (a > 0, 0 < rho < 1); nullopt when x <= 0.
std::optional<std::uint64_t> least_k_geom_leq(const Rational& a, const Rational& rho,
                                              const Rational& x) {
    if (x <= 0) return std::nullopt;
    if (a * rho <= x) return 1;
    std::uint64_t lo = 1, hi = 2;
    while (a * rational_pow(rho, hi) > x) {
        lo = hi;
        if (hi > kSearchCap / 2) throw Error("geometric threshold search exceeded cap");
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (a * rational_pow(rho, mid) <= x)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

struct KInterval {
    bool empty = false;
    std::uint64_t lo = 1;
    std::optional<std::uint64_t> hi; // nullopt = unbounded
};

KInterval k_interval_all() { return {}; }
KInterval k_interval_empty() {
    KInterval i;
    i.empty = true;
    return i;
}

KInterval intersect(const KInterval& a, const KInterval& b) {
    if (a.empty || b.empty) return k_interval_empty();
    KInterval out;
    out.lo = std::max(a.lo, b.lo);
    if (a.hi && b.hi)
        out.hi = std::min(*a.hi, *b.hi);
    else if (a.hi)
        out.hi = a.hi;
    else
        out.hi = b.hi;
    if (out.hi && *out.hi < out.lo) return k_interval_empty();
    return out;
}

// Solution set in k of: lo <= c·rho^k <= hi (monotone in k).
KInterval geom_band(const Rational& c, const Rational& rho, const Rational& lo,
                    const Rational& hi) {
    if (c == 0) return (lo <= 0 && hi >= 0) ? k_interval_all() : k_interval_empty();
    if (c > 0) {
        // decreasing positive values
        if (hi <= 0) return k_interval_empty();
        KInterval out;
        if (c * rho > hi) {
            auto k1 = least_k_geom_leq(c, rho, hi);
            if (!k1) return k_interval_empty();
            out.lo = *k1;
        }
        if (lo > 0) {
            // k <= k2, k2 = last k with c·rho^k >= lo = (least k with value < lo) - 1
            if (c * rho < lo) return k_interval_empty();
            // find least k with c·rho^k < lo via <= lo then adjust for equality runs
            std::uint64_t klo = 1, khi = 2;
            while (c * rational_pow(rho, khi) >= lo) {
                klo = khi;
                if (khi > kSearchCap / 2) throw Error("geometric band search exceeded cap");
                khi *= 2;
            }
            while (khi - klo > 1) {
                std::uint64_t mid = klo + (khi - klo) / 2;
                if (c * rational_pow(rho, mid) >= lo)
                    klo = mid;
                else
                    khi = mid;
            }
            out.hi = klo;
            if (*out.hi < out.lo) return k_interval_empty();
        }
        return out;
    }
    // c < 0: values increasing from c·rho toward 0 (all negative)
    Rational a = -c;
    if (lo > 0) return k_interval_empty();
    KInterval out;
    if (lo < 0) {
        // need -a·rho^k >= lo ⟺ a·rho^k <= -lo
        if (a * rho > -lo) {
            auto k1 = least_k_geom_leq(a, rho, -lo);
            if (!k1) return k_interval_empty();
            out.lo = *k1;
        }
    } else { // lo == 0: -a·rho^k >= 0 never (a > 0)
        return k_interval_empty();
    }
    if (hi < 0) {
        // need -a·rho^k <= hi ⟺ a·rho^k >= -hi
        if (a * rho < -hi) return k_interval_empty();
        std::uint64_t klo = 1, khi = 2;
        while (a * rational_pow(rho, khi) >= -hi) {
            klo = khi;
            if (khi > kSearchCap / 2) throw Error("geometric band search exceeded cap");
            khi *= 2;
        }
        while (khi - klo > 1) {
            std::uint64_t mid = klo + (khi - klo) / 2;
            if (a * rational_pow(rho, mid) >= -hi)
                klo = mid;
            else
                khi = mid;
        }
        out.hi = klo;
        if (out.hi && *out.hi < out.lo) return k_interval_empty();
    }
    return out;
}

// Solution set in k of: lo <= c/k <= hi (monotone in k).
KInterval harmonic_band(const Rational& c, const Rational& lo, const Rational& hi) {
    if (c == 0) return (lo <= 0 && hi >= 0) ? k_interval_all() : k_interval_empty();
    if (c > 0) {
        if (hi <= 0) return k_interval_empty();
        KInterval out;
        if (c > hi) { // need k >= c/hi
            Rational k1 = ceil_rat(c / hi);
            if (k1 > Rational(kSearchCap)) throw Error("harmonic band out of range");
            out.lo = static_cast<std::uint64_t>(numerator(k1));
        }
        if (lo > 0) { // need k <= c/lo
            Rational q = c / lo;
            BigInt k2 = numerator(q) / denominator(q);
            if (k2 < 1) return k_interval_empty();
            if (k2 > BigInt(kSearchCap)) throw Error("harmonic band out of range");
            out.hi = static_cast<std::uint64_t>(k2);
            if (*out.hi < out.lo) return k_interval_empty();
        }
        return out;
    }
    // c < 0: values -|c|/k increasing toward 0
    Rational a = -c;
    if (lo > 0) return k_interval_empty();
    KInterval out;
    if (lo < 0) {
        if (a > -lo) { // need a/k <= -lo ⟺ k >= a/(-lo)
            Rational k1 = ceil_rat(a / (-lo));
            if (k1 > Rational(kSearchCap)) throw Error("harmonic band out of range");
            out.lo = static_cast<std::uint64_t>(numerator(k1));
        }
    } else {
        return k_interval_empty(); // lo == 0, values < 0
    }
    if (hi < 0) { // need a/k >= -hi ⟺ k <= a/(-hi)
        Rational q = a / (-hi);
        BigInt k2 = numerator(q) / denominator(q);
        if (k2 < 1) return k_interval_empty();
        if (k2 > BigInt(kSearchCap)) throw Error("harmonic band out of range");
        out.hi = static_cast<std::uint64_t>(k2);
        if (*out.hi < out.lo) return k_interval_empty();
    }
    return out;
}

std::optional<PeriodicSet> interval_to_periodic(const KInterval& iv) {
    if (iv.empty) return PeriodicSet::empty_set();
    if (!iv.hi) return PeriodicSet::tail_from(iv.lo);
    if (*iv.hi - iv.lo + 1 > PeriodicSet::kEnumCap) return std::nullopt;
    std::vector<std::uint64_t> elems;
    for (std::uint64_t k = iv.lo; k <= *iv.hi; ++k) elems.push_back(k);
    return PeriodicSet::finite(std::move(elems));
}

} // namespace

// ---------------------------------------------------------------------------
// good_set
// ---------------------------------------------------------------------------

ElementSequence::GoodSetBounds ElementSequence::good_set(const LatticeElement& limit,
                                                         const LatticeElement& t) const {
    const Node& nd = *node_;
    GoodSetBounds out;
    if (limit.dim() != dim() || t.dim() != dim()) throw DimensionMismatchError("good_set");
    switch (nd.kind) {
        case Kind::AffineGeometric: {
            KInterval acc = k_interval_all();
            for (int i = 0; i < dim(); ++i) {
                Rational lo = limit[i] - t[i] - nd.offset[i];
                Rational hi = limit[i] + t[i] - nd.offset[i];
                acc = intersect(acc, geom_band(nd.coeff[i], nd.rho, lo, hi));
                if (acc.empty) break;
            }
            out.exact = interval_to_periodic(acc);
            return out;
        }
        case Kind::Harmonic: {
            KInterval acc = k_interval_all();
            for (int i = 0; i < dim(); ++i) {
                Rational lo = limit[i] - t[i];
                Rational hi = limit[i] + t[i];
                acc = intersect(acc, harmonic_band(nd.coeff[i], lo, hi));
                if (acc.empty) break;
            }
            out.exact = interval_to_periodic(acc);
            return out;
        }
        case Kind::NGeometric: {
            if (!limit.is_zero()) return out; // closed form shipped for limit 0 only
            // per component: |c_i|·k·rho^k <= t_i; unimodal with small peak
            // peak index: last k with k <= rho/(1-rho), plus one
            Rational peak_bound = nd.rho / (Rational(1) - nd.rho);
            std::uint64_t kp = 1;
            while (Rational(kp) <= peak_bound) ++kp;
            auto value = [&](int i, std::uint64_t k) {
                Rational a = nd.coeff[i] < 0 ? Rational(-nd.coeff[i]) : nd.coeff[i];
                return a * Rational(k) * rational_pow(nd.rho, k);
            };
            std::optional<PeriodicSet> acc;
            for (int i = 0; i < dim(); ++i) {
                PeriodicSet comp;
                if (nd.coeff[i] == 0) {
                    comp = t[i] >= 0 ? PeriodicSet::naturals() : PeriodicSet::empty_set();
                } else if (t[i] < 0) {
                    comp = PeriodicSet::empty_set();
                } else {
                    std::vector<std::uint64_t> head;
                    for (std::uint64_t k = 1; k <= kp; ++k)
                        if (value(i, k) <= t[i]) head.push_back(k);
                    // falling part: least k >= kp with value <= t
                    std::uint64_t lo = kp, hi = kp;
                    while (value(i, hi) > t[i]) {
                        lo = hi;
                        if (hi > kSearchCap / 2) throw Error("n_geometric search exceeded cap");
                        hi *= 2;
                    }
                    while (hi - lo > 1 && value(i, lo) > t[i]) {
                        std::uint64_t mid = lo + (hi - lo) / 2;
                        if (value(i, mid) <= t[i])
                            hi = mid;
                        else
                            lo = mid;
                    }
                    std::uint64_t r2 = value(i, lo) <= t[i] ? lo : hi;
                    auto u = PeriodicSet::unite(PeriodicSet::finite(std::move(head)),
                                                PeriodicSet::tail_from(std::max(r2, kp)));
                    if (!u) return out;
                    comp = std::move(*u);
                }
                if (!acc)
                    acc = comp;
                else {
                    auto v = PeriodicSet::intersect(*acc, comp);
                    if (!v) return out;
                    acc = std::move(*v);
                }
            }
            out.exact = acc;
            return out;
        }
        case Kind::CountGeometric: {
            if (!limit.is_zero()) return out;
            const PeriodicSet& s = *nd.set;
            // after k0 the per-component value is nonincreasing
            Rational need = nd.rho / (Rational(1) - nd.rho);
            std::uint64_t k0 = 1;
            {
                std::optional<std::uint64_t> cursor = s.least();
                std::uint64_t cnt = 0;
                while (cursor && Rational(cnt) < need) {
                    ++cnt;
                    k0 = *cursor;
                    cursor = s.least_geq(*cursor + 1);
                }
                if (Rational(cnt) < need) {
                    // finite set ran out: geometric from max element on
                    k0 = s.max_finite() ? *s.max_finite() : 1;
                }
            }
            auto value = [&](int i, std::uint64_t k) {
                Rational a = nd.coeff[i] < 0 ? Rational(-nd.coeff[i]) : nd.coeff[i];
                return a * Rational(s.count_leq(k)) * rational_pow(nd.rho, k);
            };
            std::optional<PeriodicSet> acc;
            for (int i = 0; i < dim(); ++i) {
                PeriodicSet comp;
                if (nd.coeff[i] == 0) {
                    comp = t[i] >= 0 ? PeriodicSet::naturals() : PeriodicSet::empty_set();
                } else if (t[i] < 0) {
                    comp = PeriodicSet::empty_set();
                } else {
                    if (k0 > 4096) return out; // no practical closed form
                    std::vector<std::uint64_t> head;
                    for (std::uint64_t k = 1; k <= k0; ++k)
                        if (value(i, k) <= t[i]) head.push_back(k);
                    std::uint64_t lo = k0, hi = k0;
                    while (value(i, hi) > t[i]) {
                        lo = hi;
                        if (hi > kSearchCap / 2) throw Error("count_geometric search cap");
                        hi *= 2;
                    }
                    while (hi - lo > 1 && value(i, lo) > t[i]) {
                        std::uint64_t mid = lo + (hi - lo) / 2;
                        if (value(i, mid) <= t[i])
                            hi = mid;
                        else
                            lo = mid;
                    }
                    std::uint64_t r2 = value(i, lo) <= t[i] ? lo : hi;
                    auto u = PeriodicSet::unite(PeriodicSet::finite(std::move(head)),
                                                PeriodicSet::tail_from(std::max(r2, k0)));
                    if (!u) return out;
                    comp = std::move(*u);
                }
                if (!acc)
                    acc = comp;
                else {
                    auto v = PeriodicSet::intersect(*acc, comp);
                    if (!v) return out;
                    acc = std::move(*v);
                }
            }
            out.exact = acc;
            return out;
        }
        case Kind::IndicatorMix: {
            auto ga = nd.kids[0].good_set(limit, t);
            auto gb = nd.kids[1].good_set(limit, t);
            const PeriodicSet& s = *nd.set;
            PeriodicSet sc = s.complemented();
            auto pick = [&](const std::optional<PeriodicSet>& x, bool for_over)
                -> std::optional<PeriodicSet> {
                if (x) return x;
                if (for_over) return PeriodicSet::naturals();
                return PeriodicSet::empty_set();
            };
            if (ga.exact && gb.exact) {
                auto p1 = PeriodicSet::intersect(s, *ga.exact);
                auto p2 = PeriodicSet::intersect(sc, *gb.exact);
                if (p1 && p2) out.exact = PeriodicSet::unite(*p1, *p2);
                if (out.exact) return out;
            }
            {
                auto ua = ga.exact ? ga.exact : ga.under;
                auto ub = gb.exact ? gb.exact : gb.under;
                auto p1 = PeriodicSet::intersect(s, *pick(ua, false));
                auto p2 = PeriodicSet::intersect(sc, *pick(ub, false));
                if (p1 && p2) out.under = PeriodicSet::unite(*p1, *p2);
            }
            {
                auto oa = ga.exact ? ga.exact : ga.over;
                auto ob = gb.exact ? gb.exact : gb.over;
                auto p1 = PeriodicSet::intersect(s, *pick(oa, true));
                auto p2 = PeriodicSet::intersect(sc, *pick(ob, true));
                if (p1 && p2) out.over = PeriodicSet::unite(*p1, *p2);
            }
            return out;
        }
        case Kind::Table: {
            auto gt = nd.kids[0].good_set(limit, t);
            std::uint64_t n0 = nd.prefix.size();
            std::vector<std::uint64_t> head;
            for (std::uint64_t k = 1; k <= n0; ++k)
                if (leq(abs(nd.prefix[static_cast<std::size_t>(k - 1)] - limit), t))
                    head.push_back(k);
            auto combine = [&](const PeriodicSet& tail_part) -> std::optional<PeriodicSet> {
                auto beyond = PeriodicSet::intersect(tail_part, PeriodicSet::tail_from(n0 + 1));
                if (!beyond) return std::nullopt;
                return PeriodicSet::unite(PeriodicSet::finite(head), *beyond);
            };
            if (gt.exact) out.exact = combine(*gt.exact);
            if (gt.under) out.under = combine(*gt.under);
            if (gt.over) out.over = combine(*gt.over);
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// tail_abs_sup
// ---------------------------------------------------------------------------

std::optional<LatticeElement> ElementSequence::tail_abs_sup(const LatticeElement& limit,
                                                            std::uint64_t n) const {
    const Node& nd = *node_;
    if (n == 0) n = 1;
    switch (nd.kind) {
        case Kind::AffineGeometric:
            // values move monotonically from at(n) toward offset
            return sup(abs(at(n) - limit), abs(nd.offset - limit));
        case Kind::Harmonic:
            return sup(abs(at(n) - limit), abs(limit));
        case Kind::NGeometric: {
            Rational peak_bound = nd.rho / (Rational(1) - nd.rho);
            std::uint64_t kp = 1;
            while (Rational(kp) <= peak_bound) ++kp;
            LatticeElement acc = abs(limit); // value 0 at infinity
            for (std::uint64_t k : {n, std::max(n, kp), std::max(n, kp + 1)})
                acc = sup(acc, abs(at(k) - limit));
            return acc;
        }
        case Kind::CountGeometric: {
            if (!limit.is_zero()) return std::nullopt;
            const PeriodicSet& s = *nd.set;
            Rational need = nd.rho / (Rational(1) - nd.rho);
            std::uint64_t k0 = 1;
            std::optional<std::uint64_t> cursor = s.least();
            std::uint64_t cnt = 0;
            while (cursor && Rational(cnt) < need) {
                ++cnt;
                k0 = *cursor;
                cursor = s.least_geq(*cursor + 1);
            }
            if (Rational(cnt) < need) k0 = s.max_finite() ? *s.max_finite() : 1;
            if (k0 > n + 4096) return std::nullopt;
            LatticeElement acc = abs(at(n));
            for (std::uint64_t k = n; k <= std::max(n, k0); ++k) acc = sup(acc, abs(at(k)));
            return acc;
        }
        case Kind::IndicatorMix: {
            const PeriodicSet& s = *nd.set;
            LatticeElement acc = LatticeElement::zero(dim());
            bool any = false;
            if (s.least_geq(n)) {
                auto a = nd.kids[0].tail_abs_sup(limit, *s.least_geq(n));
                if (!a) return std::nullopt;
                acc = sup(acc, *a);
                any = true;
            }
            PeriodicSet sc = s.complemented();
            if (sc.least_geq(n)) {
                auto b = nd.kids[1].tail_abs_sup(limit, *sc.least_geq(n));
                if (!b) return std::nullopt;
                acc = sup(acc, *b);
                any = true;
            }
            if (!any) return LatticeElement::zero(dim()); // no indices at all >= n
            return acc;
        }
        case Kind::Table: {
            std::uint64_t n0 = nd.prefix.size();
            auto t = nd.kids[0].tail_abs_sup(limit, std::max(n, n0 + 1));
            if (!t) return std::nullopt;
            LatticeElement acc = *t;
            for (std::uint64_t k = n; k <= n0; ++k)
                acc = sup(acc, abs(nd.prefix[static_cast<std::size_t>(k - 1)] - limit));
            return acc;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// o-convergence
// ---------------------------------------------------------------------------

namespace {

Verdict o_check_core(const std::function<LatticeElement(std::uint64_t)>& at,
                     std::optional<LatticeElement> tail_sup, const LatticeElement& limit,
                     const Regulator& r, std::uint64_t depth) {
    if (depth == 0) return Verdict::unknown(0);
    // suffix sups of |x_k - limit| over [n..depth]
    std::vector<LatticeElement> diff;
    diff.reserve(static_cast<std::size_t>(depth));
    for (std::uint64_t k = 1; k <= depth; ++k) diff.push_back(abs(at(k) - limit));
    std::vector<LatticeElement> suffix = diff;
    for (std::uint64_t k = depth - 1; k >= 1; --k) {
        suffix[static_cast<std::size_t>(k - 1)] =
            sup(suffix[static_cast<std::size_t>(k - 1)], suffix[static_cast<std::size_t>(k)]);
        if (k == 1) break;
    }
    for (std::uint64_t n = 1; n <= depth; ++n) {
        LatticeElement rn = r.eval(n);
        if (!leq(suffix[static_cast<std::size_t>(n - 1)], rn)) {
            for (std::uint64_t k = n; k <= depth; ++k) {
                if (!leq(diff[static_cast<std::size_t>(k - 1)], rn))
                    return Verdict::fails(depth, Witness{"o-convergence-violation", {n, k}, ""});
            }
        }
    }
    if (!tail_sup) return Verdict::unknown(depth); // no envelope: never Holds
    LatticeElement r_depth = r.eval(depth);
    if (leq(*tail_sup, r_depth)) return Verdict::holds(depth);
    // tail may violate; look for an explicit index
    for (std::uint64_t k = depth + 1; k <= depth + 4096; ++k) {
        if (!leq(abs(at(k) - limit), r_depth))
            return Verdict::fails(depth, Witness{"o-convergence-violation", {depth, k}, ""});
    }
    return Verdict::unknown(depth);
}

} // namespace

Verdict o_convergence_check(const ElementSequence& x, const LatticeElement& limit,
                            const Regulator& r, std::uint64_t depth) {
    if (x.dim() != limit.dim() || x.dim() != r.dim())
        throw DimensionMismatchError("o_convergence_check");
    auto tail = x.tail_abs_sup(limit, depth + 1);
    return o_check_core([&](std::uint64_t k) { return x.at(k); }, tail, limit, r, depth);
}

Verdict o_convergence_check(const std::vector<LatticeElement>& prefix,
                            const LatticeElement& limit, const Regulator& r,
                            std::uint64_t depth) {
    std::uint64_t d = std::min<std::uint64_t>(depth, prefix.size());
    if (d == 0) return Verdict::unknown(0);
    return o_check_core(
        [&](std::uint64_t k) { return prefix[static_cast<std::size_t>(k - 1)]; }, std::nullopt,
        limit, r, d);
}

} // namespace lmeas
