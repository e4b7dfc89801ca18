#include "lmeas/measures.hpp"

#include <algorithm>

namespace lmeas {

// ---------------------------------------------------------------------------
// AtomicSpace
// ---------------------------------------------------------------------------

AtomicSpace AtomicSpace::finite(std::uint64_t n) {
    if (n == 0) throw Error("FiniteAtoms needs n >= 1");
    return {Kind::FiniteAtoms, n};
}

AtomicSpace AtomicSpace::countable() { return {Kind::CountableAtoms, 0}; }

std::string AtomicSpace::str() const {
    if (kind == Kind::FiniteAtoms) return "(finite-atoms " + std::to_string(atom_count) + ")";
    return "(countable-atoms)";
}

AtomicSpace AtomicSpace::from_sexpr(const SExpr& e) {
    if (e.head() == "finite-atoms") return finite(sexpr_u64(e[1]));
    if (e.head() == "countable-atoms") return countable();
    throw ParseError("unknown space " + e.str(), 0);
}

// ---------------------------------------------------------------------------
// TailEnvelope
// ---------------------------------------------------------------------------

LatticeElement TailEnvelope::sum_from(std::uint64_t n) const {
    // Σ_{k>=n} coeff·rho^k = coeff·rho^n/(1-rho)
    Rational f = rational_pow(rho, n) / (Rational(1) - rho);
    return f * coeff;
}

// ---------------------------------------------------------------------------
// Charge construction
// ---------------------------------------------------------------------------

namespace {

void normalize_tail(std::vector<TailTerm>& tail, int dim) {
    for (auto& t : tail) {
        if (t.coeff.dim() != dim) throw DimensionMismatchError("tail term dim");
        if (!(t.rho > 0 && t.rho < 1)) throw Error("tail term needs 0 < rho < 1");
        if (t.mask && !t.mask_ep) {
            t.mask_ep = to_periodic(*t.mask);
            if (!t.mask_ep)
                throw UnsupportedCombinationError(
                    "tail mask must be decidable (eventually periodic): " + t.mask->str());
        }
    }
    // merge terms with equal rho and equal mask
    std::vector<TailTerm> merged;
    for (auto& t : tail) {
        bool done = false;
        for (auto& m : merged) {
            bool same_mask = (!m.mask && !t.mask) ||
                             (m.mask && t.mask && m.mask->str() == t.mask->str());
            if (m.rho == t.rho && same_mask) {
                m.coeff = m.coeff + t.coeff;
                done = true;
                break;
            }
        }
        if (!done) merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const TailTerm& t) { return t.coeff.is_zero(); }),
                 merged.end());
    tail = std::move(merged);
}

std::vector<DiffusePiece> normalize_diffuse(std::vector<DiffusePiece> pieces, int dim) {
    for (auto& p : pieces) {
        if (p.density.dim() != dim) throw DimensionMismatchError("diffuse density dim");
        if (!(p.iv.lo >= 0 && p.iv.lo < p.iv.hi && p.iv.hi <= 1) || !is_dyadic(p.iv.lo) ||
            !is_dyadic(p.iv.hi))
            throw Error("diffuse piece needs a dyadic subinterval of [0,1)");
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const DiffusePiece& a, const DiffusePiece& b) { return a.iv.lo < b.iv.lo; });
    for (std::size_t i = 1; i < pieces.size(); ++i)
        if (pieces[i].iv.lo < pieces[i - 1].iv.hi) throw Error("diffuse pieces overlap");
    std::vector<DiffusePiece> out;
    for (auto& p : pieces) {
        if (p.density.is_zero()) continue;
        if (!out.empty() && out.back().iv.hi == p.iv.lo && out.back().density == p.density)
            out.back().iv.hi = p.iv.hi;
        else
            out.push_back(p);
    }
    return out;
}

} // namespace

void Charge::derive_envelope() {
    Rational rho(1, 2);
    for (const auto& t : tail_)
        if (t.rho > rho) rho = t.rho;
    std::vector<Rational> coeff(static_cast<std::size_t>(dim_), Rational(0));
    for (const auto& t : tail_)
        for (int i = 0; i < dim_; ++i) {
            Rational a = t.coeff[i] < 0 ? Rational(-t.coeff[i]) : t.coeff[i];
            coeff[static_cast<std::size_t>(i)] += a;
        }
    for (std::size_t k = 0; k < prefix_.size(); ++k) {
        Rational inv = Rational(1) / rational_pow(rho, k + 1);
        for (int i = 0; i < dim_; ++i) {
            Rational a = prefix_[k][i] < 0 ? Rational(-prefix_[k][i]) : prefix_[k][i];
            Rational need = a * inv;
            if (need > coeff[static_cast<std::size_t>(i)])
                coeff[static_cast<std::size_t>(i)] = need;
        }
    }
    envelope_ = TailEnvelope{LatticeElement(std::move(coeff)), rho};
}

Charge Charge::finite_atoms(std::vector<LatticeElement> weights) {
    if (weights.empty()) throw Error("finite_atoms needs at least one atom");
    Charge m;
    m.space_ = AtomicSpace::finite(weights.size());
    m.dim_ = weights[0].dim();
    for (const auto& w : weights)
        if (w.dim() != m.dim_) throw DimensionMismatchError("finite_atoms weights");
    m.prefix_ = std::move(weights);
    m.derive_envelope();
    return m;
}

Charge Charge::countable(std::vector<LatticeElement> prefix, std::vector<TailTerm> tail,
                         int dim) {
    Charge m;
    m.space_ = AtomicSpace::countable();
    m.dim_ = dim;
    for (const auto& w : prefix)
        if (w.dim() != dim) throw DimensionMismatchError("countable prefix weights");
    normalize_tail(tail, dim);
    m.prefix_ = std::move(prefix);
    m.tail_ = std::move(tail);
    m.derive_envelope();
    return m;
}

Charge Charge::zero_charge(const AtomicSpace& space, int dim) {
    if (space.kind == AtomicSpace::Kind::FiniteAtoms)
        return finite_atoms(
            std::vector<LatticeElement>(space.atom_count, LatticeElement::zero(dim)));
    return countable({}, {}, dim);
}

Charge Charge::with_diffuse(std::vector<DiffusePiece> pieces) const {
    Charge m = *this;
    m.diffuse_ = normalize_diffuse(std::move(pieces), dim_);
    return m;
}

Charge Charge::with_charge(LatticeElement c, PartitionFilter f) const {
    if (space_.kind != AtomicSpace::Kind::CountableAtoms)
        throw UnsupportedCombinationError("charge-at-infinity lives on countable atom spaces");
    if (c.dim() != dim_) throw DimensionMismatchError("with_charge");
    Charge m = *this;
    m.at_infinity_ = ChargeAtInfinity{std::move(c), std::move(f)};
    return m;
}

// ---------------------------------------------------------------------------
// weights and support
// ---------------------------------------------------------------------------

LatticeElement Charge::weight(std::uint64_t k) const {
    if (k == 0) throw Error("atom indices start at 1");
    if (space_.kind == AtomicSpace::Kind::FiniteAtoms) {
        if (k > space_.atom_count) return LatticeElement::zero(dim_);
        return prefix_[static_cast<std::size_t>(k - 1)];
    }
    if (k <= prefix_.size()) return prefix_[static_cast<std::size_t>(k - 1)];
    LatticeElement acc = LatticeElement::zero(dim_);
    for (const auto& t : tail_) {
        if (t.mask_ep && !t.mask_ep->member(k)) continue;
        acc = acc + rational_pow(t.rho, k) * t.coeff;
    }
    return acc;
}

namespace {

// exact zero set (in k) of c1·rho1^k + c2·rho2^k for one component;
// returns {all} / finite list of exceptional k within the given region
struct ZeroSet {
    bool everywhere = false;
    std::vector<std::uint64_t> points;
};

ZeroSet pair_zero_set(const Rational& c1, const Rational& rho1, const Rational& c2,
                      const Rational& rho2) {
    ZeroSet z;
    if (c1 == 0 && c2 == 0) {
        z.everywhere = true;
        return z;
    }
    if (c1 == 0 || c2 == 0) return z; // single nonzero exponential never vanishes
    if ((c1 > 0) == (c2 > 0)) return z; // same sign: sum never vanishes
    // |c1|·rho1^k = |c2|·rho2^k  ⟺  (rho1/rho2)^k = |c2|/|c1| ; strictly monotone in k
    Rational a1 = c1 < 0 ? Rational(-c1) : c1;
    Rational a2 = c2 < 0 ? Rational(-c2) : c2;
    Rational lhs_ratio = rho1 / rho2;
    if (lhs_ratio == 1) return z; // equal rhos are merged at construction; coeff sum != 0
    // scan k by monotone bisection: g(k) = a1·rho1^k − a2·rho2^k has at most one sign change
    auto g = [&](std::uint64_t k) { return a1 * rational_pow(rho1, k) - a2 * rational_pow(rho2, k); };
    Rational g1 = g(1);
    if (g1 == 0) {
        z.points.push_back(1);
        return z;
    }
    bool g1pos = g1 > 0;
    std::uint64_t lo = 1, hi = 2;
    bool found = false;
    while (hi <= (std::uint64_t(1) << 30)) {
        Rational gh = g(hi);
        if (gh == 0) {
            z.points.push_back(hi);
            return z;
        }
        if ((gh > 0) != g1pos) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2;
    }
    if (!found) return z; // no sign change: never zero
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        Rational gm = g(mid);
        if (gm == 0) {
            z.points.push_back(mid);
            return z;
        }
        if ((gm > 0) == g1pos)
            lo = mid;
        else
            hi = mid;
    }
    return z; // sign change without an exact integer zero
}

} // namespace

PeriodicSet Charge::atom_support() const {
    std::vector<std::uint64_t> explicit_support;
    for (std::size_t k = 0; k < prefix_.size(); ++k)
        if (!prefix_[static_cast<std::size_t>(k)].is_zero())
            explicit_support.push_back(static_cast<std::uint64_t>(k + 1));
    PeriodicSet support = PeriodicSet::finite(std::move(explicit_support));
    if (space_.kind == AtomicSpace::Kind::FiniteAtoms || tail_.empty()) return support;

    std::uint64_t p0 = prefix_.size();
    std::size_t t = tail_.size();
    if (t > 4) throw UnsupportedCombinationError("atom_support: too many tail terms");
    for (std::size_t cell = 0; cell < (std::size_t(1) << t); ++cell) {
        PeriodicSet region = PeriodicSet::tail_from(p0 + 1);
        std::vector<const TailTerm*> active;
        bool dead = false;
        for (std::size_t i = 0; i < t; ++i) {
            PeriodicSet msk = tail_[i].mask_ep ? *tail_[i].mask_ep : PeriodicSet::naturals();
            if (cell & (std::size_t(1) << i)) {
                auto r = PeriodicSet::intersect(region, msk);
                if (!r) throw UnsupportedCombinationError("atom_support: mask cap exceeded");
                region = *r;
                active.push_back(&tail_[i]);
            } else {
                auto r = PeriodicSet::intersect(region, msk.complemented());
                if (!r) throw UnsupportedCombinationError("atom_support: mask cap exceeded");
                region = *r;
            }
            if (region.is_empty()) {
                dead = true;
                break;
            }
        }
        if (dead || active.empty()) continue;
        if (active.size() > 2)
            throw UnsupportedCombinationError("atom_support: 3+ overlapping tail terms");
        // weight vanishes at k iff every component vanishes there; components
        // are either identically zero on the cell or vanish at finitely many k
        std::vector<std::uint64_t> exceptional;
        bool saw_pointwise_comp = false;
        for (int i = 0; i < dim_; ++i) {
            ZeroSet zc;
            if (active.size() == 1)
                zc = pair_zero_set(active[0]->coeff[i], active[0]->rho, Rational(0),
                                   Rational(1, 2));
            else
                zc = pair_zero_set(active[0]->coeff[i], active[0]->rho, active[1]->coeff[i],
                                   active[1]->rho);
            if (zc.everywhere) continue;
            if (!saw_pointwise_comp) {
                exceptional = zc.points;
                saw_pointwise_comp = true;
            } else {
                std::vector<std::uint64_t> merged;
                for (auto k : exceptional)
                    if (std::find(zc.points.begin(), zc.points.end(), k) != zc.points.end())
                        merged.push_back(k);
                exceptional = std::move(merged);
            }
        }
        if (!saw_pointwise_comp) continue; // identically zero on the whole cell
        PeriodicSet cell_support = region;
        // support = region minus the exceptional points
        std::vector<std::uint64_t> drop;
        for (auto k : exceptional)
            if (region.member(k)) drop.push_back(k);
        if (!drop.empty()) {
            auto cut = PeriodicSet::intersect(cell_support,
                                              PeriodicSet::finite(drop).complemented());
            if (cut) cell_support = *cut;
        }
        auto u = PeriodicSet::unite(support, cell_support);
        if (!u) throw UnsupportedCombinationError("atom_support: cap exceeded");
        support = *u;
    }
    return support;
}

bool Charge::atoms_zero() const {
    for (const auto& w : prefix_)
        if (!w.is_zero()) return false;
    if (space_.kind == AtomicSpace::Kind::CountableAtoms && !tail_.empty())
        return atom_support().is_empty();
    return true;
}

bool Charge::diffuse_zero() const { return diffuse_.empty(); }

bool Charge::sigma_part_zero() const { return atoms_zero() && diffuse_zero(); }

bool Charge::is_zero() const {
    return sigma_part_zero() && (!at_infinity_ || at_infinity_->c.is_zero());
}

bool Charge::nonnegative_structural() const {
    for (const auto& w : prefix_)
        if (!w.is_nonneg()) return false;
    for (const auto& t : tail_)
        if (!t.coeff.is_nonneg()) return false;
    for (const auto& p : diffuse_)
        if (!p.density.is_nonneg()) return false;
    if (at_infinity_ && !at_infinity_->c.is_nonneg()) return false;
    return true;
}

LatticeElement Charge::max_abs_density() const {
    LatticeElement m = LatticeElement::zero(dim_);
    for (const auto& p : diffuse_) m = sup(m, abs(p.density));
    return m;
}

LatticeElement Charge::total_variation_upper() const {
    LatticeElement acc = LatticeElement::zero(dim_);
    for (const auto& w : prefix_) acc = acc + abs(w);
    for (const auto& t : tail_) {
        Rational f = t.rho / (Rational(1) - t.rho); // Σ_{k>=1} rho^k
        acc = acc + f * abs(t.coeff);
    }
    for (const auto& p : diffuse_) acc = acc + (p.iv.hi - p.iv.lo) * abs(p.density);
    if (at_infinity_) acc = acc + abs(at_infinity_->c);
    return acc;
}

// ---------------------------------------------------------------------------
// structural parts / arithmetic
// ---------------------------------------------------------------------------

Charge Charge::charge_part() const {
    Charge m = zero_charge(space_, dim_);
    m.at_infinity_ = at_infinity_;
    return m;
}

Charge Charge::sigma_part() const {
    Charge m = *this;
    m.at_infinity_.reset();
    return m;
}

Charge Charge::atomic_part_only() const {
    Charge m = *this;
    m.at_infinity_.reset();
    m.diffuse_.clear();
    return m;
}

Charge Charge::diffuse_part_only() const {
    Charge m = zero_charge(space_, dim_);
    m.diffuse_ = diffuse_;
    return m;
}

Charge Charge::restricted(const MeasurableSet& e, bool include_charge) const {
    auto ep = to_periodic(e.atoms);
    if (!ep)
        throw UnsupportedCombinationError("restriction set must be decidable: " + e.atoms.str());
    Charge m;
    m.space_ = space_;
    m.dim_ = dim_;
    m.prefix_.reserve(prefix_.size());
    for (std::size_t k = 0; k < prefix_.size(); ++k)
        m.prefix_.push_back(ep->member(k + 1) ? prefix_[k] : LatticeElement::zero(dim_));
    for (const auto& t : tail_) {
        PeriodicSet msk = t.mask_ep ? *t.mask_ep : PeriodicSet::naturals();
        auto cut = PeriodicSet::intersect(msk, *ep);
        if (!cut) throw UnsupportedCombinationError("restriction mask cap exceeded");
        if (cut->is_empty()) continue;
        TailTerm nt;
        nt.coeff = t.coeff;
        nt.rho = t.rho;
        nt.mask = descriptor_of(*cut);
        nt.mask_ep = *cut;
        m.tail_.push_back(std::move(nt));
    }
    for (const auto& p : diffuse_) {
        DyadicSet part = DyadicSet::intersect(DyadicSet::of({p.iv}), e.diffuse);
        for (const auto& iv : part.intervals()) m.diffuse_.push_back({iv, p.density});
    }
    m.diffuse_ = normalize_diffuse(std::move(m.diffuse_), dim_);
    if (include_charge) m.at_infinity_ = at_infinity_;
    m.derive_envelope();
    return m;
}

Charge Charge::scaled(const Rational& k) const {
    Charge m = *this;
    for (auto& w : m.prefix_) w = k * w;
    for (auto& t : m.tail_) t.coeff = k * t.coeff;
    for (auto& p : m.diffuse_) p.density = k * p.density;
    if (m.at_infinity_) m.at_infinity_->c = k * m.at_infinity_->c;
    m.diffuse_ = normalize_diffuse(std::move(m.diffuse_), dim_);
    normalize_tail(m.tail_, dim_);
    m.derive_envelope();
    return m;
}

namespace {

Charge map_structural(const Charge& src, const std::function<LatticeElement(const LatticeElement&)>& f,
                      bool single_term_only) {
    if (single_term_only && src.atom_tail().size() > 1) {
        // overlapping masked terms would need pointwise |Σ|, not Σ|·|
        for (std::size_t i = 0; i < src.atom_tail().size(); ++i)
            for (std::size_t j = i + 1; j < src.atom_tail().size(); ++j) {
                const auto& a = src.atom_tail()[i];
                const auto& b = src.atom_tail()[j];
                PeriodicSet ma = a.mask_ep ? *a.mask_ep : PeriodicSet::naturals();
                PeriodicSet mb = b.mask_ep ? *b.mask_ep : PeriodicSet::naturals();
                auto inter = PeriodicSet::intersect(ma, mb);
                if (!inter || !inter->is_empty())
                    throw UnsupportedCombinationError(
                        "structural |m| needs non-overlapping tail terms");
            }
    }
    std::vector<TailTerm> tail;
    for (const auto& t : src.atom_tail()) {
        TailTerm nt = t;
        nt.coeff = f(t.coeff);
        tail.push_back(std::move(nt));
    }
    std::vector<LatticeElement> prefix;
    for (const auto& w : src.atom_prefix()) prefix.push_back(f(w));
    Charge m = src.space().kind == AtomicSpace::Kind::FiniteAtoms
                   ? Charge::finite_atoms(std::move(prefix))
                   : Charge::countable(std::move(prefix), std::move(tail), src.dim());
    std::vector<DiffusePiece> pieces;
    for (const auto& p : src.diffuse_pieces()) pieces.push_back({p.iv, f(p.density)});
    m = m.with_diffuse(std::move(pieces));
    if (src.at_infinity()) m = m.with_charge(f(src.at_infinity()->c), src.at_infinity()->f);
    return m;
}

} // namespace

Charge Charge::abs_structural() const {
    return map_structural(*this, [](const LatticeElement& x) { return abs(x); }, true);
}

Charge Charge::pos_structural() const {
    return map_structural(*this, [](const LatticeElement& x) { return pos_part(x); }, true);
}

Charge Charge::neg_structural() const {
    return map_structural(*this, [](const LatticeElement& x) { return neg_part(x); }, true);
}

Charge operator+(const Charge& a, const Charge& b) {
    if (!(a.space_ == b.space_)) throw DimensionMismatchError("charge +: space mismatch");
    if (a.dim_ != b.dim_) throw DimensionMismatchError("charge +: dim mismatch");
    Charge m;
    m.space_ = a.space_;
    m.dim_ = a.dim_;
    std::size_t np = std::max(a.prefix_.size(), b.prefix_.size());
    for (std::size_t k = 1; k <= np; ++k)
        m.prefix_.push_back(a.weight(k) + b.weight(k));
    m.tail_ = a.tail_;
    for (const auto& t : b.tail_) m.tail_.push_back(t);
    // drop tail contributions already materialized in the prefix region: terms
    // only apply beyond max prefix, which weight() already honors for a and b
    normalize_tail(m.tail_, m.dim_);
    std::vector<DiffusePiece> pieces = a.diffuse_;
    // overlay: refine to combined breakpoints
    {
        std::vector<Rational> cuts{Rational(0), Rational(1)};
        for (const auto& p : a.diffuse_) {
            cuts.push_back(p.iv.lo);
            cuts.push_back(p.iv.hi);
        }
        for (const auto& p : b.diffuse_) {
            cuts.push_back(p.iv.lo);
            cuts.push_back(p.iv.hi);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        pieces.clear();
        auto density_at = [](const Charge& c, const Rational& x) {
            for (const auto& p : c.diffuse_)
                if (p.iv.lo <= x && x < p.iv.hi) return p.density;
            return LatticeElement::zero(c.dim_);
        };
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            LatticeElement d = density_at(a, cuts[i]) + density_at(b, cuts[i]);
            if (!d.is_zero()) pieces.push_back({{cuts[i], cuts[i + 1]}, d});
        }
    }
    m.diffuse_ = normalize_diffuse(std::move(pieces), m.dim_);
    if (a.at_infinity_ && b.at_infinity_) {
        if (!(a.at_infinity_->f == b.at_infinity_->f))
            throw UnsupportedCombinationError("charge +: different filters");
        m.at_infinity_ = ChargeAtInfinity{a.at_infinity_->c + b.at_infinity_->c,
                                          a.at_infinity_->f};
    } else if (a.at_infinity_) {
        m.at_infinity_ = a.at_infinity_;
    } else if (b.at_infinity_) {
        m.at_infinity_ = b.at_infinity_;
    }
    m.derive_envelope();
    return m;
}

Charge operator-(const Charge& a, const Charge& b) { return a + b.scaled(Rational(-1)); }

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

// Σ_{k in ep, k > from} rho^k, exact
Rational geometric_series_over(const PeriodicSet& ep, const Rational& rho, std::uint64_t from) {
    Rational acc(0);
    for (std::uint64_t x : ep.prefix)
        if (x > from) acc += rational_pow(rho, x);
    Rational rho_p = rational_pow(rho, ep.period);
    std::uint64_t start = std::max(ep.threshold, from + 1);
    for (std::uint64_t r = 0; r < ep.period; ++r) {
        if (!ep.residues[static_cast<std::size_t>(r)]) continue;
        std::uint64_t rem = start % ep.period;
        std::uint64_t first = start + (r >= rem ? r - rem : ep.period - rem + r);
        acc += rational_pow(rho, first) / (Rational(1) - rho_p);
    }
    return acc;
}

} // namespace

ValueInterval Charge::evaluate(const MeasurableSet& a, std::uint64_t depth) const {
    if (depth == 0) depth = 1;
    LatticeElement exact_sum = LatticeElement::zero(dim_);
    LatticeElement slack = LatticeElement::zero(dim_);

    if (space_.kind == AtomicSpace::Kind::FiniteAtoms) {
        for (std::uint64_t k = 1; k <= space_.atom_count; ++k)
            if (a.atoms.contains(k)) exact_sum = exact_sum + weight(k);
    } else {
        std::uint64_t explicit_to = std::max<std::uint64_t>(prefix_.size(), depth);
        for (std::uint64_t k = 1; k <= explicit_to; ++k)
            if (a.atoms.contains(k)) exact_sum = exact_sum + weight(k);
        if (!tail_.empty()) {
            std::optional<PeriodicSet> ep;
            if (!a.atoms.opaque()) ep = to_periodic(a.atoms);
            if (ep) {
                for (const auto& t : tail_) {
                    PeriodicSet region = *ep;
                    if (t.mask_ep) {
                        auto cut = PeriodicSet::intersect(region, *t.mask_ep);
                        if (!cut) {
                            ep.reset();
                            break;
                        }
                        region = *cut;
                    }
                    exact_sum =
                        exact_sum + geometric_series_over(region, t.rho, explicit_to) * t.coeff;
                }
            }
            if (!ep) slack = slack + envelope_.sum_from(explicit_to + 1);
        }
    }

    for (const auto& p : diffuse_)
        exact_sum = exact_sum + a.diffuse.overlap_length(p.iv) * p.density;

    if (at_infinity_) {
        Classification c = classify(at_infinity_->f, a.atoms);
        if (c.in_filter == Tri::Yes) {
            exact_sum = exact_sum + at_infinity_->c;
        } else if (c.in_ideal == Tri::Yes) {
            // contributes 0
        } else {
            Verdict vi = in_ideal(at_infinity_->f, a.atoms, depth);
            Verdict vf = in_filter(at_infinity_->f, a.atoms, depth);
            if (vf.outcome == Outcome::Holds)
                exact_sum = exact_sum + at_infinity_->c;
            else if (vi.outcome != Outcome::Holds)
                throw NotMeasurableError("set not in F ∪ I_F: " + a.atoms.str());
        }
    }
    return ValueInterval(exact_sum - slack, exact_sum + slack);
}

ValueInterval Charge::evaluate(const SetDescriptor& a, std::uint64_t depth) const {
    return evaluate(MeasurableSet::atoms_only(a), depth);
}

namespace {

// variation-style accumulation: f maps the pointwise weight to its
// contribution (|w|, w+, or w−)
ValueInterval accumulate_variation(const Charge& m, const MeasurableSet& h, std::uint64_t depth,
                                   const std::function<LatticeElement(const LatticeElement&)>& f) {
    int dim = m.dim();
    LatticeElement exact_sum = LatticeElement::zero(dim);
    LatticeElement tail_lo = LatticeElement::zero(dim);
    LatticeElement tail_hi = LatticeElement::zero(dim);

    if (m.space().kind == AtomicSpace::Kind::FiniteAtoms) {
        for (std::uint64_t k = 1; k <= m.space().atom_count; ++k)
            if (h.atoms.contains(k)) exact_sum = exact_sum + f(m.weight(k));
    } else {
        std::uint64_t explicit_to = std::max<std::uint64_t>(m.atom_prefix().size(), depth);
        for (std::uint64_t k = 1; k <= explicit_to; ++k)
            if (h.atoms.contains(k)) exact_sum = exact_sum + f(m.weight(k));
        if (!m.atom_tail().empty()) {
            std::optional<PeriodicSet> ep;
            if (!h.atoms.opaque()) ep = to_periodic(h.atoms);
            bool exact_ok = ep.has_value();
            if (exact_ok) {
                // lower bound: f(Σ terms) >= ... use |Σ| >= 0; compute the exact
                // summed series per term and bound pointwise via triangle
                LatticeElement lo = LatticeElement::zero(dim);
                LatticeElement hi = LatticeElement::zero(dim);
                bool single = true;
                // when tail terms never overlap on h, Σ_k f(w(k)) = Σ_terms Σ_k f(term_k)
                for (std::size_t i = 0; i < m.atom_tail().size() && single; ++i)
                    for (std::size_t j = i + 1; j < m.atom_tail().size(); ++j) {
                        PeriodicSet ma = m.atom_tail()[i].mask_ep ? *m.atom_tail()[i].mask_ep
                                                                  : PeriodicSet::naturals();
                        PeriodicSet mb = m.atom_tail()[j].mask_ep ? *m.atom_tail()[j].mask_ep
                                                                  : PeriodicSet::naturals();
                        auto inter = PeriodicSet::intersect(ma, mb);
                        if (!inter) {
                            single = false;
                            break;
                        }
                        auto on_h = PeriodicSet::intersect(*inter, *ep);
                        if (!on_h || !on_h->is_empty()) {
                            single = false;
                            break;
                        }
                    }
                for (const auto& t : m.atom_tail()) {
                    PeriodicSet region = *ep;
                    if (t.mask_ep) {
                        auto cut = PeriodicSet::intersect(region, *t.mask_ep);
                        if (!cut) {
                            exact_ok = false;
                            break;
                        }
                        region = *cut;
                    }
                    Rational series = geometric_series_over(region, t.rho, explicit_to);
                    if (single) {
                        lo = lo + series * f(t.coeff);
                        hi = hi + series * f(t.coeff);
                    } else {
                        // overlapping signed terms: bound by [0, Σ|coeff|·series]
                        hi = hi + series * abs(t.coeff);
                    }
                }
                if (exact_ok) {
                    tail_lo = lo;
                    tail_hi = hi;
                }
            }
            if (!exact_ok) {
                tail_lo = LatticeElement::zero(dim);
                tail_hi = m.envelope().sum_from(explicit_to + 1);
            }
        }
    }

    for (const auto& p : m.diffuse_pieces())
        exact_sum = exact_sum + h.diffuse.overlap_length(p.iv) * f(p.density);

    if (m.at_infinity()) {
        Classification c = classify(m.at_infinity()->f, h.atoms);
        if (c.in_filter == Tri::Yes)
            exact_sum = exact_sum + f(m.at_infinity()->c);
        else if (c.in_ideal == Tri::Yes) {
            // contributes 0
        } else {
            Verdict vf = in_filter(m.at_infinity()->f, h.atoms, depth);
            Verdict vi = in_ideal(m.at_infinity()->f, h.atoms, depth);
            if (vf.outcome == Outcome::Holds)
                exact_sum = exact_sum + f(m.at_infinity()->c);
            else if (vi.outcome != Outcome::Holds)
                throw NotMeasurableError("set not in F ∪ I_F: " + h.atoms.str());
        }
    }
    return ValueInterval(exact_sum + tail_lo, exact_sum + tail_hi);
}

} // namespace

ValueInterval Charge::variation(const MeasurableSet& h, std::uint64_t depth) const {
    return accumulate_variation(*this, h, depth,
                                [](const LatticeElement& x) { return abs(x); });
}

ValueInterval Charge::variation(const SetDescriptor& h, std::uint64_t depth) const {
    return variation(MeasurableSet::atoms_only(h), depth);
}

ValueInterval Charge::v_plus(const MeasurableSet& h, std::uint64_t depth) const {
    return accumulate_variation(*this, h, depth,
                                [](const LatticeElement& x) { return pos_part(x); });
}

ValueInterval Charge::v_minus(const MeasurableSet& h, std::uint64_t depth) const {
    return accumulate_variation(*this, h, depth,
                                [](const LatticeElement& x) { return neg_part(x); });
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string Charge::str() const {
    std::string out = "(charge (dim " + std::to_string(dim_) + ") (space " + space_.str() + ")";
    out += " (prefix";
    for (const auto& w : prefix_) out += " " + w.str();
    out += ")";
    if (!tail_.empty()) {
        out += " (tail";
        for (const auto& t : tail_) {
            out += " (term " + t.coeff.str() + " " + rational_str(t.rho);
            if (t.mask) out += " " + t.mask->str();
            out += ")";
        }
        out += ")";
    }
    if (!diffuse_.empty()) {
        out += " (diffuse";
        for (const auto& p : diffuse_)
            out += " (piece " + rational_str(p.iv.lo) + " " + rational_str(p.iv.hi) + " " +
                   p.density.str() + ")";
        out += ")";
    }
    if (at_infinity_)
        out += " (at-infinity " + at_infinity_->c.str() + " " + at_infinity_->f.str() + ")";
    out += ")";
    return out;
}

namespace {

LatticeElement vec_from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("vec");
    if (args.empty()) throw ParseError("(vec ...) needs at least one coordinate", 0);
    std::vector<Rational> coords;
    for (const auto& a : args) coords.push_back(parse_rational(a.atom_value()));
    return LatticeElement(std::move(coords));
}

} // namespace

Charge Charge::from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("charge");
    int dim = 1;
    std::optional<AtomicSpace> space;
    std::vector<LatticeElement> prefix;
    std::vector<TailTerm> tail;
    std::vector<DiffusePiece> diffuse;
    std::optional<ChargeAtInfinity> at_inf;
    for (const auto& sec : args) {
        const std::string h = sec.head();
        if (h == "dim") {
            dim = static_cast<int>(sexpr_u64(sec[1]));
        } else if (h == "space") {
            space = AtomicSpace::from_sexpr(sec[1]);
        } else if (h == "prefix") {
            for (std::size_t i = 1; i < sec.size(); ++i) prefix.push_back(vec_from_sexpr(sec[i]));
        } else if (h == "tail") {
            for (std::size_t i = 1; i < sec.size(); ++i) {
                auto targs = sec[i].expect_tagged("term");
                TailTerm t;
                t.coeff = vec_from_sexpr(targs[0]);
                t.rho = parse_rational(targs[1].atom_value());
                if (targs.size() > 2) t.mask = SetDescriptor::from_sexpr(targs[2]);
                tail.push_back(std::move(t));
            }
        } else if (h == "diffuse") {
            for (std::size_t i = 1; i < sec.size(); ++i) {
                auto pargs = sec[i].expect_tagged("piece");
                diffuse.push_back({{parse_rational(pargs[0].atom_value()),
                                    parse_rational(pargs[1].atom_value())},
                                   vec_from_sexpr(pargs[2])});
            }
        } else if (h == "at-infinity") {
            auto cargs = sec.expect_tagged("at-infinity");
            at_inf = ChargeAtInfinity{vec_from_sexpr(cargs[0]),
                                      PartitionFilter::from_sexpr(cargs[1])};
        } else {
            throw ParseError("unknown charge section " + sec.str(), 0);
        }
    }
    if (!space) throw ParseError("charge needs a (space ...) section", 0);
    Charge m = space->kind == AtomicSpace::Kind::FiniteAtoms
                   ? finite_atoms(std::move(prefix))
                   : countable(std::move(prefix), std::move(tail), dim);
    if (space->kind == AtomicSpace::Kind::FiniteAtoms && m.space_.atom_count != space->atom_count)
        throw ParseError("finite-atoms count and prefix length differ", 0);
    m = m.with_diffuse(std::move(diffuse));
    if (at_inf) m = m.with_charge(at_inf->c, at_inf->f);
    return m;
}

} // namespace lmeas
