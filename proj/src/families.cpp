#include "lmeas/families.hpp"

#include <algorithm>

namespace lmeas {

// ---------------------------------------------------------------------------
// SetFamily
// ---------------------------------------------------------------------------

SetFamily SetFamily::singletons() { return SetFamily(); }

SetFamily SetFamily::blocks_of(PartitionFilter f) {
    SetFamily s;
    s.kind_ = Kind::BlocksOf;
    s.filter_ = std::move(f);
    return s;
}

SetFamily SetFamily::listed(std::vector<SetDescriptor> sets) {
    SetFamily s;
    s.kind_ = Kind::Listed;
    s.sets_ = std::move(sets);
    return s;
}

SetDescriptor SetFamily::at(std::uint64_t j) const {
    if (j == 0) throw Error("set family indices start at 1");
    switch (kind_) {
        case Kind::Singletons:
            return SetDescriptor::finite({j});
        case Kind::BlocksOf:
            return SetDescriptor::block_union(*filter_, SetDescriptor::finite({j}));
        case Kind::Listed:
            if (j > sets_.size()) throw Error("set family index out of range");
            return sets_[static_cast<std::size_t>(j - 1)];
    }
    throw Error("unreachable set family kind");
}

std::optional<std::uint64_t> SetFamily::count() const {
    if (kind_ == Kind::Listed) return sets_.size();
    return std::nullopt;
}

std::optional<std::uint64_t> SetFamily::min_element_from(std::uint64_t j_from) const {
    if (j_from == 0) j_from = 1;
    switch (kind_) {
        case Kind::Singletons:
            return j_from;
        case Kind::BlocksOf:
            switch (filter_->family()) {
                case PartitionFilter::Family::Singletons:
                    return j_from;
                case PartitionFilter::Family::Ranges:
                    return filter_->range_start(j_from);
                case PartitionFilter::Family::DyadicValuationBlocks:
                    if (j_from > 63) return std::uint64_t(1) << 62;
                    return std::uint64_t(1) << (j_from - 1);
                case PartitionFilter::Family::TableWithTailRule:
                    return j_from > filter_->table_prefix() ? j_from : 1;
            }
            return 1;
        case Kind::Listed: {
            std::optional<std::uint64_t> best;
            for (std::uint64_t j = j_from; j <= sets_.size(); ++j) {
                auto ep = to_periodic(sets_[static_cast<std::size_t>(j - 1)]);
                std::optional<std::uint64_t> least;
                if (ep) least = ep->least();
                else {
                    for (std::uint64_t n = 1; n <= 4096 && !least; ++n)
                        if (sets_[static_cast<std::size_t>(j - 1)].contains(n)) least = n;
                    if (!least) least = 1; // conservative
                }
                if (least && (!best || *least < *best)) best = least;
            }
            return best;
        }
    }
    return 1;
}

std::string SetFamily::str() const {
    switch (kind_) {
        case Kind::Singletons:
            return "(sets singletons)";
        case Kind::BlocksOf:
            return "(sets blocks " + filter_->str() + ")";
        case Kind::Listed: {
            std::string out = "(sets listed";
            for (const auto& s : sets_) out += " " + s.str();
            out += ")";
            return out;
        }
    }
    throw Error("unreachable set family kind");
}

SetFamily SetFamily::from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("sets");
    const std::string& k = args[0].atom_value();
    if (k == "singletons") return singletons();
    if (k == "blocks") return blocks_of(PartitionFilter::from_sexpr(args[1]));
    if (k == "listed") {
        std::vector<SetDescriptor> sets;
        for (std::size_t i = 1; i < args.size(); ++i)
            sets.push_back(SetDescriptor::from_sexpr(args[i]));
        return listed(std::move(sets));
    }
    throw ParseError("unknown set family " + e.str(), 0);
}

// ---------------------------------------------------------------------------
// ChargeFamily construction
// ---------------------------------------------------------------------------

ChargeFamily ChargeFamily::constant(Charge m) {
    ChargeFamily f;
    f.kind_ = Kind::Constant;
    f.dim_ = m.dim();
    f.base_ = std::move(m);
    return f;
}

ChargeFamily ChargeFamily::geometric_perturbation(Charge base, Charge dir, Rational rho) {
    if (base.dim() != dir.dim() || !(base.space() == dir.space()))
        throw DimensionMismatchError("geometric_perturbation: base/dir mismatch");
    if (!(rho > 0 && rho < 1)) throw Error("geometric_perturbation: 0 < rho < 1");
    ChargeFamily f;
    f.kind_ = Kind::GeometricPerturbation;
    f.dim_ = base.dim();
    f.base_ = std::move(base);
    f.dir_ = std::move(dir);
    f.rho_ = std::move(rho);
    return f;
}

ChargeFamily ChargeFamily::triangle_rows(LatticeElement c, Rational rho,
                                         std::optional<SetDescriptor> mask) {
    if (!(rho > 0 && rho < 1)) throw Error("triangle_rows: 0 < rho < 1");
    if (mask && !to_periodic(*mask))
        throw UnsupportedCombinationError("triangle_rows mask must be decidable");
    ChargeFamily f;
    f.kind_ = Kind::TriangleRows;
    f.dim_ = c.dim();
    f.coeff_ = std::move(c);
    f.rho_ = std::move(rho);
    f.mask_ = std::move(mask);
    return f;
}

ChargeFamily ChargeFamily::indicator_delta_rows(SetDescriptor s, LatticeElement c) {
    if (!to_periodic(s))
        throw UnsupportedCombinationError("indicator_delta_rows set must be decidable");
    ChargeFamily f;
    f.kind_ = Kind::IndicatorDeltaRows;
    f.dim_ = c.dim();
    f.coeff_ = std::move(c);
    f.indicator_ = std::move(s);
    return f;
}

AtomicSpace ChargeFamily::space() const {
    if (base_) return base_->space();
    return AtomicSpace::countable();
}

Charge ChargeFamily::at(std::uint64_t n) const {
    if (n == 0) throw Error("family indices start at 1");
    switch (kind_) {
        case Kind::Constant:
            return *base_;
        case Kind::GeometricPerturbation:
            return *base_ + dir_->scaled(rational_pow(rho_, n));
        case Kind::TriangleRows: {
            std::vector<LatticeElement> prefix;
            LatticeElement w = rational_pow(rho_, n) * coeff_;
            for (std::uint64_t k = 1; k <= n; ++k) {
                bool in = !mask_ || mask_->contains(k);
                prefix.push_back(in ? w : LatticeElement::zero(dim_));
            }
            return Charge::countable(std::move(prefix), {}, dim_);
        }
        case Kind::IndicatorDeltaRows: {
            if (!indicator_->contains(n)) return Charge::countable({}, {}, dim_);
            std::vector<LatticeElement> prefix(static_cast<std::size_t>(n),
                                               LatticeElement::zero(dim_));
            prefix.back() = coeff_;
            return Charge::countable(std::move(prefix), {}, dim_);
        }
    }
    throw Error("unreachable family kind");
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

std::optional<ElementSequence> ChargeFamily::value_sequence(const SetDescriptor& a,
                                                            std::uint64_t depth) const {
    switch (kind_) {
        case Kind::Constant: {
            ValueInterval v = base_->evaluate(a, depth);
            if (!v.is_exact()) return std::nullopt;
            return ElementSequence::constant(v.lower());
        }
        case Kind::GeometricPerturbation: {
            ValueInterval vb = base_->evaluate(a, depth);
            ValueInterval vd = dir_->evaluate(a, depth);
            if (!vb.is_exact() || !vd.is_exact()) return std::nullopt;
            return ElementSequence::affine_geometric(vb.lower(), vd.lower(), rho_);
        }
        case Kind::TriangleRows: {
            SetDescriptor eff = mask_ ? SetDescriptor::set_intersection(a, *mask_) : a;
            auto ep = to_periodic(eff);
            if (!ep) return std::nullopt;
            return ElementSequence::count_geometric(coeff_, rho_, *ep);
        }
        case Kind::IndicatorDeltaRows: {
            auto ep = to_periodic(SetDescriptor::set_intersection(*indicator_, a));
            if (!ep) return std::nullopt;
            return ElementSequence::indicator_mix(*ep, ElementSequence::constant(coeff_),
                                                  ElementSequence::constant(
                                                      LatticeElement::zero(dim_)));
        }
    }
    return std::nullopt;
}

std::optional<ChargeFamily::VariationSeq> ChargeFamily::variation_sequence(
    std::uint64_t depth) const {
    switch (kind_) {
        case Kind::Constant: {
            ValueInterval v = base_->variation(MeasurableSet::everything(), depth);
            return VariationSeq{ElementSequence::constant(v.upper()), v.is_exact()};
        }
        case Kind::GeometricPerturbation: {
            ValueInterval vb = base_->variation(MeasurableSet::everything(), depth);
            ValueInterval vd = dir_->variation(MeasurableSet::everything(), depth);
            return VariationSeq{ElementSequence::affine_geometric(vb.upper(), vd.upper(), rho_),
                                false};
        }
        case Kind::TriangleRows: {
            if (!mask_) return VariationSeq{ElementSequence::n_geometric(abs(coeff_), rho_), true};
            auto ep = to_periodic(*mask_);
            if (!ep) return std::nullopt;
            return VariationSeq{ElementSequence::count_geometric(abs(coeff_), rho_, *ep), true};
        }
        case Kind::IndicatorDeltaRows: {
            auto ep = to_periodic(*indicator_);
            if (!ep) return std::nullopt;
            return VariationSeq{
                ElementSequence::indicator_mix(*ep, ElementSequence::constant(abs(coeff_)),
                                               ElementSequence::constant(
                                                   LatticeElement::zero(dim_))),
                true};
        }
    }
    return std::nullopt;
}

std::optional<std::uint64_t> ChargeFamily::variation_tail_threshold(
    const LatticeElement& bound, std::uint64_t depth) const {
    auto vs = variation_sequence(depth);
    if (!vs) return std::nullopt;
    // find least t with value(n) <= bound for all n >= t, using the good-set
    // of the variation sequence against limit 0
    auto gb = vs->seq.good_set(LatticeElement::zero(dim_), bound);
    const std::optional<PeriodicSet>& good = gb.exact ? gb.exact : gb.under;
    if (!good) return std::nullopt;
    // least t with [t, ∞) ⊆ good
    PeriodicSet badp = good->complemented();
    if (badp.is_empty()) return 1;
    if (!badp.is_finite()) return std::nullopt;
    return *badp.max_finite() + 1;
}

namespace {

// sup_{k >= L} k·rho^k, exact via the unimodal peak
Rational n_geom_sup_from(const Rational& rho, std::uint64_t l) {
    Rational peak_bound = rho / (Rational(1) - rho);
    std::uint64_t kp = 1;
    while (Rational(kp) <= peak_bound) ++kp;
    std::uint64_t k = std::max(l, kp);
    return Rational(BigInt(k)) * rational_pow(rho, k);
}

} // namespace

std::optional<LatticeElement> ChargeFamily::family_tail_sup(const SetFamily& h,
                                                            std::uint64_t j_from) const {
    return family_tail_sup_over(PeriodicSet::naturals(), h, j_from);
}

std::optional<LatticeElement> ChargeFamily::family_tail_sup_over(const PeriodicSet& index_set,
                                                                 const SetFamily& h,
                                                                 std::uint64_t j_from) const {
    if (index_set.is_empty()) return LatticeElement::zero(dim_);
    if (auto cnt = h.count()) {
        if (j_from > *cnt) return LatticeElement::zero(dim_); // no sets left
    }
    auto min_elem = h.min_element_from(j_from);
    if (!min_elem) return LatticeElement::zero(dim_);
    std::uint64_t l = *min_elem;
    std::uint64_t n0 = *index_set.least();
    switch (kind_) {
        case Kind::Constant: {
            // |m(H_j)| <= Σ_{k >= L} env(k); diffuse and charge vanish on
            // atoms-only disjoint families beyond the first blocks
            LatticeElement bound = base_->envelope().sum_from(l);
            if (!base_->diffuse_pieces().empty() || (base_->has_charge() && h.count())) {
                // listed sets may carry diffuse footprints: fall back to scan
            }
            if (auto cnt = h.count()) {
                LatticeElement acc = LatticeElement::zero(dim_);
                for (std::uint64_t j = j_from; j <= *cnt; ++j)
                    acc = sup(acc, base_->evaluate(h.at(j), 64).abs_bounds().upper());
                return acc;
            }
            return bound;
        }
        case Kind::GeometricPerturbation: {
            auto cb = ChargeFamily::constant(*base_).family_tail_sup_over(index_set, h, j_from);
            auto cd = ChargeFamily::constant(*dir_).family_tail_sup_over(index_set, h, j_from);
            if (!cb || !cd) return std::nullopt;
            return *cb + rational_pow(rho_, n0) * (*cd);
        }
        case Kind::TriangleRows: {
            // |m_n(H_j)| <= |c|·rho^n·|H_j ∩ [1..n]| <= |c|·n·rho^n, and
            // H_j ∩ [1..n] nonempty forces n >= L
            Rational s = n_geom_sup_from(rho_, std::max(l, n0));
            return s * abs(coeff_);
        }
        case Kind::IndicatorDeltaRows: {
            // m_n(H_j) = c·[n in S][n in H_j]; n in index_set, j >= j_from
            auto sp = to_periodic(*indicator_);
            if (!sp) return std::nullopt;
            auto live = PeriodicSet::intersect(*sp, index_set);
            if (!live) return std::nullopt;
            if (live->is_empty()) return LatticeElement::zero(dim_);
            switch (h.kind()) {
                case SetFamily::Kind::Singletons: {
                    // need n = j >= j_from
                    if (live->least_geq(j_from)) return abs(coeff_);
                    return LatticeElement::zero(dim_);
                }
                case SetFamily::Kind::BlocksOf: {
                    const PartitionFilter& f = h.filter();
                    for (std::uint64_t j = j_from; j <= j_from + 512; ++j)
                        if (least_element_in_block(f, j, descriptor_of(*live)))
                            return abs(coeff_);
                    // no live block found nearby; certify only when the live
                    // set is covered by blocks below j_from
                    Classification c = classify(f, descriptor_of(*live));
                    if (c.in_ideal == Tri::Yes && c.cover_complete) {
                        bool below = true;
                        for (auto k : c.ideal_cover)
                            if (k >= j_from) below = false;
                        if (below) return LatticeElement::zero(dim_);
                    }
                    return abs(coeff_); // sound upper bound
                }
                case SetFamily::Kind::Listed: {
                    auto cnt = *h.count();
                    for (std::uint64_t j = j_from; j <= cnt; ++j) {
                        auto hep = to_periodic(h.at(j));
                        if (!hep) return abs(coeff_);
                        auto both = PeriodicSet::intersect(*live, *hep);
                        if (!both || !both->is_empty()) return abs(coeff_);
                    }
                    return LatticeElement::zero(dim_);
                }
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

LatticeElement ChargeFamily::equibound() const {
    switch (kind_) {
        case Kind::Constant:
            return base_->total_variation_upper();
        case Kind::GeometricPerturbation:
            return base_->total_variation_upper() +
                   rho_ * dir_->total_variation_upper();
        case Kind::TriangleRows:
            return n_geom_sup_from(rho_, 1) * abs(coeff_);
        case Kind::IndicatorDeltaRows:
            return abs(coeff_);
    }
    throw Error("unreachable family kind");
}

ChargeFamily ChargeFamily::restricted(const MeasurableSet& e, bool include_charge) const {
    switch (kind_) {
        case Kind::Constant:
            return constant(base_->restricted(e, include_charge));
        case Kind::GeometricPerturbation:
            return geometric_perturbation(base_->restricted(e, include_charge),
                                          dir_->restricted(e, include_charge), rho_);
        case Kind::TriangleRows: {
            SetDescriptor m = mask_ ? SetDescriptor::set_intersection(*mask_, e.atoms) : e.atoms;
            return triangle_rows(coeff_, rho_, m);
        }
        case Kind::IndicatorDeltaRows: {
            // restriction cuts each row's single atom
            SetDescriptor s = SetDescriptor::set_intersection(*indicator_, e.atoms);
            return indicator_delta_rows(s, coeff_);
        }
    }
    throw Error("unreachable family kind");
}

ChargeFamily ChargeFamily::charge_part_family() const {
    switch (kind_) {
        case Kind::Constant:
            return constant(base_->charge_part());
        case Kind::GeometricPerturbation:
            return geometric_perturbation(base_->charge_part(), dir_->charge_part(), rho_);
        case Kind::TriangleRows:
        case Kind::IndicatorDeltaRows:
            return constant(Charge::countable({}, {}, dim_));
    }
    throw Error("unreachable family kind");
}

ChargeFamily ChargeFamily::sigma_part_family() const {
    switch (kind_) {
        case Kind::Constant:
            return constant(base_->sigma_part());
        case Kind::GeometricPerturbation:
            return geometric_perturbation(base_->sigma_part(), dir_->sigma_part(), rho_);
        case Kind::TriangleRows:
        case Kind::IndicatorDeltaRows:
            return *this;
    }
    throw Error("unreachable family kind");
}

Charge ChargeFamily::limit_charge() const {
    switch (kind_) {
        case Kind::Constant:
        case Kind::GeometricPerturbation:
            return *base_;
        case Kind::TriangleRows:
        case Kind::IndicatorDeltaRows:
            return Charge::countable({}, {}, dim_);
    }
    throw Error("unreachable family kind");
}

std::string ChargeFamily::str() const {
    switch (kind_) {
        case Kind::Constant:
            return "(family (constant " + base_->str() + "))";
        case Kind::GeometricPerturbation:
            return "(family (geometric-perturbation " + base_->str() + " " + dir_->str() + " " +
                   rational_str(rho_) + "))";
        case Kind::TriangleRows: {
            std::string out = "(family (triangle-rows " + coeff_.str() + " " + rational_str(rho_);
            if (mask_) out += " " + mask_->str();
            out += "))";
            return out;
        }
        case Kind::IndicatorDeltaRows:
            return "(family (indicator-delta-rows " + indicator_->str() + " " + coeff_.str() +
                   "))";
    }
    throw Error("unreachable family kind");
}

namespace {

LatticeElement vec_from(const SExpr& e) {
    auto args = e.expect_tagged("vec");
    std::vector<Rational> coords;
    for (const auto& a : args) coords.push_back(parse_rational(a.atom_value()));
    return LatticeElement(std::move(coords));
}

} // namespace

ChargeFamily ChargeFamily::from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("family");
    const SExpr& body = args[0];
    const std::string h = body.head();
    if (h == "constant") return constant(Charge::from_sexpr(body[1]));
    if (h == "geometric-perturbation")
        return geometric_perturbation(Charge::from_sexpr(body[1]), Charge::from_sexpr(body[2]),
                                      parse_rational(body[3].atom_value()));
    if (h == "triangle-rows") {
        std::optional<SetDescriptor> mask;
        if (body.size() > 3) mask = SetDescriptor::from_sexpr(body[3]);
        return triangle_rows(vec_from(body[1]), parse_rational(body[2].atom_value()), mask);
    }
    if (h == "indicator-delta-rows")
        return indicator_delta_rows(SetDescriptor::from_sexpr(body[1]), vec_from(body[2]));
    throw ParseError("unknown family " + e.str(), 0);
}

} // namespace lmeas
