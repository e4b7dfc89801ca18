#include "lmeas/filters.hpp"

#include <algorithm>
#include <set>

namespace lmeas {

namespace {

// ---------------------------------------------------------------------------
// image analysis for eventually periodic sets
// ---------------------------------------------------------------------------

struct ImageInfo {
    bool finite;
    std::vector<std::uint64_t> cover; // valid when finite
};

// Block-index image of the set described by (ep, complemented): membership is
// residues[n % P] XOR complemented for n >= threshold, prefix flips below.
ImageInfo ep_image(const PartitionFilter& f, const PeriodicSet& ep, bool complemented) {
    ImageInfo out{true, {}};
    std::vector<std::uint64_t> residues_on;
    for (std::uint64_t r = 0; r < ep.period; ++r)
        if (ep.residues[static_cast<std::size_t>(r)] != complemented) residues_on.push_back(r);

    // explicit elements below threshold
    std::vector<std::uint64_t> explicit_elems;
    bool explicit_ok = true;
    if (!complemented) {
        explicit_elems = ep.prefix;
    } else if (ep.threshold <= PeriodicSet::kEnumCap) {
        std::size_t pi = 0;
        for (std::uint64_t n = 1; n < ep.threshold; ++n) {
            bool in = pi < ep.prefix.size() && ep.prefix[pi] == n;
            if (in)
                ++pi;
            else
                explicit_elems.push_back(n);
        }
    } else {
        explicit_ok = false; // cover evidence unavailable; finiteness still decidable
    }

    if (f.blocks_finite()) {
        out.finite = residues_on.empty();
        if (out.finite && explicit_ok)
            for (std::uint64_t x : explicit_elems) out.cover.push_back(f.block_of(x));
    } else {
        // dyadic valuation blocks: class {n ≡ r (mod P), n >= N} has finite
        // valuation image iff r != 0 and v2(r) < v2(P)
        unsigned t = dyadic_valuation_of(ep.period);
        out.finite = true;
        for (std::uint64_t r : residues_on) {
            if (r == 0 || dyadic_valuation_of(r) >= t) {
                out.finite = false;
                break;
            }
            out.cover.push_back(dyadic_valuation_of(r) + 1);
        }
        if (out.finite && explicit_ok)
            for (std::uint64_t x : explicit_elems) out.cover.push_back(dyadic_valuation_of(x) + 1);
        if (!out.finite) out.cover.clear();
    }
    std::sort(out.cover.begin(), out.cover.end());
    out.cover.erase(std::unique(out.cover.begin(), out.cover.end()), out.cover.end());
    if (out.finite && !explicit_ok) out.cover.clear();
    return out;
}

struct FinCof {
    Tri finite = Tri::Unknown;
    Tri cofinite = Tri::Unknown;
};

Tri emptiness(const SetDescriptor& s);

FinCof finiteness(const SetDescriptor& s) {
    if (!s.opaque()) {
        if (auto ep = to_periodic(s)) {
            bool all_true =
                std::all_of(ep->residues.begin(), ep->residues.end(), [](bool b) { return b; });
            return {ep->is_finite() ? Tri::Yes : Tri::No, all_true ? Tri::Yes : Tri::No};
        }
    }
    using Kind = SetDescriptor::Kind;
    switch (s.kind()) {
        case Kind::Finite:
            return {Tri::Yes, Tri::No};
        case Kind::ArithProg:
        case Kind::DyadicValuation:
            return {Tri::No, s.kind() == Kind::ArithProg && s.ap_d() == 1 ? Tri::Yes : Tri::No};
        case Kind::BlockUnion: {
            FinCof idx = finiteness(s.child());
            if (s.node_filter().blocks_finite()) {
                // finite union of finite blocks; complement = union over I^c
                return {idx.finite, idx.cofinite};
            }
            // infinite blocks: finiteness ⟺ emptiness of the index set
            Tri e = emptiness(s.child());
            Tri ec = Tri::Unknown;
            // complement(BlockUnion(f, I)) = BlockUnion(f, I^c)
            FinCof fc;
            fc.finite = e == Tri::Yes ? Tri::Yes : (e == Tri::No ? Tri::No : Tri::Unknown);
            if (idx.cofinite == Tri::Yes) {
                // hard to decide emptiness of I^c without EP; leave unknown
                ec = Tri::Unknown;
            }
            fc.cofinite = ec;
            return fc;
        }
        case Kind::Complement: {
            FinCof c = finiteness(s.child());
            return {c.cofinite, c.finite};
        }
        case Kind::Union: {
            FinCof a = finiteness(s.left());
            FinCof b = finiteness(s.right());
            FinCof out;
            if (a.finite == Tri::Yes && b.finite == Tri::Yes)
                out.finite = Tri::Yes;
            else if (a.finite == Tri::No || b.finite == Tri::No)
                out.finite = Tri::No;
            if (a.cofinite == Tri::Yes || b.cofinite == Tri::Yes) out.cofinite = Tri::Yes;
            return out;
        }
        case Kind::Intersection: {
            FinCof a = finiteness(s.left());
            FinCof b = finiteness(s.right());
            FinCof out;
            if (a.finite == Tri::Yes || b.finite == Tri::Yes) out.finite = Tri::Yes;
            if (a.cofinite == Tri::Yes && b.cofinite == Tri::Yes)
                out.cofinite = Tri::Yes;
            else if (a.cofinite == Tri::No || b.cofinite == Tri::No)
                out.cofinite = Tri::No;
            return out;
        }
        case Kind::LeastInBlocks: {
            Classification cj = classify(s.node_filter(), s.child());
            FinCof out;
            out.finite = cj.in_ideal;
            out.cofinite = Tri::Unknown;
            return out;
        }
        case Kind::Predicate:
            return {};
    }
    return {};
}

Tri emptiness(const SetDescriptor& s) {
    if (!s.opaque()) {
        if (auto ep = to_periodic(s)) return ep->is_empty() ? Tri::Yes : Tri::No;
    }
    using Kind = SetDescriptor::Kind;
    switch (s.kind()) {
        case Kind::Finite:
            return s.finite_elements().empty() ? Tri::Yes : Tri::No;
        case Kind::ArithProg:
        case Kind::DyadicValuation:
            return Tri::No;
        case Kind::BlockUnion:
        case Kind::LeastInBlocks:
            return emptiness(s.child());
        case Kind::Union: {
            Tri a = emptiness(s.left());
            Tri b = emptiness(s.right());
            if (a == Tri::No || b == Tri::No) return Tri::No;
            if (a == Tri::Yes && b == Tri::Yes) return Tri::Yes;
            return Tri::Unknown;
        }
        case Kind::Intersection: {
            Tri a = emptiness(s.left());
            Tri b = emptiness(s.right());
            if (a == Tri::Yes || b == Tri::Yes) return Tri::Yes;
            return Tri::Unknown;
        }
        default:
            break;
    }
    // a small scan can certify nonemptiness
    for (std::uint64_t n = 1; n <= 4096; ++n)
        if (s.contains(n)) return Tri::No;
    return Tri::Unknown;
}

void enforce_consistency(Classification& c) {
    // the filter is free: ideal members are never filter members
    if (c.in_ideal == Tri::Yes) c.in_filter = Tri::No;
    if (c.in_filter == Tri::Yes) c.in_ideal = Tri::No;
}

std::vector<std::uint64_t> index_elements(const SetDescriptor& s, bool* complete) {
    *complete = false;
    if (!s.opaque()) {
        if (auto ep = to_periodic(s)) {
            if (ep->is_finite()) {
                *complete = true;
                return ep->prefix;
            }
        }
    }
    return {};
}

} // namespace

bool in_ideal_periodic(const PartitionFilter& f, const PeriodicSet& ep) {
    return ep_image(f, ep, false).finite;
}

Classification classify(const PartitionFilter& f, const SetDescriptor& s) {
    using Kind = SetDescriptor::Kind;
    if (!s.opaque()) {
        if (auto ep = to_periodic(s)) {
            ImageInfo im = ep_image(f, *ep, false);
            ImageInfo imc = ep_image(f, *ep, true);
            Classification c;
            c.in_ideal = im.finite ? Tri::Yes : Tri::No;
            c.in_filter = imc.finite ? Tri::Yes : Tri::No;
            c.ideal_cover = im.cover;
            c.filter_cocover = imc.cover;
            c.cover_complete = true;
            enforce_consistency(c);
            return c;
        }
    }
    Classification c;
    switch (s.kind()) {
        case Kind::BlockUnion: {
            if (s.node_filter() == f) {
                FinCof fc = finiteness(s.child());
                c.in_ideal = fc.finite;
                c.in_filter = fc.cofinite;
                if (c.in_ideal == Tri::Yes)
                    c.ideal_cover = index_elements(s.child(), &c.cover_complete);
                if (c.in_filter == Tri::Yes) {
                    bool cc = false;
                    c.filter_cocover =
                        index_elements(SetDescriptor::complement(s.child()), &cc);
                }
                enforce_consistency(c);
                return c;
            }
            // block union over a different filter
            FinCof fc = finiteness(s);
            if (fc.finite == Tri::Yes) c.in_ideal = Tri::Yes; // finite sets are in every free ideal
            if (fc.cofinite == Tri::Yes) c.in_filter = Tri::Yes;
            if (f.blocks_finite()) {
                if (fc.finite == Tri::No) c.in_ideal = Tri::No;
                if (fc.cofinite == Tri::No) c.in_filter = Tri::No;
            }
            enforce_consistency(c);
            return c;
        }
        case Kind::Complement: {
            Classification inner = classify(f, s.child());
            c.in_ideal = inner.in_filter;
            c.in_filter = inner.in_ideal;
            c.ideal_cover = inner.filter_cocover;
            c.filter_cocover = inner.ideal_cover;
            c.cover_complete = inner.cover_complete;
            return c;
        }
        case Kind::Union: {
            Classification a = classify(f, s.left());
            Classification b = classify(f, s.right());
            if (a.in_ideal == Tri::Yes && b.in_ideal == Tri::Yes) {
                c.in_ideal = Tri::Yes;
                c.ideal_cover = a.ideal_cover;
                c.ideal_cover.insert(c.ideal_cover.end(), b.ideal_cover.begin(),
                                     b.ideal_cover.end());
                std::sort(c.ideal_cover.begin(), c.ideal_cover.end());
                c.ideal_cover.erase(std::unique(c.ideal_cover.begin(), c.ideal_cover.end()),
                                    c.ideal_cover.end());
                c.cover_complete = a.cover_complete && b.cover_complete;
            } else if (a.in_ideal == Tri::No || b.in_ideal == Tri::No) {
                c.in_ideal = Tri::No;
            }
            if (a.in_filter == Tri::Yes) {
                c.in_filter = Tri::Yes;
                c.filter_cocover = a.filter_cocover;
            } else if (b.in_filter == Tri::Yes) {
                c.in_filter = Tri::Yes;
                c.filter_cocover = b.filter_cocover;
            } else if ((a.in_filter == Tri::No && b.in_ideal == Tri::Yes) ||
                       (a.in_ideal == Tri::Yes && b.in_filter == Tri::No)) {
                // stationary complement intersected with a filter set stays stationary
                c.in_filter = Tri::No;
            }
            enforce_consistency(c);
            return c;
        }
        case Kind::Intersection: {
            Classification a = classify(f, s.left());
            Classification b = classify(f, s.right());
            if (a.in_ideal == Tri::Yes) {
                c.in_ideal = Tri::Yes;
                c.ideal_cover = a.ideal_cover;
                c.cover_complete = a.cover_complete;
            } else if (b.in_ideal == Tri::Yes) {
                c.in_ideal = Tri::Yes;
                c.ideal_cover = b.ideal_cover;
                c.cover_complete = b.cover_complete;
            } else if ((a.in_ideal == Tri::No && b.in_filter == Tri::Yes) ||
                       (b.in_ideal == Tri::No && a.in_filter == Tri::Yes)) {
                // stationary ∩ filter-member is stationary
                c.in_ideal = Tri::No;
            }
            if (a.in_filter == Tri::Yes && b.in_filter == Tri::Yes) {
                c.in_filter = Tri::Yes;
                c.filter_cocover = a.filter_cocover;
                c.filter_cocover.insert(c.filter_cocover.end(), b.filter_cocover.begin(),
                                        b.filter_cocover.end());
                std::sort(c.filter_cocover.begin(), c.filter_cocover.end());
                c.filter_cocover.erase(
                    std::unique(c.filter_cocover.begin(), c.filter_cocover.end()),
                    c.filter_cocover.end());
            } else if (a.in_filter == Tri::No || b.in_filter == Tri::No) {
                c.in_filter = Tri::No;
            }
            enforce_consistency(c);
            return c;
        }
        case Kind::LeastInBlocks: {
            if (s.node_filter() == f) {
                Classification cj = classify(f, s.child());
                c.in_ideal = cj.in_ideal;
                c.ideal_cover = cj.ideal_cover;
                c.cover_complete = cj.cover_complete;
                c.in_filter = cj.in_ideal == Tri::Yes ? Tri::No : Tri::Unknown;
                enforce_consistency(c);
                return c;
            }
            FinCof fc = finiteness(s);
            if (fc.finite == Tri::Yes) c.in_ideal = Tri::Yes;
            if (f.blocks_finite() && fc.finite == Tri::No) c.in_ideal = Tri::No;
            enforce_consistency(c);
            return c;
        }
        default: {
            FinCof fc = finiteness(s);
            if (fc.finite == Tri::Yes) c.in_ideal = Tri::Yes;
            if (fc.cofinite == Tri::Yes) c.in_filter = Tri::Yes;
            if (f.blocks_finite()) {
                if (fc.finite == Tri::No) c.in_ideal = Tri::No;
                if (fc.cofinite == Tri::No) c.in_filter = Tri::No;
            }
            enforce_consistency(c);
            return c;
        }
    }
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks_met(const PartitionFilter& f,
                                                                const SetDescriptor& s,
                                                                std::uint64_t want) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    std::set<std::uint64_t> seen;
    std::uint64_t k_cap = std::min<std::uint64_t>(4 * want + 64, 512);
    for (std::uint64_t k = 1; k <= k_cap && out.size() < want; ++k) {
        if (auto e = least_element_in_block(f, k, s)) {
            if (seen.insert(k).second) out.emplace_back(k, *e);
        }
    }
    if (out.size() >= want) return out;
    // element scan fallback
    if (auto ep = to_periodic(s)) {
        std::optional<std::uint64_t> cur = ep->least();
        std::uint64_t steps = 0;
        while (cur && out.size() < want && steps < (1u << 20)) {
            std::uint64_t k = f.block_of(*cur);
            if (seen.insert(k).second) out.emplace_back(k, *cur);
            cur = ep->least_geq(*cur + 1);
            ++steps;
        }
    } else {
        for (std::uint64_t n = 1; n <= (1u << 20) && out.size() < want; ++n) {
            if (!s.contains(n)) continue;
            std::uint64_t k = f.block_of(n);
            if (seen.insert(k).second) out.emplace_back(k, n);
        }
    }
    return out;
}

namespace {

Witness cover_witness(const std::vector<std::uint64_t>& cover) {
    return Witness{"ideal-cover", cover, ""};
}

Witness stationary_witness(const PartitionFilter& f, const SetDescriptor& s,
                           std::uint64_t depth) {
    auto met = blocks_met(f, s, depth);
    Witness w{"stationary-blocks", {}, ""};
    for (auto& [k, e] : met) w.indices.push_back(k);
    return w;
}

} // namespace

Verdict in_ideal(const PartitionFilter& f, const SetDescriptor& h, std::uint64_t depth) {
    Classification c = classify(f, h);
    if (c.in_ideal == Tri::Yes) return Verdict::holds(depth, cover_witness(c.ideal_cover));
    if (c.in_ideal == Tri::No) return Verdict::fails(depth, stationary_witness(f, h, depth));
    // sampled fallback (opaque or undecided): look for `depth` distinct blocks
    auto met = blocks_met(f, h, depth);
    if (met.size() >= depth) return Verdict::fails(depth, stationary_witness(f, h, depth));
    return Verdict::unknown(depth);
}

Verdict in_filter(const PartitionFilter& f, const SetDescriptor& h, std::uint64_t depth) {
    Classification c = classify(f, h);
    if (c.in_filter == Tri::Yes) return Verdict::holds(depth, cover_witness(c.filter_cocover));
    if (c.in_filter == Tri::No)
        return Verdict::fails(depth, stationary_witness(f, SetDescriptor::complement(h), depth));
    auto met = blocks_met(f, SetDescriptor::complement(h), depth);
    if (met.size() >= depth)
        return Verdict::fails(depth, stationary_witness(f, SetDescriptor::complement(h), depth));
    return Verdict::unknown(depth);
}

Verdict is_stationary(const PartitionFilter& f, const SetDescriptor& h, std::uint64_t depth) {
    Verdict ideal = in_ideal(f, h, depth);
    if (ideal.outcome == Outcome::Holds) {
        Verdict v = Verdict::fails(depth, ideal.witness ? *ideal.witness : Witness{});
        return v;
    }
    if (ideal.outcome == Outcome::Fails)
        return Verdict::holds(depth, ideal.witness ? *ideal.witness : Witness{});
    return Verdict::unknown(depth);
}

SetDescriptor select_sparse_stationary(const PartitionFilter& f, const SetDescriptor& j,
                                       std::uint64_t depth) {
    Verdict st = is_stationary(f, j, depth);
    if (st.outcome != Outcome::Holds)
        throw NotStationaryError("select_sparse_stationary: not stationary at depth " +
                                 std::to_string(depth));
    return SetDescriptor::least_in_blocks(f, j);
}

SetDescriptor diagonal_witness(const PartitionFilter& f, const std::vector<SetDescriptor>& as,
                               const SetDescriptor& i, std::uint64_t depth) {
    std::vector<std::uint64_t> bad_blocks;
    for (const auto& a : as) {
        Classification c = classify(f, a);
        if (c.in_filter != Tri::Yes || !c.cover_complete)
            throw ConstructionError("diagonal_witness: set not certified in filter at depth " +
                                    std::to_string(depth));
        bad_blocks.insert(bad_blocks.end(), c.filter_cocover.begin(), c.filter_cocover.end());
    }
    std::sort(bad_blocks.begin(), bad_blocks.end());
    bad_blocks.erase(std::unique(bad_blocks.begin(), bad_blocks.end()), bad_blocks.end());
    SetDescriptor selector = select_sparse_stationary(f, i, depth);
    if (bad_blocks.empty()) return selector;
    return SetDescriptor::set_intersection(
        selector,
        SetDescriptor::complement(SetDescriptor::block_union(f, SetDescriptor::finite(bad_blocks))));
}

Verdict filter_o_convergence(const PartitionFilter& f, const ElementSequence& x,
                             const LatticeElement& limit, const Regulator& r,
                             std::uint64_t depth) {
    if (x.dim() != limit.dim() || x.dim() != r.dim())
        throw DimensionMismatchError("filter_o_convergence");
    bool any_unknown = false;
    for (std::uint64_t p = 1; p <= depth; ++p) {
        LatticeElement t = r.eval(p);
        auto gb = x.good_set(limit, t);
        if (gb.exact) {
            ImageInfo bad = ep_image(f, *gb.exact, true);
            if (!bad.finite) {
                return Verdict::fails(depth, Witness{"bad-set-stationary", {p}, ""});
            }
            continue;
        }
        bool decided = false;
        if (gb.under) {
            // complement of the under-set covers the true bad set
            ImageInfo bad = ep_image(f, *gb.under, true);
            if (bad.finite) decided = true;
        }
        if (!decided && gb.over) {
            ImageInfo bad = ep_image(f, *gb.over, true);
            if (!bad.finite)
                return Verdict::fails(depth, Witness{"bad-set-stationary", {p}, ""});
        }
        if (!decided) any_unknown = true;
    }
    if (any_unknown) return Verdict::unknown(depth);
    return Verdict::holds(depth);
}

bool validate_block(const Block& b, std::uint64_t depth) {
    // pieces pairwise disjoint on [1..depth], union covers `of` there
    for (std::uint64_t n = 1; n <= depth; ++n) {
        std::uint64_t owners = 0;
        for (std::uint64_t k = 1; k <= depth; ++k)
            if (b.pieces(k).contains(n)) ++owners;
        bool in_of = b.of.contains(n);
        if (in_of && owners == 0) {
            // may be owned by a piece beyond depth; tolerated only off the checked window
            return false;
        }
        if (!in_of && owners > 0) return false;
        if (owners > 1) return false;
    }
    return true;
}

} // namespace lmeas
