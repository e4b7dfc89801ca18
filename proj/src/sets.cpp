#include "lmeas/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lmeas {

// ---------------------------------------------------------------------------
// PeriodicSet
// ---------------------------------------------------------------------------

bool PeriodicSet::member(std::uint64_t n) const {
    if (n == 0) return false;
    if (n < threshold) return std::binary_search(prefix.begin(), prefix.end(), n);
    return residues[static_cast<std::size_t>(n % period)];
}

bool PeriodicSet::residues_empty() const {
    return std::none_of(residues.begin(), residues.end(), [](bool b) { return b; });
}

bool PeriodicSet::is_empty() const { return prefix.empty() && residues_empty(); }

std::optional<std::uint64_t> PeriodicSet::least() const { return least_geq(1); }

std::optional<std::uint64_t> PeriodicSet::least_geq(std::uint64_t n) const {
    if (n == 0) n = 1;
    auto it = std::lower_bound(prefix.begin(), prefix.end(), n);
    if (it != prefix.end()) return *it;
    std::uint64_t start = std::max(n, threshold);
    if (!residues_empty()) {
        for (std::uint64_t m = start; m < start + period; ++m)
            if (residues[static_cast<std::size_t>(m % period)]) return m;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> PeriodicSet::max_finite() const {
    if (!is_finite() || prefix.empty()) return std::nullopt;
    return prefix.back();
}

std::vector<std::uint64_t> PeriodicSet::elements_leq(std::uint64_t bound) const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x : prefix) {
        if (x > bound) break;
        out.push_back(x);
    }
    for (std::uint64_t n = threshold; n <= bound; ++n)
        if (residues[static_cast<std::size_t>(n % period)]) out.push_back(n);
    return out;
}

namespace {

// |{n in [lo, hi] : n ≡ r (mod p)}|
std::uint64_t count_congruent(std::uint64_t lo, std::uint64_t hi, std::uint64_t r,
                              std::uint64_t p) {
    if (lo > hi) return 0;
    // first n >= lo with n ≡ r
    std::uint64_t rem = lo % p;
    std::uint64_t first = lo + (r >= rem ? r - rem : p - rem + r);
    if (first > hi) return 0;
    return (hi - first) / p + 1;
}

} // namespace

std::uint64_t PeriodicSet::count_leq(std::uint64_t bound) const {
    std::uint64_t c = static_cast<std::uint64_t>(
        std::upper_bound(prefix.begin(), prefix.end(), bound) - prefix.begin());
    if (bound >= threshold) {
        for (std::uint64_t r = 0; r < period; ++r)
            if (residues[static_cast<std::size_t>(r)])
                c += count_congruent(threshold, bound, r, period);
    }
    return c;
}

PeriodicSet PeriodicSet::finite(std::vector<std::uint64_t> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    while (!elems.empty() && elems.front() == 0) elems.erase(elems.begin());
    PeriodicSet s;
    s.period = 1;
    s.residues = {false};
    s.threshold = elems.empty() ? 1 : elems.back() + 1;
    s.prefix = std::move(elems);
    return s;
}

PeriodicSet PeriodicSet::arith_prog(std::uint64_t a, std::uint64_t d) {
    if (d == 0) throw Error("arith_prog: d must be positive");
    PeriodicSet s;
    s.period = d;
    s.residues.assign(static_cast<std::size_t>(d), false);
    s.residues[static_cast<std::size_t>(a % d)] = true;
    s.threshold = std::max<std::uint64_t>(a, 1);
    return s;
}

PeriodicSet PeriodicSet::naturals() {
    PeriodicSet s;
    s.period = 1;
    s.residues = {true};
    s.threshold = 1;
    return s;
}

PeriodicSet PeriodicSet::empty_set() {
    PeriodicSet s;
    s.period = 1;
    s.residues = {false};
    s.threshold = 1;
    return s;
}

PeriodicSet PeriodicSet::tail_from(std::uint64_t a) {
    PeriodicSet s;
    s.period = 1;
    s.residues = {true};
    s.threshold = std::max<std::uint64_t>(a, 1);
    return s;
}

PeriodicSet PeriodicSet::complemented() const {
    PeriodicSet out;
    out.threshold = threshold;
    out.period = period;
    out.residues.resize(residues.size());
    for (std::size_t i = 0; i < residues.size(); ++i) out.residues[i] = !residues[i];
    out.prefix.reserve(threshold > 1 ? 16 : 0);
    std::size_t pi = 0;
    for (std::uint64_t n = 1; n < threshold; ++n) {
        bool in = false;
        if (pi < prefix.size() && prefix[pi] == n) {
            in = true;
            ++pi;
        }
        if (!in) out.prefix.push_back(n);
        if (out.prefix.size() > kEnumCap) throw Error("PeriodicSet: complement enumeration cap");
    }
    return out;
}

namespace {

std::optional<PeriodicSet> combine(const PeriodicSet& a, const PeriodicSet& b, bool is_union) {
    std::uint64_t g = std::gcd(a.period, b.period);
    if (a.period / g > PeriodicSet::kPeriodCap / b.period) return std::nullopt;
    std::uint64_t lcm = a.period / g * b.period;
    if (lcm > PeriodicSet::kPeriodCap) return std::nullopt;
    std::uint64_t thr = std::max(a.threshold, b.threshold);
    if (thr > PeriodicSet::kEnumCap) return std::nullopt;
    PeriodicSet out;
    out.period = lcm;
    out.threshold = thr;
    out.residues.resize(static_cast<std::size_t>(lcm));
    for (std::uint64_t r = 0; r < lcm; ++r) {
        bool x = a.residues[static_cast<std::size_t>(r % a.period)];
        bool y = b.residues[static_cast<std::size_t>(r % b.period)];
        out.residues[static_cast<std::size_t>(r)] = is_union ? (x || y) : (x && y);
    }
    for (std::uint64_t n = 1; n < thr; ++n) {
        bool x = a.member(n);
        bool y = b.member(n);
        if (is_union ? (x || y) : (x && y)) out.prefix.push_back(n);
    }
    return out;
}

} // namespace

std::optional<PeriodicSet> PeriodicSet::unite(const PeriodicSet& a, const PeriodicSet& b) {
    return combine(a, b, true);
}

std::optional<PeriodicSet> PeriodicSet::intersect(const PeriodicSet& a, const PeriodicSet& b) {
    return combine(a, b, false);
}

// ---------------------------------------------------------------------------
// PartitionFilter
// ---------------------------------------------------------------------------

struct PartitionFilter::Data {
    Family family;
    std::uint64_t a = 0, b = 0;          // Ranges: len(k) = a*k + b
    std::vector<std::uint64_t> table;    // TableWithTailRule
};

PartitionFilter PartitionFilter::singletons() {
    auto d = std::make_shared<Data>();
    d->family = Family::Singletons;
    return PartitionFilter(std::move(d));
}

PartitionFilter PartitionFilter::ranges(std::uint64_t a, std::uint64_t b) {
    if (a + b == 0) throw Error("ranges filter: need a + b >= 1");
    auto d = std::make_shared<Data>();
    d->family = Family::Ranges;
    d->a = a;
    d->b = b;
    return PartitionFilter(std::move(d));
}

PartitionFilter PartitionFilter::dyadic_valuation_blocks() {
    auto d = std::make_shared<Data>();
    d->family = Family::DyadicValuationBlocks;
    return PartitionFilter(std::move(d));
}

PartitionFilter PartitionFilter::table_with_tail(std::vector<std::uint64_t> table) {
    std::uint64_t n0 = table.size();
    std::vector<bool> seen(static_cast<std::size_t>(n0) + 1, false);
    for (std::uint64_t k : table) {
        if (k == 0) throw Error("table filter: block indices start at 1");
        if (k <= n0) seen[static_cast<std::size_t>(k)] = true;
    }
    for (std::uint64_t k = 1; k <= n0; ++k)
        if (!seen[static_cast<std::size_t>(k)])
            throw Error("table filter: block " + std::to_string(k) + " would be empty");
    auto d = std::make_shared<Data>();
    d->family = Family::TableWithTailRule;
    d->table = std::move(table);
    return PartitionFilter(std::move(d));
}

PartitionFilter::Family PartitionFilter::family() const { return data_->family; }

bool PartitionFilter::blocks_finite() const {
    return data_->family != Family::DyadicValuationBlocks;
}

std::uint64_t PartitionFilter::range_len(std::uint64_t k) const {
    return data_->a * k + data_->b;
}

std::uint64_t PartitionFilter::range_start(std::uint64_t k) const {
    // 1 + sum_{i<k} (a*i + b)
    BigInt s = 1 + BigInt(data_->a) * k * (k - 1) / 2 + BigInt(data_->b) * (k - 1);
    if (s > BigInt(UINT64_MAX)) throw Error("range_start overflow");
    return static_cast<std::uint64_t>(s);
}

std::uint64_t PartitionFilter::table_prefix() const { return data_->table.size(); }

std::uint64_t PartitionFilter::block_of(std::uint64_t n) const {
    if (n == 0) throw Error("block_of: indices start at 1");
    switch (data_->family) {
        case Family::Singletons:
            return n;
        case Family::Ranges: {
            std::uint64_t lo = 1, hi = n; // start(k) >= k
            while (lo < hi) {
                std::uint64_t mid = lo + (hi - lo + 1) / 2;
                if (range_start(mid) <= n)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            return lo;
        }
        case Family::DyadicValuationBlocks:
            return dyadic_valuation_of(n) + 1;
        case Family::TableWithTailRule:
            if (n <= data_->table.size()) return data_->table[static_cast<std::size_t>(n - 1)];
            return n;
    }
    throw Error("unreachable filter family");
}

std::vector<std::uint64_t> PartitionFilter::block_members(std::uint64_t k,
                                                          std::uint64_t depth) const {
    if (k == 0) throw Error("block_members: block indices start at 1");
    std::vector<std::uint64_t> out;
    switch (data_->family) {
        case Family::Singletons:
            if (k <= depth) out.push_back(k);
            return out;
        case Family::Ranges: {
            std::uint64_t s = range_start(k);
            std::uint64_t len = range_len(k);
            for (std::uint64_t n = s; n < s + len && n <= depth; ++n) out.push_back(n);
            return out;
        }
        case Family::DyadicValuationBlocks: {
            if (k > 64) return out;
            std::uint64_t base = k == 64 ? (std::uint64_t(1) << 63) : (std::uint64_t(1) << (k - 1));
            if (base > depth) return out;
            for (std::uint64_t odd = 1; odd <= depth / base; odd += 2) out.push_back(base * odd);
            return out;
        }
        case Family::TableWithTailRule: {
            std::uint64_t n0 = data_->table.size();
            for (std::uint64_t n = 1; n <= std::min(n0, depth); ++n)
                if (data_->table[static_cast<std::size_t>(n - 1)] == k) out.push_back(n);
            if (k > n0 && k <= depth) out.push_back(k);
            std::sort(out.begin(), out.end());
            return out;
        }
    }
    throw Error("unreachable filter family");
}

std::uint64_t PartitionFilter::witness_bound(std::uint64_t K) const {
    switch (data_->family) {
        case Family::Singletons:
            return std::max<std::uint64_t>(K, 1);
        case Family::Ranges:
            return range_start(K) + range_len(K) - 1;
        case Family::DyadicValuationBlocks:
            if (K > 64) throw Error("witness_bound: dyadic block index too large");
            return K == 64 ? (std::uint64_t(1) << 63) : (std::uint64_t(1) << (K - 1));
        case Family::TableWithTailRule:
            return std::max<std::uint64_t>(data_->table.size(), K);
    }
    throw Error("unreachable filter family");
}

bool PartitionFilter::operator==(const PartitionFilter& other) const {
    return data_->family == other.data_->family && data_->a == other.data_->a &&
           data_->b == other.data_->b && data_->table == other.data_->table;
}

std::string PartitionFilter::str() const {
    switch (data_->family) {
        case Family::Singletons:
            return "(filter singletons)";
        case Family::Ranges:
            return "(filter ranges " + std::to_string(data_->a) + " " + std::to_string(data_->b) +
                   ")";
        case Family::DyadicValuationBlocks:
            return "(filter dyadic)";
        case Family::TableWithTailRule: {
            std::string out = "(filter table";
            for (std::uint64_t k : data_->table) out += " " + std::to_string(k);
            out += ")";
            return out;
        }
    }
    throw Error("unreachable filter family");
}

PartitionFilter PartitionFilter::from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("filter");
    if (args.empty()) throw ParseError("empty filter form", 0);
    const std::string& fam = args[0].atom_value();
    if (fam == "singletons") return singletons();
    if (fam == "dyadic") return dyadic_valuation_blocks();
    if (fam == "ranges") {
        if (args.size() != 3) throw ParseError("(filter ranges a b) expected", 0);
        return ranges(sexpr_u64(args[1]), sexpr_u64(args[2]));
    }
    if (fam == "table") {
        std::vector<std::uint64_t> t;
        for (std::size_t i = 1; i < args.size(); ++i) t.push_back(sexpr_u64(args[i]));
        return table_with_tail(std::move(t));
    }
    throw ParseError("unknown filter family '" + fam + "'", 0);
}

// ---------------------------------------------------------------------------
// SetDescriptor
// ---------------------------------------------------------------------------

struct SetDescriptor::Node {
    Kind kind;
    std::vector<std::uint64_t> elems; // Finite
    std::uint64_t a = 0, d = 1;       // ArithProg
    unsigned v = 0;                   // DyadicValuation
    std::optional<PartitionFilter> filter;
    std::vector<SetDescriptor> kids;
    std::string pname;
    std::function<bool(std::uint64_t)> pfn;
    bool opaque = false;
};

SetDescriptor SetDescriptor::finite(std::vector<std::uint64_t> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    while (!elems.empty() && elems.front() == 0) elems.erase(elems.begin());
    auto n = std::make_shared<Node>();
    n->kind = Kind::Finite;
    n->elems = std::move(elems);
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::arith_prog(std::uint64_t a, std::uint64_t d) {
    if (d == 0) throw Error("arith_prog: d must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Kind::ArithProg;
    n->a = a;
    n->d = d;
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::dyadic_valuation(unsigned v) {
    if (v > 62) throw Error("dyadic_valuation: v must be <= 62");
    auto n = std::make_shared<Node>();
    n->kind = Kind::DyadicValuation;
    n->v = v;
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::block_union(PartitionFilter f, SetDescriptor indices) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::BlockUnion;
    n->filter = std::move(f);
    n->opaque = indices.opaque();
    n->kids.push_back(std::move(indices));
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::complement(SetDescriptor s) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Complement;
    n->opaque = s.opaque();
    n->kids.push_back(std::move(s));
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::set_union(SetDescriptor a, SetDescriptor b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Union;
    n->opaque = a.opaque() || b.opaque();
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::set_intersection(SetDescriptor a, SetDescriptor b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Intersection;
    n->opaque = a.opaque() || b.opaque();
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::least_in_blocks(PartitionFilter f, SetDescriptor j) {
    if (f.family() == PartitionFilter::Family::Singletons) return j; // one point per {k} is j itself
    auto n = std::make_shared<Node>();
    n->kind = Kind::LeastInBlocks;
    n->filter = std::move(f);
    n->opaque = j.opaque();
    n->kids.push_back(std::move(j));
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::predicate(std::string name, std::function<bool(std::uint64_t)> fn) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Predicate;
    n->pname = std::move(name);
    n->pfn = std::move(fn);
    n->opaque = true;
    return SetDescriptor(std::move(n));
}

SetDescriptor SetDescriptor::predicate_named(const std::string& name) {
    if (name == "primes") {
        return predicate("primes", [](std::uint64_t n) {
            if (n < 2) return false;
            for (std::uint64_t p = 2; p * p <= n; ++p)
                if (n % p == 0) return false;
            return true;
        });
    }
    if (name == "squares") {
        return predicate("squares", [](std::uint64_t n) {
            std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
            for (std::uint64_t x = r > 1 ? r - 1 : 0; x <= r + 1; ++x)
                if (x * x == n) return true;
            return false;
        });
    }
    throw ParseError("unknown predicate '" + name + "'", 0);
}

SetDescriptor SetDescriptor::naturals() { return complement(finite({})); }
SetDescriptor SetDescriptor::empty() { return finite({}); }

SetDescriptor::Kind SetDescriptor::kind() const { return node_->kind; }

bool SetDescriptor::contains(std::uint64_t n) const {
    if (n == 0) return false;
    switch (node_->kind) {
        case Kind::Finite:
            return std::binary_search(node_->elems.begin(), node_->elems.end(), n);
        case Kind::ArithProg:
            return n >= node_->a && (n - node_->a) % node_->d == 0;
        case Kind::DyadicValuation:
            return dyadic_valuation_of(n) == node_->v;
        case Kind::BlockUnion:
            return node_->kids[0].contains(node_->filter->block_of(n));
        case Kind::Complement:
            return !node_->kids[0].contains(n);
        case Kind::Union:
            return node_->kids[0].contains(n) || node_->kids[1].contains(n);
        case Kind::Intersection:
            return node_->kids[0].contains(n) && node_->kids[1].contains(n);
        case Kind::LeastInBlocks: {
            std::uint64_t k = node_->filter->block_of(n);
            auto least = least_element_in_block(*node_->filter, k, node_->kids[0]);
            return least && *least == n;
        }
        case Kind::Predicate:
            return node_->pfn(n);
    }
    throw Error("unreachable descriptor kind");
}

bool SetDescriptor::opaque() const {
    return node_->kind == Kind::Predicate || node_->opaque;
}

const std::vector<std::uint64_t>& SetDescriptor::finite_elements() const { return node_->elems; }
std::uint64_t SetDescriptor::ap_a() const { return node_->a; }
std::uint64_t SetDescriptor::ap_d() const { return node_->d; }
unsigned SetDescriptor::dv_v() const { return node_->v; }
const PartitionFilter& SetDescriptor::node_filter() const { return *node_->filter; }
const SetDescriptor& SetDescriptor::child() const { return node_->kids[0]; }
const SetDescriptor& SetDescriptor::left() const { return node_->kids[0]; }
const SetDescriptor& SetDescriptor::right() const { return node_->kids[1]; }
const std::string& SetDescriptor::predicate_name() const { return node_->pname; }

std::string SetDescriptor::str() const {
    switch (node_->kind) {
        case Kind::Finite: {
            std::string out = "(finite";
            for (std::uint64_t x : node_->elems) out += " " + std::to_string(x);
            out += ")";
            return out;
        }
        case Kind::ArithProg:
            return "(arith-prog " + std::to_string(node_->a) + " " + std::to_string(node_->d) +
                   ")";
        case Kind::DyadicValuation:
            return "(dyadic-valuation " + std::to_string(node_->v) + ")";
        case Kind::BlockUnion:
            return "(block-union " + node_->filter->str() + " " + node_->kids[0].str() + ")";
        case Kind::Complement:
            return "(complement " + node_->kids[0].str() + ")";
        case Kind::Union:
            return "(union " + node_->kids[0].str() + " " + node_->kids[1].str() + ")";
        case Kind::Intersection:
            return "(intersection " + node_->kids[0].str() + " " + node_->kids[1].str() + ")";
        case Kind::LeastInBlocks:
            return "(least-in-blocks " + node_->filter->str() + " " + node_->kids[0].str() + ")";
        case Kind::Predicate:
            return "(predicate " + node_->pname + ")";
    }
    throw Error("unreachable descriptor kind");
}

SetDescriptor SetDescriptor::from_sexpr(const SExpr& e) {
    const std::string h = e.head();
    if (h == "finite") {
        std::vector<std::uint64_t> xs;
        for (std::size_t i = 1; i < e.size(); ++i) xs.push_back(sexpr_u64(e[i]));
        return finite(std::move(xs));
    }
    if (h == "arith-prog") return arith_prog(sexpr_u64(e[1]), sexpr_u64(e[2]));
    if (h == "dyadic-valuation") return dyadic_valuation(static_cast<unsigned>(sexpr_u64(e[1])));
    if (h == "block-union")
        return block_union(PartitionFilter::from_sexpr(e[1]), from_sexpr(e[2]));
    if (h == "complement") return complement(from_sexpr(e[1]));
    if (h == "union") return set_union(from_sexpr(e[1]), from_sexpr(e[2]));
    if (h == "intersection") return set_intersection(from_sexpr(e[1]), from_sexpr(e[2]));
    if (h == "least-in-blocks")
        return least_in_blocks(PartitionFilter::from_sexpr(e[1]), from_sexpr(e[2]));
    if (h == "predicate") return predicate_named(e[1].atom_value());
    throw ParseError("unknown set descriptor form " + e.str(), 0);
}

// ---------------------------------------------------------------------------
// to_periodic
// ---------------------------------------------------------------------------

std::optional<PeriodicSet> to_periodic(const SetDescriptor& s) {
    using Kind = SetDescriptor::Kind;
    switch (s.kind()) {
        case Kind::Finite:
            return PeriodicSet::finite(s.finite_elements());
        case Kind::ArithProg:
            return PeriodicSet::arith_prog(s.ap_a(), s.ap_d());
        case Kind::DyadicValuation: {
            unsigned v = s.dv_v();
            if ((std::uint64_t(1) << (v + 1)) > PeriodicSet::kPeriodCap) return std::nullopt;
            return PeriodicSet::arith_prog(std::uint64_t(1) << v, std::uint64_t(1) << (v + 1));
        }
        case Kind::BlockUnion: {
            auto idx = to_periodic(s.child());
            if (!idx) return std::nullopt;
            const PartitionFilter& f = s.node_filter();
            switch (f.family()) {
                case PartitionFilter::Family::Singletons:
                    return idx;
                case PartitionFilter::Family::Ranges: {
                    if (!idx->is_finite()) return std::nullopt;
                    std::vector<std::uint64_t> elems;
                    for (std::uint64_t k : idx->prefix) {
                        std::uint64_t st = f.range_start(k);
                        std::uint64_t len = f.range_len(k);
                        if (elems.size() + len > PeriodicSet::kEnumCap) return std::nullopt;
                        for (std::uint64_t n = st; n < st + len; ++n) elems.push_back(n);
                    }
                    return PeriodicSet::finite(std::move(elems));
                }
                case PartitionFilter::Family::DyadicValuationBlocks: {
                    if (!idx->is_finite()) return std::nullopt;
                    PeriodicSet acc = PeriodicSet::empty_set();
                    for (std::uint64_t k : idx->prefix) {
                        unsigned v = static_cast<unsigned>(k - 1);
                        if (v > 62 || (std::uint64_t(1) << (v + 1)) > PeriodicSet::kPeriodCap)
                            return std::nullopt;
                        auto blk = PeriodicSet::arith_prog(std::uint64_t(1) << v,
                                                           std::uint64_t(1) << (v + 1));
                        auto u = PeriodicSet::unite(acc, blk);
                        if (!u) return std::nullopt;
                        acc = std::move(*u);
                    }
                    return acc;
                }
                case PartitionFilter::Family::TableWithTailRule: {
                    std::uint64_t n0 = f.table_prefix();
                    std::vector<std::uint64_t> head;
                    for (std::uint64_t n = 1; n <= n0; ++n)
                        if (idx->member(f.block_of(n))) head.push_back(n);
                    // tail blocks are singletons {k} for k > n0
                    auto tail_part = PeriodicSet::intersect(*idx, PeriodicSet::tail_from(n0 + 1));
                    if (!tail_part) return std::nullopt;
                    return PeriodicSet::unite(PeriodicSet::finite(std::move(head)), *tail_part);
                }
            }
            return std::nullopt;
        }
        case Kind::Complement: {
            auto c = to_periodic(s.child());
            if (!c) return std::nullopt;
            try {
                return c->complemented();
            } catch (const Error&) {
                return std::nullopt;
            }
        }
        case Kind::Union: {
            auto a = to_periodic(s.left());
            if (!a) return std::nullopt;
            auto b = to_periodic(s.right());
            if (!b) return std::nullopt;
            return PeriodicSet::unite(*a, *b);
        }
        case Kind::Intersection: {
            auto a = to_periodic(s.left());
            if (!a) return std::nullopt;
            auto b = to_periodic(s.right());
            if (!b) return std::nullopt;
            return PeriodicSet::intersect(*a, *b);
        }
        case Kind::LeastInBlocks:
        case Kind::Predicate:
            return std::nullopt;
    }
    return std::nullopt;
}

SetDescriptor descriptor_of(const PeriodicSet& ep) {
    SetDescriptor acc = SetDescriptor::finite(ep.prefix);
    for (std::uint64_t r = 0; r < ep.period; ++r) {
        if (!ep.residues[static_cast<std::size_t>(r)]) continue;
        // first member >= threshold congruent to r
        std::uint64_t rem = ep.threshold % ep.period;
        std::uint64_t first =
            ep.threshold + (r >= rem ? r - rem : ep.period - rem + r);
        acc = SetDescriptor::set_union(acc, SetDescriptor::arith_prog(first, ep.period));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// least_element_in_block
// ---------------------------------------------------------------------------

namespace {

// extended gcd: g = gcd(a,b), a*x + b*y = g
BigInt egcd(const BigInt& a, const BigInt& b, BigInt& x, BigInt& y) {
    if (b == 0) {
        x = 1;
        y = 0;
        return a;
    }
    BigInt x1, y1;
    BigInt g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// least n >= lo with n ≡ r1 (mod m1) and n ≡ r2 (mod m2); nullopt if no solution
std::optional<std::uint64_t> crt_least_geq(std::uint64_t r1, std::uint64_t m1, std::uint64_t r2,
                                           std::uint64_t m2, std::uint64_t lo) {
    BigInt M1(m1), M2(m2), R1(r1), R2(r2);
    BigInt x, y;
    BigInt g = egcd(M1, M2, x, y);
    if ((R2 - R1) % g != 0) return std::nullopt;
    BigInt L = M1 / g * M2;
    BigInt n0 = R1 + M1 * ((R2 - R1) / g % (M2 / g)) * x % L;
    n0 %= L;
    if (n0 < 0) n0 += L;
    BigInt lo_b(lo);
    BigInt n = n0;
    if (n < lo_b) n += ((lo_b - n + L - 1) / L) * L;
    if (n > BigInt(UINT64_MAX)) return std::nullopt;
    return static_cast<std::uint64_t>(n);
}

} // namespace

std::optional<std::uint64_t> least_element_in_block(const PartitionFilter& f, std::uint64_t k,
                                                    const SetDescriptor& s, std::uint64_t budget) {
    switch (f.family()) {
        case PartitionFilter::Family::Singletons:
            return s.contains(k) ? std::optional<std::uint64_t>(k) : std::nullopt;
        case PartitionFilter::Family::Ranges: {
            std::uint64_t st = f.range_start(k);
            std::uint64_t len = f.range_len(k);
            std::uint64_t end = st + std::min(len, budget);
            for (std::uint64_t n = st; n < end; ++n)
                if (s.contains(n)) return n;
            return std::nullopt;
        }
        case PartitionFilter::Family::TableWithTailRule: {
            std::uint64_t n0 = f.table_prefix();
            for (std::uint64_t n = 1; n <= n0; ++n)
                if (f.block_of(n) == k && s.contains(n)) return n;
            if (k > n0 && s.contains(k)) return k;
            return std::nullopt;
        }
        case PartitionFilter::Family::DyadicValuationBlocks: {
            if (k > 64) return std::nullopt; // beyond representable elements
            if (k == 64) {
                // only 2^63 is representable in that block
                std::uint64_t n = std::uint64_t(1) << 63;
                return s.contains(n) ? std::optional<std::uint64_t>(n) : std::nullopt;
            }
            unsigned v = static_cast<unsigned>(k - 1);
            std::uint64_t base = std::uint64_t(1) << v; // 2^v
            std::uint64_t mod = base << 1;              // 2^(v+1), v <= 62 here
            if (auto ep = to_periodic(s)) {
                std::optional<std::uint64_t> best;
                for (std::uint64_t x : ep->prefix)
                    if (dyadic_valuation_of(x) == v && (!best || x < *best)) best = x;
                for (std::uint64_t r = 0; r < ep->period; ++r) {
                    if (!ep->residues[static_cast<std::size_t>(r)]) continue;
                    auto n = crt_least_geq(r, ep->period, base, mod, ep->threshold);
                    if (n && (!best || *n < *best)) best = n;
                }
                return best;
            }
            for (std::uint64_t j = 0; j <= budget; ++j) {
                std::uint64_t odd = 2 * j + 1;
                if (odd > (UINT64_MAX >> v)) break;
                std::uint64_t n = base * odd;
                if (s.contains(n)) return n;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// DyadicSet
// ---------------------------------------------------------------------------

namespace {

void check_dyadic_interval(const DyadicInterval& iv) {
    if (!(iv.lo >= 0 && iv.lo < iv.hi && iv.hi <= 1))
        throw Error("dyadic interval must satisfy 0 <= lo < hi <= 1");
    if (!is_dyadic(iv.lo) || !is_dyadic(iv.hi))
        throw Error("interval endpoints must be dyadic rationals");
}

} // namespace

DyadicSet DyadicSet::empty_set() { return DyadicSet(); }

DyadicSet DyadicSet::full() {
    return of({DyadicInterval{Rational(0), Rational(1)}});
}

DyadicSet DyadicSet::of(std::vector<DyadicInterval> ivs) {
    for (const auto& iv : ivs) check_dyadic_interval(iv);
    std::sort(ivs.begin(), ivs.end(),
              [](const DyadicInterval& x, const DyadicInterval& y) { return x.lo < y.lo; });
    DyadicSet out;
    for (auto& iv : ivs) {
        if (!out.iv_.empty() && iv.lo <= out.iv_.back().hi) {
            if (iv.hi > out.iv_.back().hi) out.iv_.back().hi = iv.hi;
        } else {
            out.iv_.push_back(iv);
        }
    }
    return out;
}

Rational DyadicSet::length() const {
    Rational total(0);
    for (const auto& iv : iv_) total += iv.hi - iv.lo;
    return total;
}

DyadicSet DyadicSet::complemented() const {
    std::vector<DyadicInterval> out;
    Rational cursor(0);
    for (const auto& iv : iv_) {
        if (cursor < iv.lo) out.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < 1) out.push_back({cursor, Rational(1)});
    return of(std::move(out));
}

DyadicSet DyadicSet::unite(const DyadicSet& a, const DyadicSet& b) {
    std::vector<DyadicInterval> all = a.iv_;
    all.insert(all.end(), b.iv_.begin(), b.iv_.end());
    return of(std::move(all));
}

DyadicSet DyadicSet::intersect(const DyadicSet& a, const DyadicSet& b) {
    std::vector<DyadicInterval> out;
    for (const auto& x : a.iv_)
        for (const auto& y : b.iv_) {
            Rational lo = x.lo > y.lo ? x.lo : y.lo;
            Rational hi = x.hi < y.hi ? x.hi : y.hi;
            if (lo < hi) out.push_back({lo, hi});
        }
    return of(std::move(out));
}

Rational DyadicSet::overlap_length(const DyadicInterval& piece) const {
    Rational total(0);
    for (const auto& iv : iv_) {
        Rational lo = iv.lo > piece.lo ? iv.lo : piece.lo;
        Rational hi = iv.hi < piece.hi ? iv.hi : piece.hi;
        if (lo < hi) total += hi - lo;
    }
    return total;
}

std::string DyadicSet::str() const {
    std::string out = "(dset";
    for (const auto& iv : iv_)
        out += " (" + rational_str(iv.lo) + " " + rational_str(iv.hi) + ")";
    out += ")";
    return out;
}

DyadicSet DyadicSet::from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("dset");
    std::vector<DyadicInterval> ivs;
    for (const auto& a : args)
        ivs.push_back({parse_rational(a[0].atom_value()), parse_rational(a[1].atom_value())});
    return of(std::move(ivs));
}

bool operator==(const DyadicSet& a, const DyadicSet& b) {
    if (a.iv_.size() != b.iv_.size()) return false;
    for (std::size_t i = 0; i < a.iv_.size(); ++i)
        if (a.iv_[i].lo != b.iv_[i].lo || a.iv_[i].hi != b.iv_[i].hi) return false;
    return true;
}

std::string MeasurableSet::str() const {
    return "(mset " + atoms.str() + " " + diffuse.str() + ")";
}

MeasurableSet MeasurableSet::from_sexpr(const SExpr& e) {
    auto args = e.expect_tagged("mset");
    if (args.size() != 2) throw ParseError("(mset atoms dset) expected", 0);
    return {SetDescriptor::from_sexpr(args[0]), DyadicSet::from_sexpr(args[1])};
}

} // namespace lmeas
