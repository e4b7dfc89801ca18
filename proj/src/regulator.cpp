#include "lmeas/regulator.hpp"

#include <limits>

namespace lmeas {

struct Regulator::Node {
    Kind kind;
    int dim;
    // Harmonic/Geometric payload
    std::optional<LatticeElement> coeff;
    Rational rho; // Geometric
    // Scaled payload
    Rational scale;
    // Shifted payload
    std::uint64_t offset = 0;
    // children
    std::shared_ptr<const Node> left, right;
    // Tail payload: precomputed geometric terms of Σ_{j>=n} base(j)
    std::vector<GeomTerm> tail_terms;
};

Regulator Regulator::harmonic(LatticeElement c) {
    if (!c.is_nonneg()) throw Error("harmonic regulator needs c >= 0");
    auto n = std::make_shared<Regulator::Node>();
    n->kind = Kind::Harmonic;
    n->dim = c.dim();
    n->coeff = std::move(c);
    return Regulator(std::move(n));
}

Regulator Regulator::geometric(LatticeElement c, Rational rho) {
    if (!c.is_nonneg()) throw Error("geometric regulator needs c >= 0");
    if (!(rho > 0 && rho < 1)) throw Error("geometric regulator needs 0 < rho < 1");
    auto n = std::make_shared<Regulator::Node>();
    n->kind = Kind::Geometric;
    n->dim = c.dim();
    n->coeff = std::move(c);
    n->rho = std::move(rho);
    return Regulator(std::move(n));
}

Regulator Regulator::zero(int dim) {
    return geometric(LatticeElement::zero(dim), Rational(1, 2));
}

Regulator Regulator::scaled(Regulator base, Rational k) {
    if (!(k > 0)) throw Error("scaled regulator needs k > 0");
    auto n = std::make_shared<Regulator::Node>();
    n->kind = Kind::Scaled;
    n->dim = base.dim();
    n->scale = std::move(k);
    n->left = base.node_;
    return Regulator(std::move(n));
}

Regulator Regulator::sum(Regulator a, Regulator b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("regulator sum: dim mismatch");
    auto n = std::make_shared<Regulator::Node>();
    n->kind = Kind::Sum;
    n->dim = a.dim();
    n->left = a.node_;
    n->right = b.node_;
    return Regulator(std::move(n));
}

Regulator Regulator::shifted(Regulator base, std::uint64_t offset) {
    auto n = std::make_shared<Regulator::Node>();
    n->kind = Kind::Shifted;
    n->dim = base.dim();
    n->offset = offset;
    n->left = base.node_;
    return Regulator(std::move(n));
}

Regulator Regulator::tail(Regulator base) {
    auto terms = base.as_geometric_terms();
    if (!terms)
        throw NoClosedFormTailError("tail regulator: base has no geometric closed form");
    std::vector<GeomTerm> tail_terms;
    tail_terms.reserve(terms->size());
    for (const auto& t : *terms) {
        // Σ_{j>=n} c·rho^j = c/(1-rho) · rho^n
        Rational f = Rational(1) / (Rational(1) - t.rho);
        tail_terms.push_back({f * t.coeff, t.rho});
    }
    auto n = std::make_shared<Regulator::Node>();
    n->kind = Kind::Tail;
    n->dim = base.dim();
    n->left = base.node_;
    n->tail_terms = std::move(tail_terms);
    return Regulator(std::move(n));
}

Regulator::Kind Regulator::kind() const { return node_->kind; }
int Regulator::dim() const { return node_->dim; }

namespace {

LatticeElement eval_terms(const std::vector<Regulator::GeomTerm>& terms, int dim,
                          std::uint64_t k) {
    LatticeElement acc = LatticeElement::zero(dim);
    for (const auto& t : terms) acc = acc + rational_pow(t.rho, k) * t.coeff;
    return acc;
}

} // namespace

LatticeElement Regulator::eval_node(const Regulator::Node& n, std::uint64_t k) {
    switch (n.kind) {
        case Regulator::Kind::Harmonic:
            return Rational(BigInt(1), BigInt(k)) * (*n.coeff);
        case Regulator::Kind::Geometric:
            return rational_pow(n.rho, k) * (*n.coeff);
        case Regulator::Kind::Scaled:
            return n.scale * eval_node(*n.left, k);
        case Regulator::Kind::Sum:
            return eval_node(*n.left, k) + eval_node(*n.right, k);
        case Regulator::Kind::Shifted:
            return eval_node(*n.left, k + n.offset);
        case Regulator::Kind::Tail:
            return eval_terms(n.tail_terms, n.dim, k);
    }
    throw Error("unreachable regulator kind");
}

bool Regulator::comp_zero(const Regulator::Node& n, int i) {
    switch (n.kind) {
        case Regulator::Kind::Harmonic:
        case Regulator::Kind::Geometric:
            return (*n.coeff)[i] == 0;
        case Regulator::Kind::Scaled:
        case Regulator::Kind::Shifted:
        case Regulator::Kind::Tail:
            return comp_zero(*n.left, i);
        case Regulator::Kind::Sum:
            return comp_zero(*n.left, i) && comp_zero(*n.right, i);
    }
    throw Error("unreachable regulator kind");
}

LatticeElement Regulator::eval(std::uint64_t n) const {
    if (n == 0) throw Error("regulator index starts at 1");
    return eval_node(*node_, n);
}

bool Regulator::component_identically_zero(int i) const { return comp_zero(*node_, i); }

bool Regulator::identically_zero() const {
    for (int i = 0; i < dim(); ++i)
        if (!component_identically_zero(i)) return false;
    return true;
}

std::optional<std::uint64_t> Regulator::first_index_leq(const LatticeElement& target,
                                                        std::uint64_t from) const {
    if (target.dim() != dim()) throw DimensionMismatchError("first_index_leq: dim mismatch");
    if (from == 0) from = 1;
    for (int i = 0; i < dim(); ++i) {
        if (target[i] < 0) return std::nullopt;
        if (target[i] == 0 && !component_identically_zero(i)) return std::nullopt;
    }
    if (leq(eval(from), target)) return from;
    constexpr std::uint64_t cap = std::uint64_t(1) << 61;
    std::uint64_t lo = from, hi = from;
    while (true) {
        std::uint64_t next = hi > cap / 2 ? cap : hi * 2;
        if (leq(eval(next), target)) {
            lo = hi;
            hi = next;
            break;
        }
        if (next == cap) throw Error("first_index_leq: search exceeded cap");
        lo = next;
        hi = next;
    }
    // invariant: eval(lo) not <= target, eval(hi) <= target
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (leq(eval(mid), target))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::optional<std::vector<Regulator::GeomTerm>> Regulator::as_geometric_terms() const {
    switch (node_->kind) {
        case Kind::Harmonic:
            return std::nullopt;
        case Kind::Geometric:
            return std::vector<GeomTerm>{{*node_->coeff, node_->rho}};
        case Kind::Scaled: {
            auto base = Regulator(node_->left).as_geometric_terms();
            if (!base) return std::nullopt;
            for (auto& t : *base) t.coeff = node_->scale * t.coeff;
            return base;
        }
        case Kind::Sum: {
            auto a = Regulator(node_->left).as_geometric_terms();
            auto b = Regulator(node_->right).as_geometric_terms();
            if (!a || !b) return std::nullopt;
            a->insert(a->end(), b->begin(), b->end());
            return a;
        }
        case Kind::Shifted: {
            auto base = Regulator(node_->left).as_geometric_terms();
            if (!base) return std::nullopt;
            for (auto& t : *base) t.coeff = rational_pow(t.rho, node_->offset) * t.coeff;
            return base;
        }
        case Kind::Tail:
            return node_->tail_terms;
    }
    return std::nullopt;
}

Regulator regulator_from_sexpr(const SExpr& e) {
    const std::string h = e.head();
    if (h == "harmonic") return Regulator::harmonic(lattice_from_sexpr(e[1]));
    if (h == "geometric")
        return Regulator::geometric(lattice_from_sexpr(e[1]),
                                    parse_rational(e[2].atom_value()));
    if (h == "scaled")
        return Regulator::scaled(regulator_from_sexpr(e[1]), parse_rational(e[2].atom_value()));
    if (h == "sum") return Regulator::sum(regulator_from_sexpr(e[1]), regulator_from_sexpr(e[2]));
    if (h == "shifted") return Regulator::shifted(regulator_from_sexpr(e[1]), sexpr_u64(e[2]));
    if (h == "tail") return Regulator::tail(regulator_from_sexpr(e[1]));
    throw ParseError("unknown regulator form " + e.str(), 0);
}

std::string Regulator::str() const {
    switch (node_->kind) {
        case Kind::Harmonic:
            return "(harmonic " + node_->coeff->str() + ")";
        case Kind::Geometric:
            return "(geometric " + node_->coeff->str() + " " + rational_str(node_->rho) + ")";
        case Kind::Scaled:
            return "(scaled " + Regulator(node_->left).str() + " " + rational_str(node_->scale) +
                   ")";
        case Kind::Sum:
            return "(sum " + Regulator(node_->left).str() + " " + Regulator(node_->right).str() +
                   ")";
        case Kind::Shifted:
            return "(shifted " + Regulator(node_->left).str() + " " +
                   std::to_string(node_->offset) + ")";
        case Kind::Tail:
            return "(tail " + Regulator(node_->left).str() + ")";
    }
    return "?";
}

} // namespace lmeas
