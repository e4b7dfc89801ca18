#include "lmeas/sexpr.hpp"

#include <cctype>

namespace lmeas {

SExpr SExpr::atom(std::string a) {
    SExpr e;
    e.is_atom_ = true;
    e.atom_ = std::move(a);
    return e;
}

SExpr SExpr::list(std::vector<SExpr> items) {
    SExpr e;
    e.is_atom_ = false;
    e.items_ = std::move(items);
    return e;
}

const std::string& SExpr::atom_value() const {
    if (!is_atom_) throw ParseError("expected atom, got list " + str(), 0);
    return atom_;
}

const std::vector<SExpr>& SExpr::items() const {
    if (is_atom_) throw ParseError("expected list, got atom '" + atom_ + "'", 0);
    return items_;
}

const SExpr& SExpr::operator[](std::size_t i) const {
    const auto& v = items();
    if (i >= v.size()) throw ParseError("list " + str() + " too short", 0);
    return v[i];
}

std::vector<SExpr> SExpr::expect_tagged(std::string_view tag) const {
    const auto& v = items();
    if (v.empty() || !v[0].is_atom() || v[0].atom_value() != tag)
        throw ParseError("expected (" + std::string(tag) + " ...), got " + str(), 0);
    return std::vector<SExpr>(v.begin() + 1, v.end());
}

std::string SExpr::head() const {
    if (is_atom_ || items_.empty() || !items_[0].is_atom_) return "";
    return items_[0].atom_;
}

std::string SExpr::str() const {
    if (is_atom_) return atom_;
    std::string out = "(";
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ' ';
        out += items_[i].str();
    }
    out += ')';
    return out;
}

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') { // comment to end of line
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_ws();
        return pos >= text.size();
    }

    SExpr parse_one() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
        char c = text[pos];
        if (c == '(') {
            ++pos;
            std::vector<SExpr> items;
            while (true) {
                skip_ws();
                if (pos >= text.size()) throw ParseError("unterminated list", pos);
                if (text[pos] == ')') {
                    ++pos;
                    return SExpr::list(std::move(items));
                }
                items.push_back(parse_one());
            }
        }
        if (c == ')') throw ParseError("unexpected ')'", pos);
        std::size_t start = pos;
        while (pos < text.size()) {
            char t = text[pos];
            if (t == '(' || t == ')' || t == ';' || std::isspace(static_cast<unsigned char>(t)))
                break;
            ++pos;
        }
        return SExpr::atom(std::string(text.substr(start, pos - start)));
    }
};

} // namespace

SExpr parse_sexpr(std::string_view text) {
    Cursor c{text};
    SExpr e = c.parse_one();
    if (!c.done()) throw ParseError("trailing input after s-expression", c.pos);
    return e;
}

std::vector<SExpr> parse_sexpr_all(std::string_view text) {
    Cursor c{text};
    std::vector<SExpr> out;
    while (!c.done()) out.push_back(c.parse_one());
    return out;
}

std::uint64_t sexpr_u64(const SExpr& e) {
    const std::string& a = e.atom_value();
    if (a.empty()) throw ParseError("empty integer", 0);
    std::uint64_t v = 0;
    for (char ch : a) {
        if (ch < '0' || ch > '9') throw ParseError("bad integer '" + a + "'", 0);
        if (v > (UINT64_MAX - static_cast<std::uint64_t>(ch - '0')) / 10)
            throw ParseError("integer overflow '" + a + "'", 0);
        v = v * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return v;
}

} // namespace lmeas
