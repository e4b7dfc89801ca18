#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lmeas/errors.hpp"

namespace lmeas {

/// Minimal s-expression: atom or list. The canonical print is single-spaced
/// with no trailing whitespace; parse(print(x)) reproduces x.
class SExpr {
public:
    static SExpr atom(std::string a);
    static SExpr list(std::vector<SExpr> items);

    bool is_atom() const { return is_atom_; }
    const std::string& atom_value() const;
    const std::vector<SExpr>& items() const;
    std::size_t size() const { return items_.size(); }
    const SExpr& operator[](std::size_t i) const;

    /// First item must be the given symbol; returns args after it.
    /// Throws ParseError otherwise.
    std::vector<SExpr> expect_tagged(std::string_view tag) const;
    /// Head symbol of a nonempty list ("" for atoms/empty).
    std::string head() const;

    std::string str() const;

private:
    bool is_atom_ = false;
    std::string atom_;
    std::vector<SExpr> items_;
};

/// Parses exactly one s-expression; trailing garbage is an error.
SExpr parse_sexpr(std::string_view text);

/// Parses a sequence of s-expressions (e.g. a scenario file with several
/// top-level forms).
std::vector<SExpr> parse_sexpr_all(std::string_view text);

std::uint64_t sexpr_u64(const SExpr& e);

} // namespace lmeas
