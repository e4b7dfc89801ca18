#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lmeas {

enum class Outcome { Holds, Fails, Unknown };

const char* outcome_str(Outcome o);

/// Structured evidence attached to a Holds/Fails verdict. `indices` carry
/// whatever index data the operation documents (n, k, block indices, ...);
/// `text` carries a canonical serialization of a descriptor or element when
/// one is part of the evidence.
struct Witness {
    std::string kind;
    std::vector<std::uint64_t> indices;
    std::string text;
};

/// Three-valued, depth-stamped result of a truncated check. Counterexamples
/// never retract: Fails at depth N stays Fails at every larger depth.
struct Verdict {
    Outcome outcome = Outcome::Unknown;
    std::uint64_t depth = 0;
    std::optional<Witness> witness;

    static Verdict holds(std::uint64_t depth) { return {Outcome::Holds, depth, std::nullopt}; }
    static Verdict holds(std::uint64_t depth, Witness w) {
        return {Outcome::Holds, depth, std::move(w)};
    }
    static Verdict fails(std::uint64_t depth, Witness w) {
        return {Outcome::Fails, depth, std::move(w)};
    }
    static Verdict unknown(std::uint64_t depth) { return {Outcome::Unknown, depth, std::nullopt}; }

    bool holds_() const { return outcome == Outcome::Holds; }
    bool fails_() const { return outcome == Outcome::Fails; }

    std::string str() const;
};

} // namespace lmeas
