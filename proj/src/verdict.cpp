#include "lmeas/verdict.hpp"

namespace lmeas {

const char* outcome_str(Outcome o) {
    switch (o) {
        case Outcome::Holds: return "Holds";
        case Outcome::Fails: return "Fails";
        case Outcome::Unknown: return "Unknown";
    }
    return "?";
}

std::string Verdict::str() const {
    std::string out = outcome_str(outcome);
    out += " @depth ";
    out += std::to_string(depth);
    if (witness) {
        out += " [" + witness->kind;
        for (auto i : witness->indices) out += " " + std::to_string(i);
        if (!witness->text.empty()) out += " " + witness->text;
        out += "]";
    }
    return out;
}

} // namespace lmeas
