#pragma once

#include "lmeas/measures.hpp"

namespace lmeas {

/// A decomposition with machine-checkable certificates. The parts re-sum to
/// the original exactly on every measured set; the certificates, not the
/// construction, carry the correctness burden.
struct Decomposition {
    enum class Kind { Lebesgue, SobczykHammer, YosidaHewett };
    Kind kind;
    Charge part_a; // m^< / m^s / sigma-additive part
    Charge part_b; // m^⊥ / m^a / purely finitely additive part
    std::optional<MeasurableSet> witness_set;
    std::vector<std::pair<std::string, Verdict>> certificates;

    bool all_certified() const {
        for (const auto& [name, v] : certificates)
            if (v.outcome != Outcome::Holds) return false;
        return true;
    }
};

/// partA = m restricted to E (absolutely continuous w.r.t. nu), partB = the
/// rest (singular); E = nu's support. A charge-at-infinity follows nu's own
/// charge: with a live nu-charge on the same filter it is absolutely
/// continuous, otherwise it is singular.
Decomposition lebesgue_decompose(const Charge& m, const Charge& nu, std::uint64_t depth);

/// partA = diffuse (continuous) part with its dyadic-partition certificate,
/// partB = atoms + charge with atomicity evidence.
Decomposition sobczyk_hammer_decompose(const Charge& m, std::uint64_t depth);

/// partB = the charge-at-infinity (purely finitely additive), partA = the
/// countably additive remainder; m_0 vanishes on every singleton.
Decomposition yosida_hewett_decompose(const Charge& m, std::uint64_t depth);

} // namespace lmeas
