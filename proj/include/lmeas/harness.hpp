#pragma once

#include <map>

#include "lmeas/regulators.hpp"

namespace lmeas {

/// A frozen end-to-end verification scenario. The seed fully determines any
/// generated randomness; two runs of the same scenario are byte-identical.
struct Scenario {
    std::string name;
    std::string theorem_id; // teokyber | main | finale | nuovoschur | schur | gap-search
    PartitionFilter filter = PartitionFilter::singletons();
    ChargeFamily family = ChargeFamily::constant(Charge::countable({}, {}, 1));
    std::optional<Charge> limit;
    std::optional<Charge> nu;
    std::map<std::string, Regulator> regulators; // b, a, q, r, ...
    std::vector<SetDescriptor> sample_sets;
    SetFamily disjoint_family = SetFamily::singletons();
    std::vector<SetDescriptor> ideal_sample;
    std::optional<LatticeElement> bound_u;
    std::uint64_t depth = 16;
    std::uint64_t seed = 1;

    const Regulator& regulator(const std::string& name) const;
    std::string str() const;
    static Scenario from_sexpr(const SExpr& e);
    static Scenario parse(std::string_view text);
};

struct TheoremReport {
    std::string scenario;
    std::string theorem_id;
    std::vector<std::pair<std::string, Verdict>> hypothesis_audit;
    Verdict conclusion = Verdict::unknown(0);
    std::optional<Regulator> derived_regulator;
    std::vector<std::string> decomposition_traces;
    std::vector<std::string> notes;
    bool violation_flag = false;

    /// violation_flag is true only when every hypothesis Holds and the
    /// conclusion Fails.
    void finalize();
};

TheoremReport verify_teokyber(const Scenario& s);
TheoremReport verify_main(const Scenario& s);

enum class CorollaryMode { Finale, Nuovoschur };
TheoremReport verify_corollaries(const Scenario& s, CorollaryMode mode);

/// Dispatch on theorem_id (including the gap-search scenario kind).
TheoremReport run_scenario(const Scenario& s);

struct FamilyGrammar {
    PartitionFilter filter;
    std::vector<ChargeFamily> candidates;
    std::vector<SetDescriptor> samples;
    Regulator b;
    SetFamily h;
    std::uint64_t depth;
};

enum class SearchProperty { UniformSBoundedness, TriviallyTrue };

struct GapWitness {
    std::size_t candidate_index;
    std::string family_text;
    Verdict convergence; // filter convergence holds
    Verdict uniform;     // uniform s-boundedness fails
};

/// Deterministic enumeration over the grammar; returns the first family that
/// is (o_F)-convergent on the samples yet violates the property.
std::optional<GapWitness> counterexample_search(const FamilyGrammar& g, SearchProperty prop,
                                                std::uint64_t budget);

const std::vector<Scenario>& builtin_scenarios();

} // namespace lmeas
