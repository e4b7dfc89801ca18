#pragma once

#include "lmeas/families.hpp"

namespace lmeas {

/// p_j = 2(a_j + 2 b_j).
Regulator schur_regulator(const Regulator& a, const Regulator& b);

/// r_j = 2(q_j + 2 b_j) + q_j.
Regulator finale_regulator(const Regulator& q, const Regulator& b);

/// Least increasing w with q(w(j)) <= u·2^-j componentwise, j = 1..count.
/// Throws NoSuchMapError when a strictly positive component of q meets a zero
/// component of u.
std::vector<std::uint64_t> find_w(const Regulator& q, const LatticeElement& u,
                                  std::uint64_t count);

/// r_p = 2(b_p + B_p + Q_p), with Q_N = B_N = u ∧ u·2^(1-N) the geometric tail
/// envelopes induced by find_w (capped by u; the cap is attained at N = 1).
Regulator nuovoschur_regulator(const Regulator& q, const Regulator& b, const LatticeElement& u);

enum class UniformMode { Plain, Ideal, FilterUniform };

struct ThresholdEntry {
    std::uint64_t level;    // k or p
    std::uint64_t index;    // j(k) / l(k) / k(p)
    std::string witness_set; // the ideal sample I or filter set F(p), when relevant
};

struct UniformSBoundednessReport {
    UniformMode mode;
    Regulator regulator;
    Verdict verdict;
    std::vector<ThresholdEntry> thresholds;
};

/// sup_n sup_{j >= j(k)} |m_n(H_j)| <= r_k for every k <= depth.
UniformSBoundednessReport uniform_sbounded_check(const ChargeFamily& ms, const SetFamily& h,
                                                 const Regulator& r, std::uint64_t depth);

/// The same with the measure index restricted to each ideal sample member.
UniformSBoundednessReport ideal_uniform_sbounded_check(
    const ChargeFamily& ms, const PartitionFilter& f, const SetFamily& h, const Regulator& r,
    const std::vector<SetDescriptor>& ideal_sample, std::uint64_t depth);

/// For each p: an index k(p) and a filter set F(p) with |m_n(H_k)| <= r_p for
/// k >= k(p) and n in F(p).
UniformSBoundednessReport F_uniform_sbounded_check(const ChargeFamily& ms,
                                                   const PartitionFilter& f, const SetFamily& h,
                                                   const Regulator& r, std::uint64_t depth);

struct SchurWitnessTable {
    std::vector<std::pair<std::uint64_t, std::string>> filter_sets; // j ↦ F_j
};

/// Phase 1 audits pointwise (o_F)-convergence to 0 with b on the sample sets;
/// Phase 2 certifies, with p = schur_regulator(a, b), a filter set F_j per j
/// on which the total variations sit below p_j.
Verdict schur_verify(const ChargeFamily& ms, const PartitionFilter& f, const Regulator& b,
                     const Regulator& a, const std::vector<SetDescriptor>& sample,
                     std::uint64_t depth, SchurWitnessTable* table = nullptr);

/// Hypothesis audit (equiboundedness, ideal uniform s-boundedness with q,
/// convergence with b), then the conclusion check with finale_regulator(q,b).
Verdict finale_verify(const ChargeFamily& ms, const PartitionFilter& f, const Regulator& b,
                      const Regulator& q, const SetFamily& h,
                      const std::vector<SetDescriptor>& ideal_sample,
                      const std::vector<SetDescriptor>& sample, std::uint64_t depth,
                      UniformSBoundednessReport* conclusion = nullptr);

/// The stronger claim: for each p the set {j : ⋁_k |m_j(H_k)| <= r_p} belongs
/// to F, with r = nuovoschur_regulator(q, b, u).
Verdict nuovoschur_verify(const ChargeFamily& ms, const PartitionFilter& f, const Regulator& b,
                          const Regulator& q, const LatticeElement& u, const SetFamily& h,
                          const std::vector<SetDescriptor>& sample, std::uint64_t depth,
                          Regulator* derived = nullptr);

} // namespace lmeas
