#pragma once

#include <functional>

#include "lmeas/sequences.hpp"
#include "lmeas/sets.hpp"
#include "lmeas/verdict.hpp"

namespace lmeas {

enum class Tri { Yes, No, Unknown };

/// Exact two-sided classification of a descriptor against a filter's dual
/// ideal. `ideal_cover` lists block indices with S ⊆ ∪ A_k over the cover
/// (complete only when `cover_complete`); `filter_cocover` plays the same role
/// for the complement when in_filter == Yes.
struct Classification {
    Tri in_ideal = Tri::Unknown;
    Tri in_filter = Tri::Unknown;
    std::vector<std::uint64_t> ideal_cover;
    std::vector<std::uint64_t> filter_cocover;
    bool cover_complete = false;
};

Classification classify(const PartitionFilter& f, const SetDescriptor& s);

/// Exact ideal membership for an eventually periodic set (always decidable).
bool in_ideal_periodic(const PartitionFilter& f, const PeriodicSet& ep);

/// Decides H ∈ dual ideal (H meets only finitely many blocks). Exact on the
/// non-opaque decidable fragment; for opaque descriptors, Fails when `depth`
/// distinct block indices are observed within the scan bound, else Unknown.
Verdict in_ideal(const PartitionFilter& f, const SetDescriptor& h, std::uint64_t depth);

Verdict in_filter(const PartitionFilter& f, const SetDescriptor& h, std::uint64_t depth);

/// Negation of in_ideal; a Holds witness lists distinct block indices met.
Verdict is_stationary(const PartitionFilter& f, const SetDescriptor& h, std::uint64_t depth);

/// The one-point-per-block selector J' ⊆ J: |J' ∩ A_k| <= 1 for all k, and
/// every infinite subset of J' is stationary by that structure.
/// Pre: is_stationary(f, J, depth) Holds; throws NotStationaryError otherwise.
SetDescriptor select_sparse_stationary(const PartitionFilter& f, const SetDescriptor& j,
                                       std::uint64_t depth);

/// Stationary J ⊆ I with J \ As[n] finite for each audited n: the selector on
/// I minus the finitely many blocks covering the complements of the As.
SetDescriptor diagonal_witness(const PartitionFilter& f, const std::vector<SetDescriptor>& as,
                               const SetDescriptor& i, std::uint64_t depth);

/// (o_F)-convergence: for each p <= depth the bad set {k : |x_k − limit| not
/// <= r(p)} must lie in the dual ideal.
Verdict filter_o_convergence(const PartitionFilter& f, const ElementSequence& x,
                             const LatticeElement& limit, const Regulator& r,
                             std::uint64_t depth);

/// A block of an infinite set: finitely many finite pieces per index.
struct Block {
    std::function<SetDescriptor(std::uint64_t)> pieces;
    SetDescriptor of;
};

/// Pieces pairwise disjoint and covering `of`, checked on [1..depth] over the
/// first `depth` pieces.
bool validate_block(const Block& b, std::uint64_t depth);

/// Up to `want` distinct block indices met by S, each with the probing
/// element; best effort within internal caps.
std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks_met(const PartitionFilter& f,
                                                                const SetDescriptor& s,
                                                                std::uint64_t want);

} // namespace lmeas
