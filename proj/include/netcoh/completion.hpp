#pragma once

#include <netcoh/network.hpp>

#include <cstddef>

namespace netcoh {

/// Cutoff v and composition penalty d for v-completion. The penalty is
/// named apart from the teleportation damping on purpose.
struct CompletionParams {
    double cutoff = 4.0;
    double penalty = 1.0;
    std::size_t maxEdges = 1'000'000;
};

/// A network together with the parameters it is claimed to be complete for.
/// Every edge's provenance lists the original links of the path it stands for.
struct CompletedNetwork {
    Network network;
    CompletionParams params;
};

/// Penalized cost of an n-hop path: (n−1)·d + Σ γ(a_t).
double pathCost(std::span<const double> hopCosts, double penalty);

/// Cost comparison used for every "≤ v" admission test; absorbs rounding
/// from re-summing composite costs.
bool withinCutoff(double cost, double cutoff);

/**
 * Adds every nonempty path of penalized cost ≤ v as an edge and drops
 * original links costing more than v. Paths over edges that are themselves
 * composites are flattened to their original links, so completing twice is
 * the identity. The result is ordered by provenance.
 *
 * Throws DivergentCompletion when a cycle has penalized cost ≤ 0 and
 * ResourceError when more than params.maxEdges edges would be produced.
 */
CompletedNetwork vComplete(const Network &net, const CompletionParams &params);

/// True iff `net` is exactly the completion of its single-hop links.
bool isVComplete(const Network &net, const CompletionParams &params);

} // namespace netcoh
