#pragma once

#include <netcoh/matrix.hpp>
#include <netcoh/network.hpp>

#include <optional>
#include <span>
#include <string>

namespace netcoh {

/// Row orientation: M_ij is the probability of moving i → j (π = πM).
/// Column orientation: M_ij is the probability that a surfer at j came
/// from i (π = Mπ).
enum class Orientation { Row, Column };

enum class DanglingPolicy {
    /// Add a link of cost fixCost between every ordered node pair.
    Complete,
    /// Adjoin one fresh node with links of cost fixCost to and from every node.
    Phantom,
    /// Refuse zero rows/columns.
    Reject,
};

struct DanglingOptions {
    DanglingPolicy policy = DanglingPolicy::Complete;
    double fixCost = 30.0;
};

/// Damped mixing δ·M + (1−δ)·P. An absent preference means uniform 1/N.
struct TeleportParams {
    double damping = 0.85;
    std::optional<Matrix> preference;
};

/**
 * A Markov chain derived from a capacity matrix. Forward-out and backward-in
 * scores are not stochastic; they are kept raw (normalized == false) and the
 * ranking code iterates them as Perron problems. Teleporting a raw chain
 * cannot be materialized entry-wise, so the mixing is recorded in
 * `teleport` and applied after each normalized step.
 */
struct StochasticChain {
    Matrix entries;
    Orientation orientation = Orientation::Row;
    std::string tag;
    bool normalized = true;
    /// Set when the phantom dangling fix appended an extra last state.
    bool phantom = false;
    std::optional<TeleportParams> teleport;

    std::size_t size() const noexcept { return entries.rows(); }
};

/// Capacity matrix after applying the dangling policy for the given
/// orientation (zero rows for Row, zero columns for Column). Returned
/// unchanged when nothing dangles. Sets `phantom` if a node was adjoined.
Matrix fixDangling(const Matrix &capacity, Orientation which, const DanglingOptions &options,
                   bool &phantom);

/// A^▷_ij = A_ij / A_i•.
StochasticChain forward(const CapacityMatrix &capacity, const DanglingOptions &options = {});
/// A^◁_ij = A_ij / A_•j.
StochasticChain backward(const CapacityMatrix &capacity, const DanglingOptions &options = {});
/// Raw forward-out scores A_ij·A_j• / (A_i•·A_••).
StochasticChain forwardOut(const CapacityMatrix &capacity, const DanglingOptions &options = {});
/// Raw backward-in scores A_•i·A_ij / (A_••·A_•j).
StochasticChain backwardIn(const CapacityMatrix &capacity, const DanglingOptions &options = {});

/**
 * δ·chain + (1−δ)·P. Throws InputError for δ outside (0,1), a preference of
 * the wrong size, or a preference that is not stochastic in the chain's
 * orientation.
 */
StochasticChain teleport(const StochasticChain &chain, const TeleportParams &params);

Matrix uniformPreference(std::size_t n);
/// Teleport matrix that jumps to `weights` (normalized) from every state,
/// laid out for the given orientation. States past `weights.size()` get zero.
Matrix personalizedPreference(std::span<const double> weights, std::size_t states, Orientation o);

} // namespace netcoh
