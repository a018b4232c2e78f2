#pragma once

#include <netcoh/distribution.hpp>
#include <netcoh/dynamics.hpp>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace netcoh {

struct PowerOptions {
    /// ℓ1 fixed-point residual at which iteration stops.
    double tol = 1e-12;
    std::size_t maxIter = 100'000;
};

struct PowerResult {
    std::vector<double> vector;
    double eigenvalue = 1.0;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/**
 * Normalized power iteration x ← op(x)/|op(x)|₁ from `start` until
 * ‖op(x)/|op(x)|₁ − x‖₁ ≤ tol. With `lazy`, the update averages with the
 * previous iterate, which leaves the fixed point unchanged but removes
 * oscillation on periodic chains. Throws NumericError on non-convergence.
 */
PowerResult powerIterate(const std::function<std::vector<double>(std::span<const double>)> &op,
                         std::vector<double> start, const PowerOptions &options, bool lazy = false);

/**
 * Stationary distribution (or normalized Perron vector, for raw-score
 * chains) of a chain. Chains that are not strictly positive must be
 * irreducible; otherwise the fixed point is not unique and NumericError is
 * thrown. Periodic irreducible chains are iterated lazily.
 */
Distribution stationary(const StochasticChain &chain, const PowerOptions &options = {});

struct RankOptions {
    DanglingOptions dangling;
    /// nullopt selects exact (undamped) mode.
    std::optional<double> damping = 0.85;
    std::optional<std::vector<double>> personalization; // per node; unset means uniform
    /// Full row-stochastic teleport matrix (P_ij: trust of i in j); takes
    /// precedence over `personalization`. Column chains use its transpose.
    std::optional<Matrix> preference;
    PowerOptions power;
};

/// Teleports (unless exact), iterates, and drops a phantom state if present.
Distribution rankOf(const StochasticChain &chain, const RankOptions &options);

/// Reputation: stationary distribution of the forward chain.
Distribution pullRank(const CapacityMatrix &capacity, const RankOptions &options = {});
/// Promotion: stationary distribution of the backward chain.
Distribution pushRank(const CapacityMatrix &capacity, const RankOptions &options = {});
/// Left Perron vector of the forward-out scores.
Distribution forwardOutRank(const CapacityMatrix &capacity, const RankOptions &options = {});
/// Right Perron vector of the backward-in scores.
Distribution backwardInRank(const CapacityMatrix &capacity, const RankOptions &options = {});

/// Independence baseline r^▶◀_jk = r^▶_j · r^◀_k.
JointDistribution expectedFlow(const Distribution &forwardOut, const Distribution &backwardIn);

} // namespace netcoh
