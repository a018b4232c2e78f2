#pragma once

#include <netcoh/dynamics.hpp>
#include <netcoh/matrix.hpp>
#include <netcoh/path_network.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netcoh {

struct SimConfig {
    /// Transitions per walker, burn-in included.
    std::uint64_t steps = 1'000'000;
    /// Defaults to 1% of steps.
    std::optional<std::uint64_t> burnIn;
    std::uint64_t seed = 1;
    std::uint32_t walkers = 1;

    std::uint64_t effectiveBurnIn() const { return burnIn.value_or(steps / 100); }
};

/// Visit statistics. Standard errors are batch means over 50 batches per
/// walker, which accounts for autocorrelation along a trajectory.
struct SimResult {
    std::vector<std::uint64_t> counts;
    std::vector<double> frequencies;
    std::vector<double> standardErrors;
    std::uint64_t seed = 0;
    std::string rng;
};

/// Random surfers on a stochastic chain (row: i → j with M_ij; column: j → i
/// with M_ij). Deterministic for a given seed, independent of thread count.
SimResult simulate(const StochasticChain &chain, const SimConfig &config);

/// Surfers on node pairs following the attraction dynamics, optionally
/// teleporting uniformly over all pairs. Counts are indexed j·N + k.
/// Throws NumericError if a walker lands on a pair with no three-hop route.
SimResult simulatePairs(const AttractionOperator &op, const SimConfig &config,
                        std::optional<double> damping = std::nullopt);

} // namespace netcoh
