#pragma once

#include <netcoh/completion.hpp>
#include <netcoh/distribution.hpp>
#include <netcoh/ranking.hpp>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace netcoh {

/**
 * One edge f = ⟨f₀,f₁⟩ of the path network: traffic on the avoided link
 * a: i→ℓ is diverted through f₀ ∈ E_ij, the attracting link b: j→k, and
 * f₁ ∈ E_kℓ. Indices refer to edges of the base network.
 */
struct Detour {
    std::size_t avoided = 0;
    std::size_t attracting = 0;
    std::size_t firstLeg = 0;
    std::size_t lastLeg = 0;
    /// 2d + γ(f₀) + γ(b) + γ(f₁) − γ(a)
    double cost = 0.0;
};

/// Calls visit(Detour) for every detour admitted by the cutoff:
/// γ(f₀) + γ(b) + γ(f₁) − γ(a) ≤ cutoff − 2d.
template <class Visitor>
void forEachDetour(const Network &net, double penalty, double cutoff, Visitor &&visit) {
    const auto &edges = net.edges();
    for (std::size_t a = 0; a < edges.size(); ++a) {
        const auto &avoided = edges[a];
        for (std::size_t b = 0; b < edges.size(); ++b) {
            const auto &attracting = edges[b];
            const auto &first = net.edgesBetween(avoided.source, attracting.source);
            const auto &last = net.edgesBetween(attracting.target, avoided.target);
            for (auto f0 : first)
                for (auto f1 : last) {
                    const double excess =
                        edges[f0].cost + attracting.cost + edges[f1].cost - avoided.cost;
                    if (withinCutoff(excess, cutoff - 2.0 * penalty))
                        visit(Detour{a, b, f0, f1, 2.0 * penalty + excess});
                }
        }
    }
}

/// Smallest path cutoff that admits every candidate detour, i.e. makes
/// Ě_ab = E_ij × E_kℓ for all a, b. Falls back to the completion cutoff when
/// no detour exists.
double exhaustivePathCutoff(const CompletedNetwork &net);

/// The path network: one node per base edge (same ids, same order), one edge
/// per admitted detour.
struct PathNetwork {
    Network graph;
    std::vector<Detour> detours;
    double cutoff = 0.0;
    double penalty = 0.0;
};

/// Without `pathCutoff` every detour is admitted (exhaustivePathCutoff).
/// Throws InputError when `net` is not v-complete for its own parameters and
/// ResourceError when more than `maxEdges` detours are admitted.
PathNetwork buildPathNetwork(const CompletedNetwork &net, std::optional<double> pathCutoff = std::nullopt,
                             std::size_t maxEdges = 5'000'000);

/// Ǎ_ab = A_b·A_ij·A_kℓ / (4^d·A_a): path-network capacities when every
/// detour is admitted.
Matrix closedFormPathCapacity(const CompletedNetwork &net);

struct PathRanks {
    /// ř: pull rank of each base edge in the path network.
    Distribution attraction;
    /// ř^◁: push rank of each base edge in the path network.
    Distribution avoidance;
};

PathRanks pathRanks(const PathNetwork &pn, const RankOptions &options = {});

/// r̂_jk = Σ_{b: j→k} ř_b.
JointDistribution nodeAttraction(const Network &base, const Distribution &attraction);

/**
 * Attraction dynamics on ordered node pairs,
 *   (T·m)_jk = Σ_{i,ℓ} A_ij·A_jk·A_kℓ / D_iℓ · m_iℓ,   D = A·A·A,
 * applied in factored form T(m) = A ⊙ (Aᵀ·(m ⊘ D)·Aᵀ). Pairs with D_iℓ = 0
 * support no three-hop route; mass sitting there is dropped.
 */
class AttractionOperator {
public:
    explicit AttractionOperator(Matrix capacity);

    std::size_t size() const noexcept { return capacity_.rows(); }
    const Matrix &capacity() const noexcept { return capacity_; }
    const Matrix &denominators() const noexcept { return denominators_; }
    const std::vector<std::pair<std::size_t, std::size_t>> &excludedPairs() const noexcept {
        return excluded_;
    }

    Matrix apply(const Matrix &joint) const;
    /// Single entry Â_(ij)(kℓ); zero for excluded (i,ℓ).
    double transition(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

private:
    Matrix capacity_;
    Matrix transposed_;
    Matrix denominators_;
    std::vector<std::pair<std::size_t, std::size_t>> excluded_;
};

struct AttractionOptions {
    /// Mixing with the uniform joint over all N² pairs; nullopt = exact.
    std::optional<double> damping = 0.85;
    PowerOptions power;
};

/// Fixed point of the attraction dynamics. In exact mode the chain must be
/// irreducible on the pairs carrying capacity, otherwise NumericError.
JointDistribution attractionStationary(const CapacityMatrix &capacity,
                                       const AttractionOptions &options = {});

struct Lemma1Report {
    double cutoff = 0.0;
    /// max |Ǎ_ab − A_b·A_ij·A_kℓ/(4^d·A_a)|
    double pairDeviation = 0.0;
    /// max |Σ_{c: j→k} Ǎ_ac − A_ij·A_jk·A_kℓ/(4^d·A_a)|
    double groupedDeviation = 0.0;
    /// max |Ǎ_a• − D_iℓ/(4^d·A_a)|
    double totalDeviation = 0.0;
    /// Number of (a,b) pairs whose enumerated capacity misses the closed form.
    std::size_t pairViolations = 0;

    double maxDeviation() const;
    bool holds(double tol) const { return maxDeviation() <= tol; }
};

/// Compares enumerated path-network capacities with the closed forms.
/// Defaults to the exhaustive path cutoff.
Lemma1Report lemma1Check(const CompletedNetwork &net, std::optional<double> pathCutoff = std::nullopt);

/// Υ_jk = r̂_jk − r^▶_j·r^◀_k.
Matrix attractionBias(const JointDistribution &attraction, const Distribution &forwardOut,
                      const Distribution &backwardIn);

struct MarginalReport {
    double rowDeviation = 0.0;
    double columnDeviation = 0.0;
    double maxDeviation() const { return std::max(rowDeviation, columnDeviation); }
};

/// Deviation of r̂'s row marginals from r^▶ and column marginals from r^◀.
MarginalReport marginalCheck(const JointDistribution &attraction, const Distribution &forwardOut,
                             const Distribution &backwardIn);

/// D(r̂ ‖ r^▶ ⊗ r^◀) in bits. Throws NumericError("infinite divergence") if
/// r̂ puts mass where the product vanishes.
double mutualInformation(const JointDistribution &attraction, const Distribution &forwardOut,
                         const Distribution &backwardIn);

} // namespace netcoh
