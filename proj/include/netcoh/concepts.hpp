#pragma once

#include <netcoh/completion.hpp>
#include <netcoh/matrix.hpp>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace netcoh {

/// Sorted node indices.
using NodeSet = std::vector<std::size_t>;

/// Cohesion of a singleton: the empty meet.
inline constexpr double kSingletonCohesion = std::numeric_limits<double>::infinity();

/// Υ(U) = min over distinct i, j ∈ U of max(Υ_ij, Υ_ji). Throws InputError on empty U.
double setCohesion(const Matrix &bias, std::span<const std::size_t> members);

bool isEpsilonCommunity(const Matrix &bias, std::span<const std::size_t> members, double epsilon);

/// Undirected threshold graph G_ε: i ~ j iff i ≠ j and max(Υ_ij, Υ_ji) ≥ ε.
std::vector<std::vector<bool>> thresholdGraph(const Matrix &bias, double epsilon);

/// Every nonempty ε-community (clique of G_ε), in lexicographic order.
/// Throws ResourceError past maxCount.
std::vector<NodeSet> epsilonCommunities(const Matrix &bias, double epsilon,
                                        std::size_t maxCount = 1'000'000);

struct ConceptSet {
    NodeSet members;
    double cohesion = kSingletonCohesion;

    bool operator==(const ConceptSet &) const = default;
};

/// U ⊑ V iff U ⊆ V and Υ(U) ≤ Υ(V).
bool orderLeq(const ConceptSet &u, const ConceptSet &v);

/// Maximal ε-communities: the maximal cliques of G_ε, in lexicographic order.
std::vector<ConceptSet> epsilonConcepts(const Matrix &bias, double epsilon,
                                        std::size_t maxCount = 1'000'000);

struct ConceptLayer {
    double epsilon = 0.0;
    std::vector<ConceptSet> concepts;
};

std::vector<ConceptLayer> conceptSweep(const Matrix &bias, std::span<const double> grid,
                                       std::size_t maxCount = 1'000'000);

/// ⟨a, b, f₀, f₁⟩ linking concept `from` to concept `to`. Edge indices refer
/// to the base network: a: i→k, b: j→ℓ, f₀ ∈ E_ij, f₁ ∈ E_kℓ.
struct Association {
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t firstLeg = 0;
    std::size_t lastLeg = 0;
    /// γ(f₀) + γ(b) − γ(a) − γ(f₁)
    double cost = 0.0;
};

struct ConceptNetwork {
    std::vector<ConceptSet> concepts;
    std::vector<Association> associations;
    /// Σ 2^(−γ(f)) per ordered concept pair.
    Matrix capacity;
};

ConceptNetwork conceptAssociations(const CompletedNetwork &net, std::vector<ConceptSet> concepts,
                                   std::size_t maxCount = 5'000'000);

} // namespace netcoh
