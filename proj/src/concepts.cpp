#include <netcoh/concepts.hpp>
#include <netcoh/error.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <functional>

namespace netcoh {

double setCohesion(const Matrix &bias, std::span<const std::size_t> members) {
    if (members.empty())
        throw InputError("cohesion of an empty node set is undefined");
    double meet = kSingletonCohesion;
    for (std::size_t x = 0; x < members.size(); ++x)
        for (std::size_t y = x + 1; y < members.size(); ++y) {
            const auto i = members[x], j = members[y];
            if (i == j)
                continue;
            meet = std::min(meet, std::max(bias(i, j), bias(j, i)));
        }
    return meet;
}

bool isEpsilonCommunity(const Matrix &bias, std::span<const std::size_t> members, double epsilon) {
    return setCohesion(bias, members) >= epsilon;
}

std::vector<std::vector<bool>> thresholdGraph(const Matrix &bias, double epsilon) {
    const std::size_t n = bias.rows();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            adj[i][j] = i != j && std::max(bias(i, j), bias(j, i)) >= epsilon;
    return adj;
}

std::vector<NodeSet> epsilonCommunities(const Matrix &bias, double epsilon, std::size_t maxCount) {
    const auto adj = thresholdGraph(bias, epsilon);
    const std::size_t n = bias.rows();
    std::vector<NodeSet> out;
    NodeSet current;

    // Depth-first, extending only with larger indices: lexicographic order.
    std::function<void(std::size_t)> grow = [&](std::size_t from) {
        for (std::size_t v = from; v < n; ++v) {
            if (!std::all_of(current.begin(), current.end(), [&](std::size_t u) { return adj[u][v]; }))
                continue;
            current.push_back(v);
            if (out.size() >= maxCount)
                throw ResourceError(fmt::format("more than {} communities", maxCount));
            out.push_back(current);
            grow(v + 1);
            current.pop_back();
        }
    };
    grow(0);
    return out;
}

bool orderLeq(const ConceptSet &u, const ConceptSet &v) {
    return std::includes(v.members.begin(), v.members.end(), u.members.begin(), u.members.end()) &&
           u.cohesion <= v.cohesion;
}

std::vector<ConceptSet> epsilonConcepts(const Matrix &bias, double epsilon, std::size_t maxCount) {
    const auto adj = thresholdGraph(bias, epsilon);
    const std::size_t n = bias.rows();
    std::vector<ConceptSet> out;
    NodeSet clique;

    // Bron–Kerbosch with Tomita pivoting.
    std::function<void(std::vector<std::size_t>, std::vector<std::size_t>)> expand =
        [&](std::vector<std::size_t> candidates, std::vector<std::size_t> excluded) {
            if (candidates.empty()) {
                if (excluded.empty()) {
                    if (out.size() >= maxCount)
                        throw ResourceError(fmt::format("more than {} concepts", maxCount));
                    NodeSet members = clique;
                    std::sort(members.begin(), members.end());
                    out.push_back({members, setCohesion(bias, members)});
                }
                return;
            }
            std::size_t pivot = candidates.front();
            std::size_t best = 0;
            bool chosen = false;
            for (const auto *pool : {&candidates, &excluded})
                for (auto u : *pool) {
                    std::size_t degree = 0;
                    for (auto v : candidates)
                        degree += adj[u][v] ? 1 : 0;
                    if (!chosen || degree > best) {
                        chosen = true;
                        best = degree;
                        pivot = u;
                    }
                }
            std::vector<std::size_t> branch;
            for (auto v : candidates)
                if (!adj[pivot][v])
                    branch.push_back(v);
            for (auto v : branch) {
                std::vector<std::size_t> nextCandidates, nextExcluded;
                for (auto w : candidates)
                    if (adj[v][w])
                        nextCandidates.push_back(w);
                for (auto w : excluded)
                    if (adj[v][w])
                        nextExcluded.push_back(w);
                clique.push_back(v);
                expand(std::move(nextCandidates), std::move(nextExcluded));
                clique.pop_back();
                candidates.erase(std::find(candidates.begin(), candidates.end(), v));
                excluded.push_back(v);
            }
        };

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = i;
    expand(all, {});
    std::sort(out.begin(), out.end(),
              [](const ConceptSet &a, const ConceptSet &b) { return a.members < b.members; });
    return out;
}

std::vector<ConceptLayer> conceptSweep(const Matrix &bias, std::span<const double> grid,
                                       std::size_t maxCount) {
    std::vector<ConceptLayer> layers;
    layers.reserve(grid.size());
    for (double eps : grid)
        layers.push_back({eps, epsilonConcepts(bias, eps, maxCount)});
    return layers;
}

ConceptNetwork conceptAssociations(const CompletedNetwork &net, std::vector<ConceptSet> concepts,
                                   std::size_t maxCount) {
    const auto &g = net.network;
    const std::size_t n = g.nodeCount();
    const double bound = net.params.cutoff - net.params.penalty;

    ConceptNetwork cn;
    cn.concepts = std::move(concepts);
    cn.capacity = Matrix::square(cn.concepts.size());

    auto mask = [n](const NodeSet &s) {
        std::vector<bool> m(n, false);
        for (auto i : s) {
            if (i >= n)
                throw InputError("concept member outside the network");
            m[i] = true;
        }
        return m;
    };

    for (std::size_t p = 0; p < cn.concepts.size(); ++p) {
        const auto inU = mask(cn.concepts[p].members);
        for (std::size_t q = 0; q < cn.concepts.size(); ++q) {
            const auto inV = mask(cn.concepts[q].members);
            std::vector<bool> inBoth(n);
            bool overlap = false;
            for (std::size_t i = 0; i < n; ++i) {
                inBoth[i] = inU[i] && inV[i];
                overlap = overlap || inBoth[i];
            }
            if (!overlap)
                continue;

            for (std::size_t a = 0; a < g.edgeCount(); ++a) {
                const auto &ea = g.edge(a); // i → k
                if (!inU[ea.source] || !inBoth[ea.target])
                    continue;
                for (std::size_t b = 0; b < g.edgeCount(); ++b) {
                    const auto &eb = g.edge(b); // j → ℓ
                    if (!inBoth[eb.source] || !inV[eb.target])
                        continue;
                    for (auto f0 : g.edgesBetween(ea.source, eb.source)) {
                        if (!withinCutoff(g.edge(f0).cost + eb.cost, bound))
                            continue;
                        for (auto f1 : g.edgesBetween(ea.target, eb.target)) {
                            if (!withinCutoff(ea.cost + g.edge(f1).cost, bound))
                                continue;
                            if (cn.associations.size() >= maxCount)
                                throw ResourceError(
                                    fmt::format("more than {} concept associations", maxCount));
                            const double cost = g.edge(f0).cost + eb.cost - ea.cost - g.edge(f1).cost;
                            cn.associations.push_back({p, q, a, b, f0, f1, cost});
                            cn.capacity(p, q) += capacityOf(cost);
                        }
                    }
                }
            }
        }
    }
    return cn;
}

} // namespace netcoh
