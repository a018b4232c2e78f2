#pragma once

#include <netcoh/distribution.hpp>
#include <netcoh/matrix.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netcoh {

/// A link i -e-> j with cost γ(e). Negative costs are payoffs.
struct Edge {
    std::string id;
    std::size_t source = 0;
    std::size_t target = 0;
    double cost = 0.0;
    /// Ids of the original links this edge stands for, head to tail. A plain
    /// link carries its own id only.
    std::vector<std::string> provenance;

    std::size_t hops() const noexcept { return provenance.size(); }
};

/// Edge record as it appears in input, with endpoints given by node id.
struct EdgeSpec {
    std::string source;
    std::string target;
    double cost = 0.0;
    /// Empty means "assign e<k>" where k is the position in the edge list.
    std::string id;
    /// Empty means {id}.
    std::vector<std::string> provenance;
};

/**
 * Edge-labelled directed multigraph. Node order is insertion order and fixes
 * the index order of every matrix derived from the network. Parallel edges
 * and self-loops are allowed. Immutable once built.
 */
class Network {
public:
    /// Validates and builds. Throws InputError on duplicate node ids,
    /// duplicate edge ids, unknown endpoints, non-finite costs or an empty
    /// node list.
    static Network build(std::vector<std::string> nodes, std::vector<EdgeSpec> edges);

    /// Builds from already-resolved edges (endpoint indices must be valid).
    static Network fromEdges(std::vector<std::string> nodes, std::vector<Edge> edges);

    std::size_t nodeCount() const noexcept { return nodes_.size(); }
    std::size_t edgeCount() const noexcept { return edges_.size(); }
    const std::vector<std::string> &nodes() const noexcept { return nodes_; }
    const std::vector<Edge> &edges() const noexcept { return edges_; }
    const Edge &edge(std::size_t e) const { return edges_[e]; }

    std::optional<std::size_t> indexOf(std::string_view node) const;

    /// Edge indices grouped by (source, target): the sets E_ij.
    const std::vector<std::size_t> &edgesBetween(std::size_t i, std::size_t j) const {
        return between_[i * nodes_.size() + j];
    }
    const std::vector<std::size_t> &outEdges(std::size_t i) const { return out_[i]; }

    Network() = default;

private:
    void index();

    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> nodeIndex_;
    std::vector<std::vector<std::size_t>> between_;
    std::vector<std::vector<std::size_t>> out_;
};

/// A_ij = Σ_{e∈E_ij} 2^(−γ(e)), together with the per-edge capacities A_e.
struct CapacityMatrix {
    Matrix entries;
    std::vector<double> edgeCapacity;

    std::size_t size() const noexcept { return entries.rows(); }
    double total() const { return entries.sum(); }
};

/// α = A / A_••, with out-rank α_i• and in-rank α_•j.
struct CapacityDistribution {
    JointDistribution joint;
    std::vector<double> outRank;
    std::vector<double> inRank;
};

/// υ_ij = α_ij − α_i•·α_•j.
struct BiasMatrix {
    Matrix entries;
};

double capacityOf(double cost);

CapacityMatrix capacityMatrix(const Network &net);

/// Throws InputError when the capacity matrix is all zero.
CapacityDistribution capacityDistribution(const CapacityMatrix &capacity);

/// Traffic bias of a joint distribution against the product of its own marginals.
BiasMatrix trafficBias(const Matrix &joint);

/// Σ_{i,j∈U} υ_ij. Empty U gives 0.
double cohesion(const Matrix &bias, std::span<const std::size_t> members);
/// Σ_{i∈U, j∉U} (υ_ij + υ_ji). Empty U gives 0.
double adhesion(const Matrix &bias, std::span<const std::size_t> members);

} // namespace netcoh
