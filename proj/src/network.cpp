#include <netcoh/error.hpp>
#include <netcoh/network.hpp>

#include <fmt/format.h>

#include <cmath>
#include <unordered_set>

namespace netcoh {

Network Network::build(std::vector<std::string> nodes, std::vector<EdgeSpec> specs) {
    if (nodes.empty())
        throw InputError("network needs at least one node");

    Network net;
    net.nodes_ = std::move(nodes);
    for (std::size_t i = 0; i < net.nodes_.size(); ++i) {
        if (!net.nodeIndex_.emplace(net.nodes_[i], i).second)
            throw InputError(fmt::format("duplicate node id '{}'", net.nodes_[i]));
    }

    std::unordered_set<std::string> edgeIds;
    net.edges_.reserve(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
        auto &spec = specs[k];
        auto src = net.indexOf(spec.source);
        auto dst = net.indexOf(spec.target);
        if (!src)
            throw InputError(fmt::format("edge {}: unknown node '{}'", k, spec.source));
        if (!dst)
            throw InputError(fmt::format("edge {}: unknown node '{}'", k, spec.target));
        if (!std::isfinite(spec.cost))
            throw InputError(fmt::format("edge {}: non-finite cost", k));

        Edge e;
        e.id = spec.id.empty() ? fmt::format("e{}", k) : std::move(spec.id);
        e.source = *src;
        e.target = *dst;
        e.cost = spec.cost;
        e.provenance = spec.provenance.empty() ? std::vector<std::string>{e.id}
                                               : std::move(spec.provenance);
        if (!edgeIds.insert(e.id).second)
            throw InputError(fmt::format("duplicate edge id '{}'", e.id));
        net.edges_.push_back(std::move(e));
    }
    net.index();
    return net;
}

Network Network::fromEdges(std::vector<std::string> nodes, std::vector<Edge> edges) {
    Network net;
    net.nodes_ = std::move(nodes);
    for (std::size_t i = 0; i < net.nodes_.size(); ++i)
        net.nodeIndex_.emplace(net.nodes_[i], i);
    net.edges_ = std::move(edges);
    net.index();
    return net;
}

void Network::index() {
    const std::size_t n = nodes_.size();
    between_.assign(n * n, {});
    out_.assign(n, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        between_[edges_[e].source * n + edges_[e].target].push_back(e);
        out_[edges_[e].source].push_back(e);
    }
}

std::optional<std::size_t> Network::indexOf(std::string_view node) const {
    auto it = nodeIndex_.find(std::string(node));
    if (it == nodeIndex_.end())
        return std::nullopt;
    return it->second;
}

double capacityOf(double cost) { return std::exp2(-cost); }

CapacityMatrix capacityMatrix(const Network &net) {
    CapacityMatrix cap{Matrix::square(net.nodeCount()), {}};
    cap.edgeCapacity.reserve(net.edgeCount());
    for (const auto &e : net.edges()) {
        const double a = capacityOf(e.cost);
        cap.edgeCapacity.push_back(a);
        cap.entries(e.source, e.target) += a;
    }
    return cap;
}

CapacityDistribution capacityDistribution(const CapacityMatrix &capacity) {
    const double total = capacity.total();
    if (!(total > 0.0))
        throw InputError("capacity matrix is all zero");

    const std::size_t n = capacity.size();
    CapacityDistribution dist;
    dist.joint.label = "capacity";
    dist.joint.values = Matrix::square(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dist.joint.values(i, j) = capacity.entries(i, j) / total;
    dist.outRank = dist.joint.values.rowSums();
    dist.inRank = dist.joint.values.colSums();
    return dist;
}

BiasMatrix trafficBias(const Matrix &joint) {
    const auto out = joint.rowSums();
    const auto in = joint.colSums();
    BiasMatrix bias{Matrix(joint.rows(), joint.cols())};
    for (std::size_t i = 0; i < joint.rows(); ++i)
        for (std::size_t j = 0; j < joint.cols(); ++j)
            bias.entries(i, j) = joint(i, j) - out[i] * in[j];
    return bias;
}

double cohesion(const Matrix &bias, std::span<const std::size_t> members) {
    double s = 0.0;
    for (std::size_t i : members)
        for (std::size_t j : members)
            s += bias(i, j);
    return s;
}

double adhesion(const Matrix &bias, std::span<const std::size_t> members) {
    std::vector<bool> inside(bias.rows(), false);
    for (std::size_t i : members)
        inside[i] = true;
    double s = 0.0;
    for (std::size_t i : members)
        for (std::size_t j = 0; j < bias.rows(); ++j)
            if (!inside[j])
                s += bias(i, j) + bias(j, i);
    return s;
}

} // namespace netcoh
