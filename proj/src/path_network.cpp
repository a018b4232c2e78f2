#include <netcoh/error.hpp>
#include <netcoh/path_network.hpp>
#include <netcoh/support.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace netcoh {

double exhaustivePathCutoff(const CompletedNetwork &net) {
    const auto &g = net.network;
    const std::size_t n = g.nodeCount();
    const double d = net.params.penalty;

    // Most expensive member of each E_ij.
    Matrix costliest(n, n, -std::numeric_limits<double>::infinity());
    for (const auto &e : g.edges())
        costliest(e.source, e.target) = std::max(costliest(e.source, e.target), e.cost);

    bool any = false;
    double needed = -std::numeric_limits<double>::infinity();
    for (const auto &a : g.edges())
        for (const auto &b : g.edges()) {
            const double f0 = costliest(a.source, b.source);
            const double f1 = costliest(b.target, a.target);
            if (!std::isfinite(f0) || !std::isfinite(f1))
                continue;
            any = true;
            needed = std::max(needed, 2.0 * d + f0 + b.cost + f1 - a.cost);
        }
    return any ? needed : net.params.cutoff;
}

PathNetwork buildPathNetwork(const CompletedNetwork &net, std::optional<double> pathCutoff,
                             std::size_t maxEdges) {
    if (!isVComplete(net.network, net.params))
        throw InputError(fmt::format("path network needs a v-complete input (v = {}, d = {})",
                                     net.params.cutoff, net.params.penalty));

    PathNetwork pn;
    pn.cutoff = pathCutoff ? *pathCutoff : exhaustivePathCutoff(net);
    pn.penalty = net.params.penalty;

    std::vector<Edge> edges;
    forEachDetour(net.network, pn.penalty, pn.cutoff, [&](const Detour &f) {
        if (pn.detours.size() >= maxEdges)
            throw ResourceError(fmt::format("path network exceeds the cap of {} edges", maxEdges));
        Edge e;
        e.id = fmt::format("f{}", pn.detours.size());
        e.source = f.avoided;
        e.target = f.attracting;
        e.cost = f.cost;
        e.provenance = {e.id};
        edges.push_back(std::move(e));
        pn.detours.push_back(f);
    });

    std::vector<std::string> nodes;
    nodes.reserve(net.network.edgeCount());
    for (const auto &e : net.network.edges())
        nodes.push_back(e.id);
    if (nodes.empty())
        throw InputError("path network of an edgeless network has no nodes");
    pn.graph = Network::fromEdges(std::move(nodes), std::move(edges));
    return pn;
}

Matrix closedFormPathCapacity(const CompletedNetwork &net) {
    const auto &g = net.network;
    const auto cap = capacityMatrix(g);
    const double fourToD = std::exp2(2.0 * net.params.penalty);
    const std::size_t m = g.edgeCount();
    Matrix out(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        const auto &ea = g.edge(a);
        const double scale = 1.0 / (fourToD * cap.edgeCapacity[a]);
        for (std::size_t b = 0; b < m; ++b) {
            const auto &eb = g.edge(b);
            out(a, b) = scale * cap.edgeCapacity[b] * cap.entries(ea.source, eb.source) *
                        cap.entries(eb.target, ea.target);
        }
    }
    return out;
}

PathRanks pathRanks(const PathNetwork &pn, const RankOptions &options) {
    const auto cap = capacityMatrix(pn.graph);
    PathRanks ranks{pullRank(cap, options), pushRank(cap, options)};
    ranks.attraction.label = "attraction";
    ranks.avoidance.label = "avoidance";
    return ranks;
}

JointDistribution nodeAttraction(const Network &base, const Distribution &attraction) {
    if (attraction.size() != base.edgeCount())
        throw InputError("node attraction: one rank per base edge expected");
    JointDistribution r{Matrix::square(base.nodeCount()), "node-attraction"};
    for (std::size_t b = 0; b < base.edgeCount(); ++b)
        r.values(base.edge(b).source, base.edge(b).target) += attraction[b];
    return r;
}

AttractionOperator::AttractionOperator(Matrix capacity)
    : capacity_(std::move(capacity)), transposed_(capacity_.transposed()) {
    if (!capacity_.isSquare() || capacity_.rows() == 0)
        throw InputError("attraction dynamics needs a square, nonempty capacity matrix");
    denominators_ = capacity_ * capacity_ * capacity_;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t l = 0; l < size(); ++l)
            if (!(denominators_(i, l) > 0.0))
                excluded_.emplace_back(i, l);
}

Matrix AttractionOperator::apply(const Matrix &joint) const {
    const std::size_t n = size();
    Matrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l)
            if (denominators_(i, l) > 0.0)
                scaled(i, l) = joint(i, l) / denominators_(i, l);
    Matrix out = transposed_ * scaled * transposed_;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            out(j, k) *= capacity_(j, k);
    return out;
}

double AttractionOperator::transition(std::size_t i, std::size_t j, std::size_t k,
                                      std::size_t l) const {
    const double den = denominators_(i, l);
    if (!(den > 0.0))
        return 0.0;
    return capacity_(i, j) * capacity_(j, k) * capacity_(k, l) / den;
}

JointDistribution attractionStationary(const CapacityMatrix &capacity,
                                       const AttractionOptions &options) {
    const AttractionOperator op(capacity.entries);
    const std::size_t n = op.size();
    const Matrix &a = op.capacity();

    std::vector<double> start(n * n, 0.0);
    bool lazy = false;
    if (!options.damping) {
        // Live states are pairs carrying capacity; T only ever puts mass there.
        std::vector<std::size_t> live;
        std::vector<std::size_t> slot(n * n, n * n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (a(j, k) > 0.0) {
                    slot[j * n + k] = live.size();
                    live.push_back(j * n + k);
                }
        if (live.empty())
            throw InputError("attraction dynamics: capacity matrix is all zero");
        Digraph g;
        g.adjacency.resize(live.size());
        for (std::size_t s = 0; s < live.size(); ++s) {
            const std::size_t i = live[s] / n, l = live[s] % n;
            for (std::size_t t = 0; t < live.size(); ++t) {
                const std::size_t j = live[t] / n, k = live[t] % n;
                if (a(i, j) > 0.0 && a(k, l) > 0.0)
                    g.adjacency[s].push_back(t);
            }
        }
        if (!stronglyConnected(g))
            throw NumericError("non-unique stationary distribution: attraction dynamics is reducible");
        lazy = period(g) > 1;
        for (auto p : live)
            start[p] = 1.0;
    } else {
        if (!(*options.damping > 0.0 && *options.damping < 1.0))
            throw InputError("damping must lie strictly inside (0,1)");
        std::fill(start.begin(), start.end(), 1.0);
    }

    const auto damping = options.damping;
    auto step = [&op, n, damping](std::span<const double> x) {
        Matrix m(n, n);
        std::copy(x.begin(), x.end(), m.data().begin());
        Matrix y = op.apply(m);
        std::vector<double> out(y.data().begin(), y.data().end());
        if (damping) {
            // Pairs without a three-hop route behave like dangling states: they jump uniformly.
            const Matrix &den = op.denominators();
            double mass = 0.0, stranded = 0.0;
            for (std::size_t p = 0; p < n * n; ++p) {
                mass += x[p];
                if (!(den.data()[p] > 0.0))
                    stranded += x[p];
            }
            const double jump =
                ((1.0 - *damping) * mass + *damping * stranded) / static_cast<double>(n * n);
            for (double &v : out)
                v = *damping * v + jump;
        }
        return out;
    };

    auto result = powerIterate(step, std::move(start), options.power, lazy);
    JointDistribution r{Matrix::square(n), "attraction-dynamics"};
    std::copy(result.vector.begin(), result.vector.end(), r.values.data().begin());
    return r;
}

double Lemma1Report::maxDeviation() const {
    return std::max({pairDeviation, groupedDeviation, totalDeviation});
}

Lemma1Report lemma1Check(const CompletedNetwork &net, std::optional<double> pathCutoff) {
    const auto &g = net.network;
    const std::size_t m = g.edgeCount();
    const std::size_t n = g.nodeCount();
    Lemma1Report report;
    report.cutoff = pathCutoff.value_or(exhaustivePathCutoff(net));

    Matrix enumerated(m, m);
    forEachDetour(g, net.params.penalty, report.cutoff, [&](const Detour &f) {
        enumerated(f.avoided, f.attracting) += capacityOf(f.cost);
    });

    const auto cap = capacityMatrix(g);
    const Matrix closed = closedFormPathCapacity(net);
    const Matrix threeHop = cap.entries * cap.entries * cap.entries;
    const double fourToD = std::exp2(2.0 * net.params.penalty);

    for (std::size_t a = 0; a < m; ++a) {
        const auto &ea = g.edge(a);
        const double scale = 1.0 / (fourToD * cap.edgeCapacity[a]);

        Matrix grouped(n, n);
        double rowTotal = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            const double dev = std::abs(enumerated(a, b) - closed(a, b));
            report.pairDeviation = std::max(report.pairDeviation, dev);
            if (dev > 1e-10 * std::max(1.0, std::abs(closed(a, b))))
                ++report.pairViolations;
            grouped(g.edge(b).source, g.edge(b).target) += enumerated(a, b);
            rowTotal += enumerated(a, b);
        }
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const double expected =
                    scale * cap.entries(ea.source, j) * cap.entries(j, k) * cap.entries(k, ea.target);
                report.groupedDeviation =
                    std::max(report.groupedDeviation, std::abs(grouped(j, k) - expected));
            }
        report.totalDeviation = std::max(
            report.totalDeviation, std::abs(rowTotal - scale * threeHop(ea.source, ea.target)));
    }
    return report;
}

Matrix attractionBias(const JointDistribution &attraction, const Distribution &forwardOut,
                      const Distribution &backwardIn) {
    const std::size_t n = attraction.values.rows();
    if (forwardOut.size() != n || backwardIn.size() != n)
        throw InputError("attraction bias: rank vectors do not match the joint distribution");
    Matrix bias(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            bias(j, k) = attraction.values(j, k) - forwardOut[j] * backwardIn[k];
    return bias;
}

MarginalReport marginalCheck(const JointDistribution &attraction, const Distribution &forwardOut,
                             const Distribution &backwardIn) {
    MarginalReport report;
    report.rowDeviation = maxAbsDiff(attraction.values.rowSums(), forwardOut.values);
    report.columnDeviation = maxAbsDiff(attraction.values.colSums(), backwardIn.values);
    return report;
}

double mutualInformation(const JointDistribution &attraction, const Distribution &forwardOut,
                         const Distribution &backwardIn) {
    const std::size_t n = attraction.values.rows();
    if (forwardOut.size() != n || backwardIn.size() != n)
        throw InputError("mutual information: rank vectors do not match the joint distribution");
    double info = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const double p = attraction.values(j, k);
            if (!(p > 0.0))
                continue;
            const double q = forwardOut[j] * backwardIn[k];
            if (!(q > 0.0))
                throw NumericError(fmt::format(
                    "infinite divergence: joint mass at ({}, {}) outside the product support", j, k));
            info += p * std::log2(p / q);
        }
    return info;
}

} // namespace netcoh
