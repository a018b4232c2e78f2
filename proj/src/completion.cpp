#include <netcoh/completion.hpp>
#include <netcoh/error.hpp>
#include <netcoh/support.hpp>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace netcoh {

double pathCost(std::span<const double> hopCosts, double penalty) {
    double cost = 0.0;
    for (double c : hopCosts)
        cost += c;
    if (!hopCosts.empty())
        cost += static_cast<double>(hopCosts.size() - 1) * penalty;
    return cost;
}

bool withinCutoff(double cost, double cutoff) {
    return cost <= cutoff + 1e-12 * std::max(1.0, std::abs(cutoff));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Rejects inputs where some cycle has Σ(γ + d) ≤ 0; such cycles can be
/// pumped to produce infinitely many admissible paths.
void rejectNonpositiveCycles(const Network &net, double penalty) {
    const std::size_t n = net.nodeCount();
    Matrix dist(n, n, kInf);
    std::vector<std::size_t> succ(n * n, n);
    for (const auto &e : net.edges()) {
        const double w = e.cost + penalty;
        if (w < dist(e.source, e.target)) {
            dist(e.source, e.target) = w;
            succ[e.source * n + e.target] = e.target;
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (dist(i, k) == kInf)
                continue;
            for (std::size_t j = 0; j < n; ++j) {
                const double via = dist(i, k) + dist(k, j);
                if (via < dist(i, j)) {
                    dist(i, j) = via;
                    succ[i * n + j] = succ[i * n + k];
                }
            }
        }

    for (std::size_t i = 0; i < n; ++i) {
        if (!(dist(i, i) <= 0.0))
            continue;
        // Walk successors back to i; with negative cycles present the walk
        // may loop elsewhere first, in which case that loop is reported.
        std::vector<std::size_t> walk{i};
        std::vector<std::size_t> seenAt(n, n + 1);
        seenAt[i] = 0;
        std::size_t u = i;
        for (std::size_t step = 0; step <= n; ++step) {
            u = succ[u * n + i];
            if (u >= n)
                break;
            if (seenAt[u] <= n) {
                walk.erase(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(seenAt[u]));
                walk.push_back(u);
                break;
            }
            seenAt[u] = walk.size();
            walk.push_back(u);
        }
        std::vector<std::string> cycle;
        for (auto v : walk)
            cycle.push_back(net.nodes()[v]);
        auto what = fmt::format("divergent completion: cycle {} has nonpositive penalized cost",
                                fmt::join(cycle, " -> "));
        throw DivergentCompletion(what, std::move(cycle));
    }
}

/// Lower bound on Σ(γ + d) over every nonempty walk leaving each node; +∞
/// for nodes without out-links. Well defined once nonpositive cycles are
/// excluded.
std::vector<double> continuationBound(const Network &net, double penalty) {
    const std::size_t n = net.nodeCount();
    std::vector<double> h(n, kInf);
    for (std::size_t round = 0; round <= n; ++round) {
        bool changed = false;
        for (const auto &e : net.edges()) {
            const double cand = e.cost + penalty + std::min(0.0, h[e.target]);
            if (cand < h[e.source]) {
                h[e.source] = cand;
                changed = true;
            }
        }
        if (!changed)
            break;
    }
    return h;
}

struct Candidate {
    std::size_t target = 0;
    double cost = 0.0;
    std::size_t hops = 0;
    std::vector<std::string> provenance;
};

std::string provenanceKey(const std::vector<std::string> &prov) {
    std::string key;
    for (const auto &p : prov) {
        key += p;
        key += '\n';
    }
    return key;
}

class SourceEnumerator {
public:
    SourceEnumerator(const Network &net, const CompletionParams &params,
                     const std::vector<double> &bound, std::atomic<std::size_t> &produced)
        : net_(net), params_(params), bound_(bound), produced_(produced) {}

    std::vector<Candidate> run(std::size_t source) {
        found_.clear();
        index_.clear();
        stack_.clear();
        extend(source, 0.0);
        return std::move(found_);
    }

private:
    void extend(std::size_t node, double weight) {
        const double d = params_.penalty;
        for (auto ei : net_.outEdges(node)) {
            const auto &e = net_.edge(ei);
            const double w = weight + e.cost + d;
            // Input edges are kept whatever their cost; only composites obey the cutoff.
            const bool original = stack_.empty();
            const bool extendable = withinCutoff(w + std::min(0.0, bound_[e.target]) - d, params_.cutoff);
            if (!extendable && !original)
                continue;
            stack_.push_back(ei);
            if (original || withinCutoff(w - d, params_.cutoff))
                record(e.target, w - d);
            if (extendable)
                extend(e.target, w);
            stack_.pop_back();
        }
    }

    void record(std::size_t target, double cost) {
        Candidate c;
        c.target = target;
        c.cost = cost;
        c.hops = stack_.size();
        for (auto ei : stack_) {
            const auto &prov = net_.edge(ei).provenance;
            c.provenance.insert(c.provenance.end(), prov.begin(), prov.end());
        }
        auto key = provenanceKey(c.provenance);
        auto it = index_.find(key);
        if (it != index_.end()) {
            // Same original path reached through composites: keep the
            // representation with the fewest hops (the existing edge).
            if (c.hops < found_[it->second].hops)
                found_[it->second] = std::move(c);
            return;
        }
        if (produced_.fetch_add(1) + 1 > params_.maxEdges)
            throw ResourceError(fmt::format("completion exceeds the cap of {} edges",
                                            params_.maxEdges));
        index_.emplace(std::move(key), found_.size());
        found_.push_back(std::move(c));
    }

    const Network &net_;
    const CompletionParams &params_;
    const std::vector<double> &bound_;
    std::atomic<std::size_t> &produced_;
    std::vector<std::size_t> stack_;
    std::vector<Candidate> found_;
    std::unordered_map<std::string, std::size_t> index_;
};

bool provenanceLess(const std::vector<std::string> &a, const std::vector<std::string> &b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const std::string &x, const std::string &y) {
                                            return naturalLess(x, y);
                                        });
}

std::string joinProvenance(const std::vector<std::string> &prov) {
    return fmt::format("{}", fmt::join(prov, ","));
}

} // namespace

CompletedNetwork vComplete(const Network &net, const CompletionParams &params) {
    if (!std::isfinite(params.cutoff) || !std::isfinite(params.penalty))
        throw InputError("completion cutoff and penalty must be finite");

    rejectNonpositiveCycles(net, params.penalty);
    const auto bound = continuationBound(net, params.penalty);

    const std::size_t n = net.nodeCount();
    std::vector<std::vector<Candidate>> perSource(n);
    std::atomic<std::size_t> produced{0};
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;

    auto worker = [&] {
        SourceEnumerator enumerator(net, params, bound, produced);
        for (std::size_t s = next++; s < n; s = next++) {
            try {
                perSource[s] = enumerator.run(s);
            } catch (...) {
                std::lock_guard lock(failureMutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };

    const unsigned threads = std::min<unsigned>(threadCount(), static_cast<unsigned>(n));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<Edge> edges;
    for (std::size_t s = 0; s < n; ++s)
        for (auto &c : perSource[s]) {
            Edge e;
            e.id = joinProvenance(c.provenance);
            e.source = s;
            e.target = c.target;
            e.cost = c.cost;
            e.provenance = std::move(c.provenance);
            edges.push_back(std::move(e));
        }
    std::sort(edges.begin(), edges.end(), [](const Edge &a, const Edge &b) {
        return provenanceLess(a.provenance, b.provenance);
    });

    return {Network::fromEdges(net.nodes(), std::move(edges)), params};
}

bool isVComplete(const Network &net, const CompletionParams &params) {
    // Completing the single-hop links reproduces every admissible path once.
    // Re-completing `net` itself would revisit each path through all of its
    // splits into composite edges.
    std::vector<EdgeSpec> links;
    for (const auto &e : net.edges())
        if (e.hops() == 1)
            links.push_back({net.nodes()[e.source], net.nodes()[e.target], e.cost, e.id, e.provenance});
    const auto completed = vComplete(Network::build(net.nodes(), std::move(links)), params);
    if (completed.network.edgeCount() != net.edgeCount())
        return false;

    std::unordered_map<std::string, double> produced;
    for (const auto &e : completed.network.edges())
        produced.emplace(provenanceKey(e.provenance), e.cost);
    for (const auto &e : net.edges()) {
        auto it = produced.find(provenanceKey(e.provenance));
        if (it == produced.end())
            return false;
        if (std::abs(it->second - e.cost) > 1e-9 * std::max(1.0, std::abs(e.cost)))
            return false;
        produced.erase(it);
    }
    return produced.empty();
}

} // namespace netcoh
