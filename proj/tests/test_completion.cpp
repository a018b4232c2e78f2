#include "oracles.hpp"

#include <netcoh/completion.hpp>
#include <netcoh/error.hpp>
#include <netcoh/support.hpp>

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace netcoh;

namespace {

Network chain3() {
    return Network::build({"x", "y", "z"}, {{"x", "y", 1, {}, {}}, {"y", "z", 1, {}, {}}});
}

std::string key(const Edge &e) {
    std::string k;
    for (const auto &p : e.provenance)
        k += (k.empty() ? "" : ",") + p;
    return k;
}

} // namespace

TEST_CASE("single edge completes to itself") {
    const auto net = Network::build({"x", "y"}, {{"x", "y", 1, {}, {}}});
    const auto c = vComplete(net, {10, 1});
    REQUIRE(c.network.edgeCount() == 1);
    CHECK(c.network.edge(0).id == "e0");
    CHECK(isVComplete(net, {10, 1}));
}

TEST_CASE("chain gains its composite when the cutoff allows") {
    const auto c = vComplete(chain3(), {3, 1});
    REQUIRE(c.network.edgeCount() == 3);
    const auto &e = c.network.edges();
    const auto it = std::find_if(e.begin(), e.end(), [](const Edge &x) { return x.hops() == 2; });
    REQUIRE(it != e.end());
    CHECK(it->id == "e0,e1");
    CHECK(it->cost == 3.0);
    CHECK(c.network.nodes()[it->source] == "x");
    CHECK(c.network.nodes()[it->target] == "z");

    CHECK(vComplete(chain3(), {2, 1}).network.edgeCount() == 2);
    CHECK_FALSE(isVComplete(chain3(), {3, 1}));
    CHECK(isVComplete(c.network, {3, 1}));
}

TEST_CASE("nonpositive cycles are refused with the cycle listed") {
    const auto net = Network::build({"x", "y"}, {{"x", "y", 0, {}, {}}, {"y", "x", 0, {}, {}}});
    try {
        vComplete(net, {5, 0});
        FAIL("expected divergence");
    } catch (const DivergentCompletion &e) {
        CHECK(std::string(e.what()).find("divergent completion") != std::string::npos);
        CHECK(e.cycle().size() == 3);
        CHECK(e.cycle().front() == e.cycle().back());
        CHECK(e.exitCode() == 3);
    }
    // the penalty makes the same cycle positive
    CHECK_NOTHROW(vComplete(net, {5, 1}));
    // a negative self-loop diverges on its own
    CHECK_THROWS_AS(vComplete(Network::build({"x"}, {{"x", "x", -1, {}, {}}}), {5, 0.5}), DivergentCompletion);
}

TEST_CASE("payoff edges are composed") {
    // x→y costs 2, y→z pays 1.5: the composite costs 1 + 2 − 1.5 = 1.5
    const auto net = Network::build({"x", "y", "z"}, {{"x", "y", 2, {}, {}}, {"y", "z", -1.5, {}, {}}});
    const auto c = vComplete(net, {1.5, 1});
    REQUIRE(c.network.edgeCount() == 3);
    CHECK(c.network.edge(0).id == "e0");
    CHECK(c.network.edge(1).id == "e0,e1");
    CHECK(c.network.edge(1).cost == 1.5);
    CHECK(vComplete(net, {1.4, 1}).network.edgeCount() == 2);
}

TEST_CASE("input edges above the cutoff are kept") {
    const auto net = Network::build({"x", "y"}, {{"x", "y", 9, {}, {}}, {"y", "x", 1, {}, {}}});
    const auto c = vComplete(net, {2, 1}).network;
    CHECK(c.edgeCount() == 2);
    CHECK(isVComplete(net, {2, 1}));
}

TEST_CASE("composite costs and provenance chains") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        const auto net = oracle::randomNetwork(rng, 2 + rep % 5, 0.5, 0.2, 2.5);
        const double d = rep % 2;
        const auto c = vComplete(net, {4, d});
        for (const auto &e : c.network.edges()) {
            double sum = 0.0;
            std::size_t at = e.source;
            for (const auto &p : e.provenance) {
                const auto &hop = net.edge(std::stoul(p.substr(1)));
                CHECK(hop.source == at);
                at = hop.target;
                sum += hop.cost;
            }
            CHECK(at == e.target);
            CHECK(std::abs(e.cost - ((e.hops() - 1) * d + sum)) <= 1e-12);
            if (e.hops() > 1)
                CHECK(withinCutoff(e.cost, 4));
        }
    }
}

TEST_CASE("completion matches brute-force walk enumeration") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 40; ++rep) {
        const double d = rep % 3 == 0 ? 0.0 : 1.0;
        const auto net = oracle::randomNetwork(rng, 2 + rep % 5, 0.45, d == 0.0 ? 0.3 : 0.0, 4.5);
        const double v = 3.0 + (rep % 4) * 0.5;
        const auto expected = oracle::completion(net, v, d);
        const auto got = vComplete(net, {v, d}).network;
        REQUIRE(got.edgeCount() == expected.size());
        for (const auto &e : got.edges()) {
            const auto it = expected.find(key(e));
            REQUIRE(it != expected.end());
            CHECK(e.source == it->second.source);
            CHECK(e.target == it->second.target);
            CHECK(std::abs(e.cost - it->second.cost) <= 1e-12);
        }
    }
}

TEST_CASE("n-hop provenances match powers of the adjacency structure") {
    // with v large and strictly positive costs, every walk of ≤ 4 hops is admitted
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        const auto net = oracle::randomNetwork(rng, 4, 0.4, 1.0, 1.0);
        const auto c = vComplete(net, {4 * 1.0 + 3 * 1.0, 1}).network;
        const std::size_t n = net.nodeCount();
        Matrix adj(n, n);
        for (const auto &e : net.edges())
            adj(e.source, e.target) += 1.0;
        Matrix power = adj;
        for (std::size_t hops = 1; hops <= 4; ++hops) {
            Matrix count(n, n);
            for (const auto &e : c.edges())
                if (e.hops() == hops)
                    count(e.source, e.target) += 1.0;
            CHECK(count == power);
            power = power * adj;
        }
    }
}

TEST_CASE("idempotence on positive-cycle graphs") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 30; ++rep) {
        const auto net = oracle::randomNetwork(rng, 2 + rep % 5, 0.5, 0.0, 3.0);
        const CompletionParams p{3.5, 1};
        const auto once = vComplete(net, p).network;
        const auto twice = vComplete(once, p).network;
        REQUIRE(once.edgeCount() == twice.edgeCount());
        for (std::size_t e = 0; e < once.edgeCount(); ++e) {
            CHECK(once.edge(e).id == twice.edge(e).id);
            CHECK(std::abs(once.edge(e).cost - twice.edge(e).cost) <= 1e-12);
        }
        CHECK(isVComplete(once, p));
    }
}

TEST_CASE("edge cap and parameter validation") {
    const auto net = Network::build({"x"}, {{"x", "x", 0.1, {}, {}}});
    CHECK_THROWS_AS(vComplete(net, {50, 0, 100}), ResourceError);
    CHECK_THROWS_AS(vComplete(net, {INFINITY, 0}), InputError);
    CHECK_THROWS_AS(vComplete(net, {1, NAN}), InputError);
}

TEST_CASE("output is sorted by provenance") {
    std::mt19937_64 rng(37);
    const auto net = oracle::randomNetwork(rng, 5, 0.6, 0.5, 1.5);
    const auto c = vComplete(net, {3, 0.5}).network;
    for (std::size_t e = 1; e < c.edgeCount(); ++e)
        CHECK_FALSE(std::lexicographical_compare(c.edge(e).provenance.begin(), c.edge(e).provenance.end(),
                                                 c.edge(e - 1).provenance.begin(), c.edge(e - 1).provenance.end(),
                                                 naturalLess));
}
