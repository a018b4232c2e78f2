#include "oracles.hpp"

#include <netcoh/error.hpp>
#include <netcoh/network.hpp>

#include <doctest.h>

#include <random>

using namespace netcoh;

namespace {

Network twoNode(double xy, double yx) {
    return Network::build({"x", "y"}, {{"x", "y", xy, {}, {}}, {"y", "x", yx, {}, {}}});
}

} // namespace

TEST_CASE("build validates nodes and edges") {
    const auto lone = Network::build({"x"}, {});
    CHECK(lone.nodeCount() == 1);
    CHECK(lone.edgeCount() == 0);

    const auto pair = Network::build({"x", "y"}, {{"x", "y", 1.0, {}, {}}});
    CHECK(pair.edgeCount() == 1);
    CHECK(pair.edge(0).id == "e0");
    CHECK(pair.edge(0).provenance == std::vector<std::string>{"e0"});

    CHECK_THROWS_WITH_AS(Network::build({"x", "y"}, {{"x", "z", 1.0, {}, {}}}),
                         doctest::Contains("unknown node"), InputError);
    CHECK_THROWS_AS(Network::build({}, {}), InputError);
    CHECK_THROWS_AS(Network::build({"x", "x"}, {}), InputError);
    CHECK_THROWS_AS(Network::build({"x"}, {{"x", "x", INFINITY, {}, {}}}), InputError);
    CHECK_THROWS_AS(Network::build({"x"}, {{"x", "x", 1.0, "e", {}}, {"x", "x", 2.0, "e", {}}}), InputError);
}

TEST_CASE("parallel edges and self-loops are kept") {
    const auto net = Network::build({"x", "y"}, {{"x", "y", 1, {}, {}}, {"x", "y", 1, {}, {}}, {"x", "x", 0, {}, {}}});
    CHECK(net.edgesBetween(0, 1).size() == 2);
    CHECK(net.edgesBetween(0, 0).size() == 1);
    CHECK(net.outEdges(0).size() == 3);
}

TEST_CASE("capacity matrix") {
    CHECK(capacityMatrix(Network::build({"x", "y"}, {{"x", "y", 2, {}, {}}})).entries(0, 1) == 0.25);
    CHECK(capacityMatrix(Network::build({"x", "y"}, {{"x", "y", 0, {}, {}}})).entries(0, 1) == 1.0);
    const auto parallel = Network::build({"x", "y"}, {{"x", "y", 1, {}, {}}, {"x", "y", 1, {}, {}}});
    CHECK(capacityMatrix(parallel).entries(0, 1) == 1.0);

    // payoffs give capacities above one
    CHECK(capacityOf(-1.0) == 2.0);
    CHECK(capacityOf(3.0) < capacityOf(2.0));
    CHECK(capacityOf(3.0) == doctest::Approx(capacityOf(2.0) / 2));
}

TEST_CASE("capacity distribution") {
    SUBCASE("complete 2-node graph is uniform") {
        std::vector<EdgeSpec> e;
        for (auto s : {"x", "y"})
            for (auto t : {"x", "y"})
                e.push_back({s, t, 0, {}, {}});
        const auto d = capacityDistribution(capacityMatrix(Network::build({"x", "y"}, e)));
        for (double v : d.joint.values.data())
            CHECK(v == 0.25);
        CHECK(d.outRank == std::vector<double>{0.5, 0.5});
        CHECK(d.inRank == std::vector<double>{0.5, 0.5});
    }
    SUBCASE("2-cycle") {
        const auto d = capacityDistribution(capacityMatrix(twoNode(0, 0)));
        CHECK(d.joint.values(0, 1) == 0.5);
        CHECK(d.joint.values(1, 0) == 0.5);
        CHECK(d.joint.values(0, 0) == 0.0);
        CHECK(d.joint.values(1, 1) == 0.0);
    }
    SUBCASE("unequal 2-cycle") {
        const auto d = capacityDistribution(capacityMatrix(twoNode(0, 1)));
        CHECK(d.joint.values(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
        CHECK(d.joint.values(1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("edgeless network has no distribution") {
        CHECK_THROWS_AS(capacityDistribution(capacityMatrix(Network::build({"x"}, {}))), Error);
    }
}

TEST_CASE("traffic bias") {
    SUBCASE("2-cycle") {
        const auto u = trafficBias(capacityDistribution(capacityMatrix(twoNode(0, 0))).joint.values).entries;
        CHECK(u(0, 0) == -0.25);
        CHECK(u(0, 1) == 0.25);
        CHECK(u(1, 0) == 0.25);
        CHECK(u(1, 1) == -0.25);
    }
    SUBCASE("product-form joint has no bias") {
        const std::vector<double> r{0.1, 0.2, 0.3, 0.4}, c{0.25, 0.05, 0.5, 0.2};
        Matrix joint(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                joint(i, j) = r[i] * c[j];
        CHECK(trafficBias(joint).entries.maxAbs() <= 1e-12);
    }
    SUBCASE("random graphs: zero sum, entries inside [-1,1]") {
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 50; ++rep) {
            const auto net = oracle::randomNetwork(rng, 2 + rep % 7, 0.5, -2, 3);
            if (net.edgeCount() == 0)
                continue;
            const auto u = trafficBias(capacityDistribution(capacityMatrix(net)).joint.values).entries;
            CHECK(std::abs(u.sum()) <= 1e-12);
            CHECK(u.maxAbs() <= 1.0);
        }
    }
}

TEST_CASE("cohesion and adhesion") {
    const auto net = Network::build({"x", "y", "u", "w"}, {{"x", "y", 0, {}, {}},
                                                           {"y", "x", 0, {}, {}},
                                                           {"u", "w", 0, {}, {}},
                                                           {"w", "u", 0, {}, {}}});
    const auto u = trafficBias(capacityDistribution(capacityMatrix(net)).joint.values).entries;
    const std::vector<std::size_t> xy{0, 1}, all{0, 1, 2, 3}, uw{2, 3}, single{2};
    CHECK(cohesion(u, xy) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(adhesion(u, xy) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(std::abs(cohesion(u, all)) <= 1e-12);
    CHECK(adhesion(u, all) == 0.0);
    CHECK(cohesion(u, single) == u(2, 2));
    CHECK(cohesion(u, {}) == 0.0);
    CHECK(adhesion(u, {}) == 0.0);

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto g = oracle::randomNetwork(rng, 6, 0.5, 0, 3);
        if (g.edgeCount() == 0)
            continue;
        const auto b = trafficBias(capacityDistribution(capacityMatrix(g)).joint.values).entries;
        std::vector<std::size_t> in, out;
        for (std::size_t i = 0; i < 6; ++i)
            (rng() % 2 ? in : out).push_back(i);
        CHECK(std::abs(adhesion(b, in) - adhesion(b, out)) <= 1e-12);
    }
}
