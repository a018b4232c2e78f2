#include "oracles.hpp"

#include <netcoh/error.hpp>
#include <netcoh/path_network.hpp>

#include <doctest.h>

#include <random>

using namespace netcoh;

namespace {

RankOptions exact() {
    RankOptions o;
    o.damping.reset();
    return o;
}

AttractionOptions exactDynamics() { return {std::nullopt, {}}; }

CompletedNetwork triangle() {
    const auto net = Network::build({"x", "y", "z"}, {{"x", "y", 1, {}, {}}, {"y", "z", 1, {}, {}}, {"z", "x", 1, {}, {}}});
    return vComplete(net, {5, 1});
}

CompletedNetwork complete(std::mt19937_64 &rng, std::size_t n) {
    return vComplete(oracle::randomComplete(rng, n, 0.5, 2.5), {2.0, 1.0});
}

double rowSum(const Matrix &m, std::size_t i) {
    double s = 0.0;
    for (double v : m.row(i))
        s += v;
    return s;
}

} // namespace

TEST_CASE("path network of a lone edge") {
    const auto net = vComplete(Network::build({"x", "y"}, {{"x", "y", 1, {}, {}}}), {5, 1});
    const auto pn = buildPathNetwork(net);
    CHECK(pn.graph.nodeCount() == 1);
    CHECK(pn.graph.edgeCount() == 0);
    const auto report = lemma1Check(net);
    CHECK(report.maxDeviation() == 0.0);
    CHECK(report.pairViolations == 0);
}

TEST_CASE("path network requires a v-complete input") {
    const auto raw = Network::build({"x", "y", "z"}, {{"x", "y", 1, {}, {}}, {"y", "z", 1, {}, {}}});
    CHECK_THROWS_AS(buildPathNetwork(CompletedNetwork{raw, {3, 1}}), InputError);
}

TEST_CASE("triangle path network matches the quadruple enumeration") {
    const auto net = triangle();
    REQUIRE(net.network.edgeCount() == 9);
    const auto pn = buildPathNetwork(net);
    REQUIRE(pn.graph.edgeCount() > 0);
    const auto brute = oracle::detourCapacity(net.network, net.params.penalty, pn.cutoff);
    std::size_t count = 0;
    for (double v : brute.data())
        count += v > 0.0;
    CHECK(pn.graph.edgeCount() == count);
    CHECK(maxAbsDiff(capacityMatrix(pn.graph).entries, brute) <= 1e-15);
    CHECK(lemma1Check(net).maxDeviation() <= 1e-10);

    const auto ranks = pathRanks(pn, exact());
    // rows without detours get the complete-policy links
    const auto fixed = forward(capacityMatrix(pn.graph));
    const auto dense = oracle::stationary(fixed.entries, Orientation::Row);
    for (std::size_t e = 0; e < dense.size(); ++e)
        CHECK(std::abs(ranks.attraction[e] - dense[e]) <= 1e-10);

    // regrouping by endpoints
    const auto rhat = nodeAttraction(net.network, ranks.attraction);
    Matrix grouped(3, 3);
    REQUIRE(rhat.values.rows() == 3);
    for (std::size_t e = 0; e < net.network.edgeCount(); ++e)
        grouped(net.network.edge(e).source, net.network.edge(e).target) += ranks.attraction[e];
    CHECK(rhat.values == grouped);

    // bias by hand
    const auto fo = forwardOutRank(capacityMatrix(net.network)), bi = backwardInRank(capacityMatrix(net.network));
    const auto u = attractionBias(rhat, fo, bi);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(u(j, k) == rhat.values(j, k) - fo[j] * bi[k]);
    CHECK(std::abs(u.sum()) <= 1e-12);
}

TEST_CASE("path edge cost") {
    // a: i→l (3), f0: i→j (1), b: j→k (1), f1: k→l (1), d = 1
    const auto net = vComplete(
        Network::build({"i", "j", "k", "l"},
                       {{"i", "l", 3, "a", {}}, {"i", "j", 1, "f0", {}}, {"j", "k", 1, "b", {}}, {"k", "l", 1, "f1", {}}}),
        {2.5, 1});
    REQUIRE(net.network.edgeCount() == 4);
    const auto pn = buildPathNetwork(net, 2.5);
    bool seen = false;
    for (const auto &f : pn.detours)
        if (net.network.edge(f.avoided).id == "a" && net.network.edge(f.attracting).id == "b") {
            CHECK(f.cost == 2.0);
            CHECK(net.network.edge(f.firstLeg).id == "f0");
            CHECK(net.network.edge(f.lastLeg).id == "f1");
            seen = true;
        }
    CHECK(seen);
}

TEST_CASE("path ranks of symmetric and trivial networks") {
    const auto loop = vComplete(Network::build({"x"}, {{"x", "x", 1, {}, {}}}), {1.5, 1});
    const auto pn = buildPathNetwork(loop);
    REQUIRE(pn.graph.nodeCount() == 1);
    CHECK(pathRanks(pn, exact()).attraction[0] == 1.0);

    // complete graph with equal costs: every detour costs the same
    std::vector<EdgeSpec> e;
    for (auto s : {"x", "y", "z"})
        for (auto t : {"x", "y", "z"})
            e.push_back({s, t, 1, {}, {}});
    const auto sym = vComplete(Network::build({"x", "y", "z"}, e), {2.5, 1});
    REQUIRE(sym.network.edgeCount() == 9);
    const auto r = pathRanks(buildPathNetwork(sym), exact());
    for (double v : r.attraction.values)
        CHECK(v == doctest::Approx(1.0 / 9).epsilon(1e-12));
    const auto rhat = attractionStationary(capacityMatrix(sym.network), exactDynamics());
    for (double v : rhat.values.data())
        CHECK(v == doctest::Approx(1.0 / 9).epsilon(1e-12));
}

TEST_CASE("node attraction regroups parallel edges") {
    const auto net = Network::build({"x", "y"}, {{"x", "y", 1, {}, {}}, {"x", "y", 2, {}, {}}, {"y", "x", 1, {}, {}}});
    Distribution r;
    r.values = {0.2, 0.3, 0.5};
    const auto rhat = nodeAttraction(net, r);
    CHECK(rhat.values(0, 1) == 0.5);
    CHECK(rhat.values(1, 0) == 0.5);
    CHECK_THROWS_AS(nodeAttraction(net, Distribution{{0.5, 0.5}, "", 1, 0, 0}), InputError);
}

TEST_CASE("attraction operator") {
    SUBCASE("matches the quadruple sum and conserves mass") {
        std::mt19937_64 rng(61);
        for (int rep = 0; rep < 10; ++rep) {
            Matrix a = oracle::randomBias(rng, 4, 0.05, 2.0);
            Matrix m = oracle::randomBias(rng, 4, 0.0, 1.0);
            const AttractionOperator op(a);
            const auto t = op.apply(m);
            CHECK(maxAbsDiff(t, oracle::attractionStep(a, m)) <= 1e-12);
            CHECK(std::abs(t.sum() - m.sum()) <= 1e-12);
        }
    }
    SUBCASE("single self-loop is the identity") {
        const AttractionOperator op(Matrix(1, 1, 0.5));
        CHECK(op.apply(Matrix(1, 1, 1.0))(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("pairs without three-hop routes are excluded") {
        Matrix a(2, 2);
        a(0, 1) = 1;
        const AttractionOperator op(a);
        CHECK(op.excludedPairs().size() == 4);
    }
    SUBCASE("2-node complete graph against the dense eigen-solve") {
        Matrix a(2, 2);
        a(0, 0) = 1;
        a(0, 1) = 0.5;
        a(1, 0) = 0.25;
        a(1, 1) = 2;
        const auto r = attractionStationary({a, {}}, exactDynamics());
        CHECK(maxAbsDiff(r.values, oracle::attractionStationary(a)) <= 1e-10);
    }
}

TEST_CASE("proposition 1: path ranks and attraction dynamics agree") {
    std::mt19937_64 rng(67);
    for (int rep = 0; rep < 8; ++rep) {
        const auto net = complete(rng, 2 + rep % 3);
        const auto viaPaths = nodeAttraction(net.network, pathRanks(buildPathNetwork(net), exact()).attraction);
        const auto viaDynamics = attractionStationary(capacityMatrix(net.network), exactDynamics());
        CHECK(maxAbsDiff(viaPaths.values, viaDynamics.values) <= 1e-8);
        CHECK(maxAbsDiff(viaDynamics.values, oracle::attractionStationary(capacityMatrix(net.network).entries)) <=
              1e-8);
    }
}

TEST_CASE("damped attraction dynamics") {
    std::mt19937_64 rng(71);
    Matrix a = oracle::randomBias(rng, 3, 0.1, 1.0);
    a(2, 0) = a(2, 1) = a(2, 2) = 0.0; // node 2 is a sink, so (2,ℓ) has no three-hop route
    const auto r = attractionStationary({a, {}}, {0.85, {}});
    CHECK(std::abs(r.values.sum() - 1.0) <= 1e-12);
    for (double v : r.values.data())
        CHECK(v >= 0.15 / 9 - 1e-15);
}

TEST_CASE("lemma 1 closed forms") {
    CHECK(lemma1Check(triangle()).maxDeviation() <= 1e-10);

    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 10; ++rep) {
        const auto net = vComplete(oracle::randomNetwork(rng, 2 + rep % 4, 0.6, 0, 3), {2.5, double(rep % 2)});
        const auto report = lemma1Check(net);
        CHECK(report.maxDeviation() <= 1e-10);
        CHECK(report.pairViolations == 0);
    }

    // too small a path cutoff drops detours that the closed form counts
    const auto net = triangle();
    const auto report = lemma1Check(net, 0.5);
    CHECK(report.pairViolations > 0);
    CHECK_FALSE(report.holds(1e-10));
}

TEST_CASE("closed-form row sums") {
    const auto net = triangle();
    const auto cf = closedFormPathCapacity(net);
    const auto a = capacityMatrix(net.network);
    const Matrix three = a.entries * a.entries * a.entries;
    for (std::size_t e = 0; e < net.network.edgeCount(); ++e) {
        const auto &edge = net.network.edge(e);
        CHECK(rowSum(cf, e) ==
              doctest::Approx(three(edge.source, edge.target) / (4.0 * a.edgeCapacity[e])).epsilon(1e-14));
    }
}

TEST_CASE("marginals") {
    SUBCASE("complete uniform graph") {
        const auto a = CapacityMatrix{Matrix(3, 3, 1.0), {}};
        const auto rhat = attractionStationary(a, exactDynamics());
        const auto report = marginalCheck(rhat, forwardOutRank(a, exact()), backwardInRank(a, exact()));
        CHECK(report.maxDeviation() <= 1e-14);
    }
    SUBCASE("rank-one capacities satisfy the marginal identities") {
        std::mt19937_64 rng(79);
        for (int rep = 0; rep < 5; ++rep) {
            const std::size_t n = 2 + rep % 3;
            Matrix a(n, n);
            std::uniform_real_distribution<double> u(0.2, 2.0);
            std::vector<double> xs(n), ys(n);
            for (auto &v : xs)
                v = u(rng);
            for (auto &v : ys)
                v = u(rng);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    a(i, j) = xs[i] * ys[j];
            const CapacityMatrix cap{a, {}};
            const auto rhat = attractionStationary(cap, exactDynamics());
            CHECK(marginalCheck(rhat, forwardOutRank(cap, exact()), backwardInRank(cap, exact())).maxDeviation() <=
                  1e-8);
        }
    }
    SUBCASE("general capacities break them (known counterexample)") {
        Matrix a(2, 2);
        a(0, 0) = 1;
        a(0, 1) = 0.5;
        a(1, 0) = 0.25;
        a(1, 1) = 2;
        const CapacityMatrix cap{a, {}};
        const auto rhat = oracle::attractionStationary(a);
        const auto [fo, lf] = oracle::perron(forwardOut(cap).entries, Orientation::Row);
        const auto rows = rhat.rowSums();
        CHECK(std::abs(rows[0] - fo[0]) > 1e-3);
    }
}

TEST_CASE("mutual information") {
    Distribution r, c;
    r.values = {0.1, 0.2, 0.3, 0.4};
    c.values = {0.4, 0.1, 0.25, 0.25};
    JointDistribution product{Matrix(4, 4), ""};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            product.values(i, j) = r[i] * c[j];
    CHECK(std::abs(mutualInformation(product, r, c)) <= 1e-12);

    JointDistribution diag{Matrix(4, 4), ""};
    for (std::size_t i = 0; i < 4; ++i)
        diag.values(i, i) = r[i];
    CHECK(mutualInformation(diag, r, r) == doctest::Approx(entropyBits(r.values)).epsilon(1e-12));

    Distribution u;
    u.values = {0.25, 0.25, 0.25, 0.25};
    JointDistribution uniformDiag{Matrix(4, 4), ""};
    for (std::size_t i = 0; i < 4; ++i)
        uniformDiag.values(i, i) = 0.25;
    CHECK(std::abs(mutualInformation(uniformDiag, u, u) - 2.0) <= 1e-12);

    Distribution point;
    point.values = {1, 0, 0, 0};
    CHECK_THROWS_WITH_AS(mutualInformation(uniformDiag, point, u), doctest::Contains("infinite divergence"),
                         NumericError);

    // nonnegative, and zero exactly when the bias vanishes
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 10; ++rep) {
        const auto net = complete(rng, 3);
        const auto a = capacityMatrix(net.network);
        const auto rhat = nodeAttraction(net.network, pathRanks(buildPathNetwork(net)).attraction);
        const auto fo = forwardOutRank(a), bi = backwardInRank(a);
        const double mi = mutualInformation(rhat, fo, bi);
        CHECK(mi >= -1e-12);
        CHECK(std::abs(mi - oracle::mutualInformation(rhat.values, fo.values, bi.values)) <= 1e-12);
        CHECK((attractionBias(rhat, fo, bi).maxAbs() > 1e-9) == (mi > 1e-15));
    }
}
