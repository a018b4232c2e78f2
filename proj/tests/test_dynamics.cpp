#include "oracles.hpp"

#include <netcoh/dynamics.hpp>
#include <netcoh/error.hpp>

#include <doctest.h>

#include <random>

using namespace netcoh;

namespace {

CapacityMatrix cap(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    Matrix m(n, n);
    std::size_t i = 0;
    for (const auto &r : rows) {
        std::size_t j = 0;
        for (double v : r)
            m(i, j++) = v;
        ++i;
    }
    return {m, {}};
}

CapacityMatrix cap(const Matrix &m) { return {m, {}}; }

} // namespace

TEST_CASE("forward chain") {
    SUBCASE("equal out-links split evenly") {
        const auto f = forward(cap({{0, 1, 1}, {1, 0, 0}, {1, 0, 0}}));
        CHECK(f.entries(0, 1) == 0.5);
        CHECK(f.entries(0, 2) == 0.5);
        CHECK(f.orientation == Orientation::Row);
    }
    SUBCASE("capacity-weighted split") {
        const auto f = forward(cap({{0, 1, 0.5}, {1, 0, 0}, {1, 0, 0}}));
        CHECK(f.entries(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
        CHECK(f.entries(0, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("sink row becomes uniform under the complete policy") {
        const auto f = forward(cap({{0, 1, 1}, {0, 0, 1}, {0, 0, 0}}));
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(f.entries(2, j) == doctest::Approx(1.0 / 3).epsilon(1e-15));
        CHECK_FALSE(f.phantom);
    }
    SUBCASE("phantom policy adds one state") {
        const auto f = forward(cap({{0, 1}, {0, 0}}), {DanglingPolicy::Phantom, 30});
        CHECK(f.size() == 3);
        CHECK(f.phantom);
        CHECK(f.entries(1, 2) == 1.0);
    }
    SUBCASE("reject policy") {
        CHECK_THROWS_AS(forward(cap({{0, 1}, {0, 0}}), {DanglingPolicy::Reject, 30}), InputError);
        CHECK_NOTHROW(forward(cap({{0, 1}, {1, 0}}), {DanglingPolicy::Reject, 30}));
    }
}

TEST_CASE("backward chain") {
    SUBCASE("sole in-edge") {
        const auto b = backward(cap({{0, 1}, {1, 0}}));
        CHECK(b.entries(0, 1) == 1.0);
        CHECK(b.orientation == Orientation::Column);
    }
    SUBCASE("capacity-weighted in-links") {
        const auto b = backward(cap({{0, 1, 0}, {1, 0, 1}, {0, 0.5, 0}}));
        CHECK(b.entries(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
        CHECK(b.entries(2, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("source column becomes uniform") {
        const auto b = backward(cap({{0, 1, 1}, {0, 0, 1}, {0, 1, 0}}));
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(b.entries(i, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
}

TEST_CASE("forward-out and backward-in raw scores") {
    const auto all = forwardOut(cap({{1, 1}, {1, 1}}));
    for (double v : all.entries.data())
        CHECK(v == 0.25);
    CHECK_FALSE(all.normalized);
    const auto cycle = forwardOut(cap({{0, 1}, {1, 0}}));
    CHECK(cycle.entries(0, 1) == 0.5);
    CHECK(backwardIn(cap({{0, 1}, {1, 0}})).entries(0, 1) == 0.5);

    // equal out-capacity everywhere: forward-out is proportional to forward row by row
    const auto a = cap({{0, 1, 1}, {2, 0, 0}, {0.5, 1.5, 0}});
    const auto fo = forwardOut(a), fw = forward(a);
    for (std::size_t i = 0; i < 3; ++i) {
        double ratio = -1;
        for (std::size_t j = 0; j < 3; ++j)
            if (fw.entries(i, j) > 0) {
                const double r = fo.entries(i, j) / fw.entries(i, j);
                if (ratio >= 0)
                    CHECK(r == doctest::Approx(ratio).epsilon(1e-14));
                ratio = r;
            }
    }
}

TEST_CASE("stochasticity and duality on random graphs") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 40; ++rep) {
        const auto net = oracle::randomNetwork(rng, 2 + rep % 9, 0.4, -1, 3);
        const auto a = capacityMatrix(net);
        const auto f = forward(a), b = backward(a);
        for (double s : f.entries.rowSums())
            CHECK(std::abs(s - 1.0) <= 1e-12);
        for (double s : b.entries.colSums())
            CHECK(std::abs(s - 1.0) <= 1e-12);

        const CapacityMatrix at{a.entries.transposed(), {}};
        CHECK(maxAbsDiff(b.entries, forward(at).entries.transposed()) <= 1e-14);
        CHECK(maxAbsDiff(forwardOut(a).entries, backwardIn(at).entries.transposed()) <= 1e-14);
    }
}

TEST_CASE("teleport") {
    SUBCASE("lower bound on every entry") {
        std::mt19937_64 rng(43);
        const auto net = oracle::randomNetwork(rng, 6, 0.3, 0, 3);
        const auto t = teleport(forward(capacityMatrix(net)), {0.85, std::nullopt});
        for (double v : t.entries.data())
            CHECK(v >= 0.15 / 6 - 1e-15);
    }
    SUBCASE("identity chain mixes to 3/4 and 1/4") {
        StochasticChain id{Matrix::identity(2), Orientation::Row, "id", true, false, std::nullopt};
        const auto t = teleport(id, {0.5, std::nullopt});
        CHECK(t.entries(0, 0) == 0.75);
        CHECK(t.entries(0, 1) == 0.25);
        CHECK(t.entries(1, 0) == 0.25);
        CHECK(t.entries(1, 1) == 0.75);
    }
    SUBCASE("teleporting into the chain itself changes nothing") {
        const auto f = forward(cap({{0, 1, 0.5}, {1, 0, 2}, {0.25, 1, 0}}));
        const auto t = teleport(f, {0.3, f.entries});
        CHECK(maxAbsDiff(t.entries, f.entries) <= 1e-15);
    }
    SUBCASE("parameter validation") {
        const auto f = forward(cap({{0, 1}, {1, 0}}));
        CHECK_THROWS_AS(teleport(f, {0.0, std::nullopt}), InputError);
        CHECK_THROWS_AS(teleport(f, {1.0, std::nullopt}), InputError);
        CHECK_THROWS_AS(teleport(f, {0.5, Matrix::identity(3)}), InputError);
        Matrix bad(2, 2, 0.7);
        CHECK_THROWS_AS(teleport(f, {0.5, bad}), InputError);
    }
    SUBCASE("raw chains defer the teleport") {
        const auto fo = forwardOut(cap({{0, 1}, {1, 1}}));
        const auto t = teleport(fo, {0.85, std::nullopt});
        CHECK(t.teleport.has_value());
        CHECK(t.entries == fo.entries);
    }
}

TEST_CASE("personalized preference matrices") {
    const std::vector<double> w{1, 0, 3};
    const auto row = personalizedPreference(w, 3, Orientation::Row);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(row(i, 0) == 0.25);
        CHECK(row(i, 2) == 0.75);
    }
    const auto col = personalizedPreference(w, 4, Orientation::Column);
    CHECK(col(2, 3) == 0.75);
    CHECK(col(3, 1) == 0.0);
    CHECK_THROWS_AS(personalizedPreference(std::vector<double>{0, 0}, 2, Orientation::Row), InputError);
    CHECK_THROWS_AS(personalizedPreference(std::vector<double>{-1, 2}, 2, Orientation::Row), InputError);
}
