#include <netcoh/error.hpp>
#include <netcoh/philox.hpp>
#include <netcoh/support.hpp>
#include <netcoh/surfer.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace netcoh {

namespace {

constexpr std::uint64_t kBatchesPerWalker = 50;

/// Inverse-CDF draw from a cumulative table; the last entry is the total.
std::size_t draw(std::span<const double> cumulative, double u) {
    const double target = u * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end())
        --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

struct WalkerTally {
    std::vector<std::uint64_t> counts;
    std::vector<std::vector<std::uint64_t>> batches;
    std::vector<std::uint64_t> batchSizes;
};

template <class Start, class Step>
SimResult runWalkers(std::size_t states, const SimConfig &config, Start start, Step next) {
    const std::uint64_t burn = config.effectiveBurnIn();
    if (config.walkers < 1)
        throw InputError("simulation needs at least one walker");
    if (config.steps <= burn)
        throw InputError("simulation steps must exceed the burn-in");

    const std::uint64_t counted = config.steps - burn;
    const std::uint64_t batchCount = std::min(kBatchesPerWalker, counted);
    const std::uint64_t batchLength = counted / batchCount;

    std::vector<WalkerTally> tallies(config.walkers);
    std::atomic<std::uint32_t> nextWalker{0};
    std::exception_ptr failure;
    std::mutex failureMutex;

    auto work = [&] {
        for (std::uint32_t w = nextWalker++; w < config.walkers; w = nextWalker++) {
            try {
                PhiloxStream rng(config.seed, w);
                auto &tally = tallies[w];
                tally.counts.assign(states, 0);
                tally.batches.assign(batchCount, std::vector<std::uint64_t>(states, 0));
                tally.batchSizes.assign(batchCount, 0);
                std::size_t state = start(rng);
                for (std::uint64_t t = 0; t < config.steps; ++t) {
                    state = next(state, rng);
                    if (t < burn)
                        continue;
                    const std::uint64_t b = std::min((t - burn) / batchLength, batchCount - 1);
                    ++tally.counts[state];
                    ++tally.batches[b][state];
                    ++tally.batchSizes[b];
                }
            } catch (...) {
                std::lock_guard lock(failureMutex);
                if (!failure)
                    failure = std::current_exception();
                nextWalker = config.walkers;
            }
        }
    };

    const unsigned threads = std::min<unsigned>(threadCount(), config.walkers);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    SimResult result;
    result.seed = config.seed;
    result.rng = Philox4x32::name;
    result.counts.assign(states, 0);
    for (const auto &tally : tallies)
        for (std::size_t s = 0; s < states; ++s)
            result.counts[s] += tally.counts[s];

    const double total = static_cast<double>(counted) * config.walkers;
    result.frequencies.resize(states);
    for (std::size_t s = 0; s < states; ++s)
        result.frequencies[s] = static_cast<double>(result.counts[s]) / total;

    const double nb = static_cast<double>(batchCount) * config.walkers;
    result.standardErrors.assign(states, 0.0);
    if (nb > 1) {
        for (std::size_t s = 0; s < states; ++s) {
            double ss = 0.0;
            for (const auto &tally : tallies)
                for (std::uint64_t b = 0; b < batchCount; ++b) {
                    const double f = static_cast<double>(tally.batches[b][s]) /
                                     static_cast<double>(tally.batchSizes[b]);
                    ss += (f - result.frequencies[s]) * (f - result.frequencies[s]);
                }
            result.standardErrors[s] = std::sqrt(ss / (nb - 1.0) / nb);
        }
    }
    return result;
}

} // namespace

SimResult simulate(const StochasticChain &chain, const SimConfig &config) {
    if (!chain.normalized || chain.teleport)
        throw InputError("simulation needs a materialized stochastic chain");
    const std::size_t n = chain.size();
    if (n == 0)
        throw InputError("simulation needs a nonempty chain");

    // cumulative[s] holds the outgoing distribution of state s
    std::vector<std::vector<double>> cumulative(n, std::vector<double>(n));
    for (std::size_t s = 0; s < n; ++s) {
        double acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += chain.orientation == Orientation::Row ? chain.entries(s, t) : chain.entries(t, s);
            cumulative[s][t] = acc;
        }
        if (!(acc > 0.0))
            throw InputError(fmt::format("state {} has no outgoing probability", s));
    }

    return runWalkers(
        n, config,
        [n](PhiloxStream &rng) {
            return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
        },
        [&cumulative](std::size_t s, PhiloxStream &rng) { return draw(cumulative[s], rng.uniform()); });
}

SimResult simulatePairs(const AttractionOperator &op, const SimConfig &config,
                        std::optional<double> damping) {
    if (damping && !(*damping > 0.0 && *damping < 1.0))
        throw InputError("damping must lie strictly inside (0,1)");
    const std::size_t n = op.size();
    const Matrix &a = op.capacity();
    const Matrix twoHop = a * a;

    // Two-stage draw from (i,ℓ): j ∝ A_ij·(A²)_jℓ, then k ∝ A_jk·A_kℓ.
    std::vector<std::vector<double>> firstStage(n * n, std::vector<double>(n));
    std::vector<std::vector<double>> secondStage(n * n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += a(i, j) * twoHop(j, l);
                firstStage[i * n + l][j] = acc;
            }
            acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += a(i, k) * a(k, l);
                secondStage[i * n + l][k] = acc;
            }
        }

    std::vector<std::size_t> live;
    for (std::size_t p = 0; p < n * n; ++p)
        if (damping || a(p / n, p % n) > 0.0)
            live.push_back(p);
    if (live.empty())
        throw InputError("attraction dynamics: capacity matrix is all zero");

    const Matrix &den = op.denominators();
    return runWalkers(
        n * n, config,
        [&live](PhiloxStream &rng) {
            const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(live.size()));
            return live[std::min(idx, live.size() - 1)];
        },
        [&, n](std::size_t pair, PhiloxStream &rng) {
            const std::size_t i = pair / n, l = pair % n;
            if (damping && (rng.uniform() >= *damping || !(den(i, l) > 0.0))) {
                const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n * n));
                return std::min(idx, n * n - 1);
            }
            if (!(den(i, l) > 0.0))
                throw NumericError(fmt::format("walker reached pair ({}, {}) with no three-hop route", i, l));
            const std::size_t j = draw(firstStage[pair], rng.uniform());
            const std::size_t k = draw(secondStage[j * n + l], rng.uniform());
            return j * n + k;
        });
}

} // namespace netcoh
