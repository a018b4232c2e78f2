#include <netcoh/error.hpp>
#include <netcoh/ranking.hpp>
#include <netcoh/support.hpp>

#include <fmt/format.h>

#include <cmath>

namespace netcoh {

namespace {

double l1Normalize(std::vector<double> &v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    if (s > 0.0)
        for (double &x : v)
            x /= s;
    return s;
}

bool strictlyPositive(const Matrix &m) {
    for (double v : m.data())
        if (!(v > 0.0))
            return false;
    return true;
}

std::vector<double> step(const Matrix &m, Orientation o, std::span<const double> x) {
    return o == Orientation::Row ? leftMultiply(x, m) : rightMultiply(m, x);
}

} // namespace

PowerResult powerIterate(const std::function<std::vector<double>(std::span<const double>)> &op,
                         std::vector<double> start, const PowerOptions &options, bool lazy) {
    l1Normalize(start);
    PowerResult result;
    auto &x = start;
    for (std::size_t it = 1; it <= options.maxIter; ++it) {
        auto y = op(x);
        const double lambda = l1Normalize(y);
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw NumericError("power iteration collapsed to the zero vector");
        double residual = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            residual += std::abs(y[i] - x[i]);
        if (residual <= options.tol) {
            result.vector = std::move(x);
            result.eigenvalue = lambda;
            result.iterations = it;
            result.residual = residual;
            return result;
        }
        if (lazy) {
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] = 0.5 * (x[i] + y[i]);
        } else {
            x = std::move(y);
        }
    }
    throw NumericError(
        fmt::format("power iteration did not converge within {} iterations", options.maxIter));
}

Distribution stationary(const StochasticChain &chain, const PowerOptions &options) {
    const Matrix &m = chain.entries;
    if (!m.isSquare() || m.rows() == 0)
        throw InputError("chain must be square and nonempty");
    for (double v : m.data())
        if (v < 0.0 || !std::isfinite(v))
            throw InputError("chain has negative or non-finite entries");

    const std::size_t n = m.rows();
    const Orientation o = chain.orientation;

    // Support of the effective transition operator, used for the
    // uniqueness and periodicity checks.
    Matrix support = m;
    if (chain.teleport) {
        const Matrix &p = *chain.teleport->preference;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                support(i, j) += p(i, j);
    }
    bool lazy = false;
    if (!strictlyPositive(support)) {
        const auto g = Digraph::support(support);
        if (!stronglyConnected(g))
            throw NumericError(fmt::format(
                "non-unique stationary distribution: chain '{}' is reducible", chain.tag));
        lazy = period(g) > 1;
    }

    std::function<std::vector<double>(std::span<const double>)> op;
    if (chain.teleport) {
        const double d = chain.teleport->damping;
        const Matrix &p = *chain.teleport->preference;
        op = [&m, &p, o, d](std::span<const double> x) {
            auto y = step(m, o, x);
            l1Normalize(y);
            const auto jump = step(p, o, x);
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] = d * y[i] + (1.0 - d) * jump[i];
            return y;
        };
    } else {
        op = [&m, o](std::span<const double> x) { return step(m, o, x); };
    }

    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    PowerResult result;
    try {
        result = powerIterate(op, uniform, options, lazy);
    } catch (const NumericError &) {
        if (lazy)
            throw;
        // Nearly periodic chains (tiny fix-up links) stall; averaging damps the oscillation.
        result = powerIterate(op, uniform, options, true);
    }

    Distribution dist;
    dist.label = chain.tag;
    dist.iterations = result.iterations;
    dist.residual = result.residual;
    if (chain.teleport) {
        double lambda = 0.0;
        for (double v : step(m, o, result.vector))
            lambda += v;
        dist.eigenvalue = lambda;
    } else {
        dist.eigenvalue = result.eigenvalue;
    }
    dist.values = std::move(result.vector);
    return dist;
}

Distribution rankOf(const StochasticChain &chain, const RankOptions &options) {
    if ((options.personalization || options.preference) && !options.damping)
        throw InputError("personalization needs a damping factor");
    std::optional<Matrix> preference;
    if (options.preference) {
        if (chain.phantom)
            throw InputError("a teleport matrix cannot be combined with the phantom dangling policy");
        preference = chain.orientation == Orientation::Row ? *options.preference : options.preference->transposed();
    } else if (options.personalization) {
        preference = personalizedPreference(*options.personalization, chain.size(), chain.orientation);
    }
    Distribution dist = options.damping
                            ? stationary(teleport(chain, {*options.damping, std::move(preference)}),
                                         options.power)
                            : stationary(chain, options.power);
    if (chain.phantom) {
        dist.values.pop_back();
        l1Normalize(dist.values);
    }
    dist.label = chain.tag;
    return dist;
}

Distribution pullRank(const CapacityMatrix &capacity, const RankOptions &options) {
    auto d = rankOf(forward(capacity, options.dangling), options);
    d.label = "pull";
    return d;
}

Distribution pushRank(const CapacityMatrix &capacity, const RankOptions &options) {
    auto d = rankOf(backward(capacity, options.dangling), options);
    d.label = "push";
    return d;
}

Distribution forwardOutRank(const CapacityMatrix &capacity, const RankOptions &options) {
    return rankOf(forwardOut(capacity, options.dangling), options);
}

Distribution backwardInRank(const CapacityMatrix &capacity, const RankOptions &options) {
    return rankOf(backwardIn(capacity, options.dangling), options);
}

JointDistribution expectedFlow(const Distribution &forwardOut, const Distribution &backwardIn) {
    if (forwardOut.size() != backwardIn.size())
        throw InputError("expected flow: rank vectors differ in length");
    const std::size_t n = forwardOut.size();
    JointDistribution flow{Matrix::square(n), "expected-flow"};
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            flow.values(j, k) = forwardOut[j] * backwardIn[k];
    return flow;
}

} // namespace netcoh
