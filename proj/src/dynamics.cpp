#include <netcoh/dynamics.hpp>
#include <netcoh/error.hpp>

#include <fmt/format.h>

#include <cmath>

namespace netcoh {

namespace {

bool hasZeroLine(const Matrix &m, Orientation which) {
    const auto sums = which == Orientation::Row ? m.rowSums() : m.colSums();
    for (double s : sums)
        if (!(s > 0.0))
            return true;
    return false;
}

StochasticChain normalizeLines(Matrix a, Orientation which, std::string tag, bool phantom) {
    const auto sums = which == Orientation::Row ? a.rowSums() : a.colSums();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            a(i, j) /= which == Orientation::Row ? sums[i] : sums[j];
    return {std::move(a), which, std::move(tag), true, phantom, std::nullopt};
}

void checkSquare(const Matrix &m) {
    if (!m.isSquare() || m.rows() == 0)
        throw InputError("capacity matrix must be square and nonempty");
}

} // namespace

Matrix uniformPreference(std::size_t n) { return Matrix(n, n, 1.0 / static_cast<double>(n)); }

Matrix personalizedPreference(std::span<const double> weights, std::size_t states, Orientation o) {
    if (weights.size() > states)
        throw InputError(fmt::format("personalization has {} weights for {} states", weights.size(), states));
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InputError("personalization weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0))
        throw InputError("personalization weights sum to zero");
    Matrix p(states, states);
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t t = 0; t < weights.size(); ++t) {
            if (o == Orientation::Row)
                p(s, t) = weights[t] / total;
            else
                p(t, s) = weights[t] / total;
        }
    return p;
}

Matrix fixDangling(const Matrix &capacity, Orientation which, const DanglingOptions &options,
                   bool &phantom) {
    checkSquare(capacity);
    phantom = false;
    if (!hasZeroLine(capacity, which))
        return capacity;

    const double link = capacityOf(options.fixCost);
    const std::size_t n = capacity.rows();
    switch (options.policy) {
    case DanglingPolicy::Reject:
        throw InputError(which == Orientation::Row ? "node without out-links (dangling policy: reject)"
                                                   : "node without in-links (dangling policy: reject)");
    case DanglingPolicy::Complete: {
        Matrix fixed = capacity;
        for (double &v : fixed.data())
            v += link;
        return fixed;
    }
    case DanglingPolicy::Phantom: {
        Matrix fixed(n + 1, n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                fixed(i, j) = capacity(i, j);
            fixed(i, n) = link;
            fixed(n, i) = link;
        }
        phantom = true;
        return fixed;
    }
    }
    return capacity;
}

StochasticChain forward(const CapacityMatrix &capacity, const DanglingOptions &options) {
    bool phantom = false;
    auto a = fixDangling(capacity.entries, Orientation::Row, options, phantom);
    return normalizeLines(std::move(a), Orientation::Row, "forward", phantom);
}

StochasticChain backward(const CapacityMatrix &capacity, const DanglingOptions &options) {
    bool phantom = false;
    auto a = fixDangling(capacity.entries, Orientation::Column, options, phantom);
    return normalizeLines(std::move(a), Orientation::Column, "backward", phantom);
}

StochasticChain forwardOut(const CapacityMatrix &capacity, const DanglingOptions &options) {
    bool phantom = false;
    Matrix a = fixDangling(capacity.entries, Orientation::Row, options, phantom);
    const auto out = a.rowSums();
    const double total = a.sum();
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            s(i, j) = a(i, j) * out[j] / (out[i] * total);
    return {std::move(s), Orientation::Row, "forward-out", false, phantom, std::nullopt};
}

StochasticChain backwardIn(const CapacityMatrix &capacity, const DanglingOptions &options) {
    bool phantom = false;
    Matrix a = fixDangling(capacity.entries, Orientation::Column, options, phantom);
    const auto in = a.colSums();
    const double total = a.sum();
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            s(i, j) = in[i] * a(i, j) / (total * in[j]);
    return {std::move(s), Orientation::Column, "backward-in", false, phantom, std::nullopt};
}

StochasticChain teleport(const StochasticChain &chain, const TeleportParams &params) {
    if (!(params.damping > 0.0 && params.damping < 1.0))
        throw InputError(fmt::format("damping must lie strictly inside (0,1), got {}", params.damping));

    const std::size_t n = chain.size();
    Matrix p = params.preference ? *params.preference : uniformPreference(n);
    if (p.rows() != n || p.cols() != n)
        throw InputError(fmt::format("preference matrix must be {}x{}", n, n));
    const auto sums = chain.orientation == Orientation::Row ? p.rowSums() : p.colSums();
    for (double s : sums)
        if (std::abs(s - 1.0) > 1e-9)
            throw InputError("preference matrix is not stochastic in the chain's orientation");
    for (double v : p.data())
        if (v < 0.0)
            throw InputError("preference matrix has negative entries");

    StochasticChain out = chain;
    if (!chain.normalized) {
        out.teleport = TeleportParams{params.damping, std::move(p)};
        return out;
    }
    const double d = params.damping;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.entries(i, j) = d * chain.entries(i, j) + (1.0 - d) * p(i, j);
    out.tag = chain.tag + "+teleport";
    return out;
}

} // namespace netcoh
