#pragma once

#include <netcoh/matrix.hpp>

#include <cstddef>
#include <string_view>
#include <vector>

namespace netcoh {

/// Worker count: NETCOH_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned threadCount();

/// Adjacency-list view of the support of a nonnegative matrix.
struct Digraph {
    std::vector<std::vector<std::size_t>> adjacency;

    static Digraph support(const Matrix &m);
    std::size_t size() const noexcept { return adjacency.size(); }
};

bool stronglyConnected(const Digraph &g);

/// Period of a strongly connected digraph: gcd of all cycle lengths.
std::size_t period(const Digraph &g);

/// Orders strings with embedded numbers numerically ("e2" < "e10").
bool naturalLess(std::string_view a, std::string_view b);

} // namespace netcoh
