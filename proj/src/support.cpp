#include <netcoh/support.hpp>

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <thread>

namespace netcoh {

unsigned threadCount() {
    if (const char *env = std::getenv("NETCOH_THREADS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Digraph Digraph::support(const Matrix &m) {
    Digraph g;
    g.adjacency.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) > 0.0)
                g.adjacency[i].push_back(j);
    return g;
}

namespace {

std::vector<std::size_t> bfsLevels(const std::vector<std::vector<std::size_t>> &adj) {
    constexpr auto unseen = static_cast<std::size_t>(-1);
    std::vector<std::size_t> level(adj.size(), unseen);
    if (adj.empty())
        return level;
    std::queue<std::size_t> q;
    level[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        for (auto v : adj[u])
            if (level[v] == unseen) {
                level[v] = level[u] + 1;
                q.push(v);
            }
    }
    return level;
}

} // namespace

bool stronglyConnected(const Digraph &g) {
    if (g.size() == 0)
        return false;
    constexpr auto unseen = static_cast<std::size_t>(-1);
    for (auto l : bfsLevels(g.adjacency))
        if (l == unseen)
            return false;
    std::vector<std::vector<std::size_t>> reversed(g.size());
    for (std::size_t u = 0; u < g.size(); ++u)
        for (auto v : g.adjacency[u])
            reversed[v].push_back(u);
    for (auto l : bfsLevels(reversed))
        if (l == unseen)
            return false;
    return true;
}

std::size_t period(const Digraph &g) {
    const auto level = bfsLevels(g.adjacency);
    std::size_t p = 0;
    for (std::size_t u = 0; u < g.size(); ++u)
        for (auto v : g.adjacency[u]) {
            if (level[u] == static_cast<std::size_t>(-1) || level[v] == static_cast<std::size_t>(-1))
                continue;
            const auto a = level[u] + 1;
            const auto b = level[v];
            p = std::gcd(p, a > b ? a - b : b - a);
        }
    return p == 0 ? 1 : p;
}

bool naturalLess(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
        const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
        if (da && db) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie])))
                ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je])))
                ++je;
            // compare numerically without overflow: strip zeros, then length, then text
            auto na = a.substr(i, ie - i);
            auto nb = b.substr(j, je - j);
            while (na.size() > 1 && na.front() == '0')
                na.remove_prefix(1);
            while (nb.size() > 1 && nb.front() == '0')
                nb.remove_prefix(1);
            if (na.size() != nb.size())
                return na.size() < nb.size();
            if (na != nb)
                return na < nb;
            if (ie - i != je - j)
                return ie - i < je - j;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j])
                return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

} // namespace netcoh
