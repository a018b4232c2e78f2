#include <netcoh/error.hpp>
#include <netcoh/io.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace netcoh {

std::string formatDouble(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parseDouble(const std::string &text, const std::string &what) {
    double v = 0.0;
    const char *first = text.data();
    const char *last = first + text.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty())
        throw InputError(fmt::format("{}: cannot parse '{}' as a number", what, text));
    if (!std::isfinite(v))
        throw InputError(fmt::format("{}: non-finite value '{}'", what, text));
    return v;
}

std::vector<std::string> splitTabs(const std::string &line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos)
            break;
        start = tab + 1;
    }
    return out;
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> splitCommas(const std::string &s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

} // namespace

Network readEdgeList(std::istream &in, const std::string &sourceName) {
    std::vector<std::string> nodes;
    std::unordered_set<std::string> seen;
    std::vector<EdgeSpec> edges;
    auto declare = [&](const std::string &id) {
        if (seen.insert(id).second)
            nodes.push_back(id);
    };

    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto where = fmt::format("{}:{}", sourceName, lineNo);
        const auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#')
            continue;
        if (stripped.rfind("@node", 0) == 0) {
            const auto id = trim(stripped.substr(5));
            if (id.empty() || (stripped.size() > 5 && stripped[5] != ' ' && stripped[5] != '\t'))
                throw InputError(fmt::format("{}: malformed @node declaration", where));
            declare(id);
            continue;
        }

        auto fields = splitTabs(line);
        if (fields.size() != 3 && fields.size() != 4)
            throw InputError(fmt::format(
                "{}: expected source<TAB>target<TAB>cost[<TAB>provenance], got {} field(s)", where,
                fields.size()));
        if (fields[0].empty() || fields[1].empty())
            throw InputError(fmt::format("{}: empty node id", where));

        EdgeSpec spec;
        spec.source = fields[0];
        spec.target = fields[1];
        spec.cost = parseDouble(trim(fields[2]), where);
        if (fields.size() == 4) {
            const auto prov = trim(fields[3]);
            if (prov.empty())
                throw InputError(fmt::format("{}: empty provenance", where));
            spec.id = prov;
            spec.provenance = splitCommas(prov);
            for (const auto &p : spec.provenance)
                if (p.empty())
                    throw InputError(fmt::format("{}: empty edge id in provenance", where));
        }
        declare(spec.source);
        declare(spec.target);
        edges.push_back(std::move(spec));
    }
    try {
        return Network::build(std::move(nodes), std::move(edges));
    } catch (const InputError &e) {
        throw InputError(fmt::format("{}: {}", sourceName, e.what()));
    }
}

Network readEdgeListFile(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open '{}'", path.string()));
    return readEdgeList(in, path.string());
}

void writeEdgeList(std::ostream &out, const Network &net, bool withProvenance) {
    for (const auto &node : net.nodes())
        out << "@node " << node << '\n';
    for (const auto &e : net.edges()) {
        out << net.nodes()[e.source] << '\t' << net.nodes()[e.target] << '\t' << formatDouble(e.cost);
        if (withProvenance) {
            out << '\t';
            for (std::size_t k = 0; k < e.provenance.size(); ++k)
                out << (k ? "," : "") << e.provenance[k];
        }
        out << '\n';
    }
}

void writeMatrixTsv(std::ostream &out, const LabeledMatrix &m) {
    for (const auto &label : m.colLabels)
        out << '\t' << label;
    out << '\n';
    for (std::size_t i = 0; i < m.values.rows(); ++i) {
        out << m.rowLabels[i];
        for (std::size_t j = 0; j < m.values.cols(); ++j)
            out << '\t' << formatDouble(m.values(i, j));
        out << '\n';
    }
}

LabeledMatrix readMatrixTsv(std::istream &in) {
    const auto table = readTable(in);
    if (table.header.empty() || !table.header.front().empty())
        throw InputError("matrix TSV: header must start with an empty cell");
    LabeledMatrix m;
    m.colLabels.assign(table.header.begin() + 1, table.header.end());
    m.values = Matrix(table.rows.size(), m.colLabels.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto &row = table.rows[i];
        m.rowLabels.push_back(row[0]);
        for (std::size_t j = 1; j < row.size(); ++j)
            m.values(i, j - 1) = parseDouble(row[j], fmt::format("matrix TSV row {}", i + 2));
    }
    return m;
}

nlohmann::json matrixToJson(const std::vector<std::string> &nodes, const Matrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {{"nodes", nodes}, {"rows", rows}};
}

LabeledMatrix matrixFromJson(const nlohmann::json &j) {
    try {
        LabeledMatrix m;
        m.rowLabels = j.at("nodes").get<std::vector<std::string>>();
        m.colLabels = m.rowLabels;
        const auto &rows = j.at("rows");
        m.values = Matrix(rows.size(), m.colLabels.size());
        if (rows.size() != m.rowLabels.size())
            throw InputError("matrix JSON: row count does not match node count");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto r = rows[i].get<std::vector<double>>();
            if (r.size() != m.colLabels.size())
                throw InputError("matrix JSON: ragged row");
            std::copy(r.begin(), r.end(), m.values.row(i).begin());
        }
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw InputError(fmt::format("matrix JSON: {}", e.what()));
    }
}

void writeRanksTsv(std::ostream &out, const std::vector<std::string> &nodes, const Distribution &rank) {
    std::vector<std::size_t> order(rank.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rank[a] > rank[b]; });
    for (auto i : order)
        out << nodes[i] << '\t' << formatDouble(rank[i]) << '\n';
}

Table readTable(std::istream &in) {
    Table t;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto fields = splitTabs(line);
        if (lineNo == 1) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw InputError(fmt::format("TSV line {}: expected {} fields, got {}", lineNo,
                                         t.header.size(), fields.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

void writeTable(std::ostream &out, const Table &table) {
    auto emit = [&out](const std::vector<std::string> &fields) {
        for (std::size_t k = 0; k < fields.size(); ++k)
            out << (k ? "\t" : "") << fields[k];
        out << '\n';
    };
    emit(table.header);
    for (const auto &row : table.rows)
        emit(row);
}

} // namespace netcoh
