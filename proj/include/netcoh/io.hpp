#pragma once

#include <netcoh/distribution.hpp>
#include <netcoh/matrix.hpp>
#include <netcoh/network.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace netcoh {

/// Shortest text that reads back to the same double (17 significant digits).
std::string formatDouble(double v);
/// Strict parse of a finite double; throws InputError mentioning `what`.
double parseDouble(const std::string &text, const std::string &what);

/**
 * Edge list: one `source<TAB>target<TAB>cost[<TAB>provenance]` record per
 * line, `#` comments, and `@node <id>` declarations. Node order is order of
 * first appearance. Without a provenance column edges are named e0, e1, ...;
 * with one, the comma-joined provenance is the edge id. Errors carry the
 * line number.
 */
Network readEdgeList(std::istream &in, const std::string &sourceName = "<input>");
Network readEdgeListFile(const std::filesystem::path &path);

/// Writes every node as an `@node` line first so node order survives a round trip.
void writeEdgeList(std::ostream &out, const Network &net, bool withProvenance);

struct LabeledMatrix {
    std::vector<std::string> rowLabels;
    std::vector<std::string> colLabels;
    Matrix values;
};

/// TSV with a header row of column labels (first cell empty) and a label
/// column in front of every row.
void writeMatrixTsv(std::ostream &out, const LabeledMatrix &m);
LabeledMatrix readMatrixTsv(std::istream &in);

/// {"nodes": [...], "rows": [[...], ...]}; square matrices over one label set.
nlohmann::json matrixToJson(const std::vector<std::string> &nodes, const Matrix &m);
LabeledMatrix matrixFromJson(const nlohmann::json &j);

/// `node<TAB>rank`, sorted by descending rank, ties in node order.
void writeRanksTsv(std::ostream &out, const std::vector<std::string> &nodes, const Distribution &rank);

/// Generic TSV: a header row plus data rows of equal width.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Table readTable(std::istream &in);
void writeTable(std::ostream &out, const Table &table);

std::vector<std::string> splitTabs(const std::string &line);

} // namespace netcoh
