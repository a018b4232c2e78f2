#include <netcoh/concepts.hpp>
#include <netcoh/error.hpp>
#include <netcoh/io.hpp>
#include <netcoh/path_network.hpp>
#include <netcoh/pipeline.hpp>

#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace netcoh {

using nlohmann::json;
namespace fs = std::filesystem;

DanglingPolicy parseDangling(const std::string &name) {
    if (name == "complete")
        return DanglingPolicy::Complete;
    if (name == "phantom")
        return DanglingPolicy::Phantom;
    if (name == "reject")
        return DanglingPolicy::Reject;
    throw InputError(fmt::format("unknown dangling policy '{}' (complete, phantom, reject)", name));
}

std::string danglingName(DanglingPolicy policy) {
    switch (policy) {
    case DanglingPolicy::Complete:
        return "complete";
    case DanglingPolicy::Phantom:
        return "phantom";
    case DanglingPolicy::Reject:
        return "reject";
    }
    return "complete";
}

void PipelineConfig::validate() const {
    auto need = [](bool ok, const char *what) {
        if (!ok)
            throw InputError(fmt::format("config: {}", what));
    };
    need(std::isfinite(cutoff), "cutoff must be finite");
    need(std::isfinite(penalty), "penalty must be finite");
    need(!pathCutoff || std::isfinite(*pathCutoff), "path_cutoff must be finite or null");
    need(damping > 0.0 && damping < 1.0, "damping must lie strictly inside (0,1)");
    need(std::isfinite(fixCost), "fix_cost must be finite");
    need(std::isfinite(epsilon), "epsilon must be finite");
    need(!epsilonGrid.empty(), "epsilon_grid must not be empty");
    for (double e : epsilonGrid)
        need(std::isfinite(e), "epsilon_grid entries must be finite");
    need(tol > 0.0, "tol must be positive");
    need(maxIter > 0, "max_iter must be positive");
    need(maxEdges > 0, "max_edges must be positive");
    need(steps > 0, "steps must be positive");
    need(walkers > 0, "walkers must be positive");
    need(std::isfinite(injectFault), "inject_fault must be finite");
}

CompletionParams PipelineConfig::completion() const { return {cutoff, penalty, maxEdges}; }

RankOptions PipelineConfig::ranking() const {
    RankOptions o;
    o.dangling = {dangling, fixCost};
    o.damping = exact ? std::nullopt : std::optional<double>(damping);
    o.power = {tol, maxIter};
    return o;
}

SimConfig PipelineConfig::simulation() const {
    SimConfig s;
    s.steps = steps;
    s.seed = seed;
    s.walkers = walkers;
    return s;
}

json toJson(const PipelineConfig &cfg) {
    return {
        {"input", cfg.input},
        {"cutoff", cfg.cutoff},
        {"penalty", cfg.penalty},
        {"path_cutoff", cfg.pathCutoff ? json(*cfg.pathCutoff) : json(nullptr)},
        {"damping", cfg.damping},
        {"exact", cfg.exact},
        {"dangling", danglingName(cfg.dangling)},
        {"fix_cost", cfg.fixCost},
        {"epsilon", cfg.epsilon},
        {"epsilon_grid", cfg.epsilonGrid},
        {"tol", cfg.tol},
        {"max_iter", cfg.maxIter},
        {"max_edges", cfg.maxEdges},
        {"seed", cfg.seed},
        {"steps", cfg.steps},
        {"walkers", cfg.walkers},
        {"output_dir", cfg.outputDir},
        {"inject_fault", cfg.injectFault},
    };
}

PipelineConfig configFromJson(const json &j, const PipelineConfig &base) {
    if (!j.is_object())
        throw InputError("config: expected a JSON object");
    PipelineConfig cfg = base;
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "input")
                cfg.input = value.get<std::string>();
            else if (key == "cutoff")
                cfg.cutoff = value.get<double>();
            else if (key == "penalty")
                cfg.penalty = value.get<double>();
            else if (key == "path_cutoff")
                cfg.pathCutoff = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            else if (key == "damping")
                cfg.damping = value.get<double>();
            else if (key == "exact")
                cfg.exact = value.get<bool>();
            else if (key == "dangling")
                cfg.dangling = parseDangling(value.get<std::string>());
            else if (key == "fix_cost")
                cfg.fixCost = value.get<double>();
            else if (key == "epsilon")
                cfg.epsilon = value.get<double>();
            else if (key == "epsilon_grid")
                cfg.epsilonGrid = value.get<std::vector<double>>();
            else if (key == "tol")
                cfg.tol = value.get<double>();
            else if (key == "max_iter")
                cfg.maxIter = value.get<std::size_t>();
            else if (key == "max_edges")
                cfg.maxEdges = value.get<std::size_t>();
            else if (key == "seed")
                cfg.seed = value.get<std::uint64_t>();
            else if (key == "steps")
                cfg.steps = value.get<std::uint64_t>();
            else if (key == "walkers")
                cfg.walkers = value.get<std::uint32_t>();
            else if (key == "output_dir")
                cfg.outputDir = value.get<std::string>();
            else if (key == "inject_fault")
                cfg.injectFault = value.get<double>();
            else
                throw InputError(fmt::format("config: unknown key '{}'", key));
        }
    } catch (const json::exception &e) {
        throw InputError(fmt::format("config: {}", e.what()));
    }
    cfg.validate();
    return cfg;
}

PipelineConfig loadConfigFile(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open config '{}'", path.string()));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.what()));
    }
    auto cfg = configFromJson(j);
    if (!cfg.input.empty() && fs::path(cfg.input).is_relative())
        cfg.input = (path.parent_path() / cfg.input).lexically_normal().string();
    return cfg;
}

std::string sha256Hex(const std::string &bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw ResourceError("sha256 failed");
    std::string hex;
    for (unsigned int k = 0; k < len; ++k)
        hex += fmt::format("{:02x}", digest[k]);
    return hex;
}

std::string sha256File(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256Hex(ss.str());
}

namespace {

template <class F>
auto runStage(const std::string &name, F &&body) -> decltype(body()) {
    try {
        return body();
    } catch (const DivergentCompletion &e) {
        throw DivergentCompletion(fmt::format("stage {}: {}", name, e.what()), e.cycle());
    } catch (const Error &e) {
        const auto what = fmt::format("stage {}: {}", name, e.what());
        switch (e.kind()) {
        case ErrorKind::Input:
            throw InputError(what);
        case ErrorKind::Numeric:
            throw NumericError(what);
        case ErrorKind::Resource:
            throw ResourceError(what);
        }
        throw;
    }
}

json finiteOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json chainJson(const StochasticChain &c, const std::vector<std::string> &nodes) {
    auto states = nodes;
    if (c.phantom)
        states.push_back("<phantom>");
    auto m = matrixToJson(states, c.entries);
    return {{"tag", c.tag},
            {"orientation", c.orientation == Orientation::Row ? "row" : "column"},
            {"normalized", c.normalized},
            {"phantom", c.phantom},
            {"nodes", m["nodes"]},
            {"rows", m["rows"]}};
}

json conceptJson(const ConceptSet &c, const std::vector<std::string> &nodes) {
    std::vector<std::string> members;
    for (auto i : c.members)
        members.push_back(nodes[i]);
    return {{"members", members}, {"cohesion", finiteOrNull(c.cohesion)}};
}

void writeFile(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out)
        throw ResourceError(fmt::format("write to '{}' failed", path.string()));
}

std::string isoNow() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

PipelineReport runPipeline(const PipelineConfig &cfg) {
    cfg.validate();
    if (cfg.input.empty())
        throw InputError("config: no input file");
    const fs::path dir(cfg.outputDir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw InputError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    PipelineReport report;
    auto emit = [&](const std::string &name, const std::string &content) {
        writeFile(dir / name, content);
        report.stageFiles.push_back(dir / name);
    };
    const auto ranking = cfg.ranking();

    const Network net = runStage("ingest", [&] { return readEdgeListFile(cfg.input); });
    {
        std::ostringstream out;
        writeEdgeList(out, net, true);
        emit("01-network.tsv", out.str());
    }

    const CompletedNetwork completed = runStage("complete", [&] { return vComplete(net, cfg.completion()); });
    const auto &g = completed.network;
    const auto &nodes = g.nodes();
    {
        std::ostringstream out;
        writeEdgeList(out, g, true);
        emit("02-completion.tsv", out.str());
    }

    const CapacityMatrix capacity = runStage("dynamics", [&] {
        auto cap = capacityMatrix(g);
        json j{{"capacity", matrixToJson(nodes, cap.entries)}, {"chains", json::array()}};
        for (auto build : {&forward, &backward, &forwardOut, &backwardIn})
            j["chains"].push_back(chainJson(build(cap, ranking.dangling), nodes));
        emit("03-dynamics.json", j.dump(2) + "\n");
        return cap;
    });

    struct Ranks {
        Distribution pull, push, fo, bi;
    };
    const Ranks ranks = runStage("ranks", [&] {
        Ranks r{pullRank(capacity, ranking), pushRank(capacity, ranking), forwardOutRank(capacity, ranking),
                backwardInRank(capacity, ranking)};
        Table t{{"node", "pull", "push", "forward_out", "backward_in"}, {}};
        for (std::size_t i = 0; i < nodes.size(); ++i)
            t.rows.push_back({nodes[i], formatDouble(r.pull[i]), formatDouble(r.push[i]),
                              formatDouble(r.fo[i]), formatDouble(r.bi[i])});
        std::ostringstream out;
        writeTable(out, t);
        emit("04-ranks.tsv", out.str());
        return r;
    });

    const PathRanks paths = runStage("path-network", [&] {
        const auto pn = buildPathNetwork(completed, cfg.pathCutoff, cfg.maxEdges);
        auto pr = pathRanks(pn, ranking);
        Table t{{"edge", "source", "target", "cost", "attraction", "avoidance"}, {}};
        for (std::size_t e = 0; e < g.edgeCount(); ++e) {
            const auto &edge = g.edge(e);
            t.rows.push_back({edge.id, nodes[edge.source], nodes[edge.target], formatDouble(edge.cost),
                              formatDouble(pr.attraction[e]), formatDouble(pr.avoidance[e])});
        }
        std::ostringstream out;
        writeTable(out, t);
        emit("05-path-network.tsv", out.str());
        return pr;
    });

    const Matrix bias = runStage("bias", [&] {
        const auto rhat = nodeAttraction(g, paths.attraction);
        auto upsilon = attractionBias(rhat, ranks.fo, ranks.bi);
        const auto traffic = trafficBias(capacityDistribution(capacity).joint.values);
        const double mi = mutualInformation(rhat, ranks.fo, ranks.bi);
        const auto marginals = marginalCheck(rhat, ranks.fo, ranks.bi);
        const AttractionOperator op(capacity.entries);
        json excluded = json::array();
        for (auto [i, j] : op.excludedPairs())
            excluded.push_back({nodes[i], nodes[j]});
        const auto flat = rhat.values.data();
        json j{
            {"node_attraction", matrixToJson(nodes, rhat.values)},
            {"attraction_bias", matrixToJson(nodes, upsilon)},
            {"traffic_bias", matrixToJson(nodes, traffic.entries)},
            {"mutual_information_bits", mi},
            {"entropy_bits",
             {{"node_attraction", entropyBits(std::vector<double>(flat.begin(), flat.end()))},
              {"forward_out", entropyBits(ranks.fo.values)},
              {"backward_in", entropyBits(ranks.bi.values)}}},
            {"marginal_deviation", {{"row", marginals.rowDeviation}, {"column", marginals.columnDeviation}}},
            {"excluded_pairs", excluded},
        };
        emit("06-bias.json", j.dump(2) + "\n");
        return upsilon;
    });

    runStage("concepts", [&] {
        json layers = json::array();
        for (const auto &layer : conceptSweep(bias, cfg.epsilonGrid)) {
            json cs = json::array();
            for (const auto &c : layer.concepts)
                cs.push_back(conceptJson(c, nodes));
            layers.push_back({{"epsilon", layer.epsilon}, {"concepts", cs}});
        }
        const auto cn = conceptAssociations(completed, epsilonConcepts(bias, cfg.epsilon), cfg.maxEdges);
        json concepts = json::array();
        for (const auto &c : cn.concepts)
            concepts.push_back(conceptJson(c, nodes));
        json assoc = json::array();
        for (const auto &a : cn.associations)
            assoc.push_back({{"from", a.from},
                             {"to", a.to},
                             {"a", g.edge(a.a).id},
                             {"b", g.edge(a.b).id},
                             {"first_leg", g.edge(a.firstLeg).id},
                             {"last_leg", g.edge(a.lastLeg).id},
                             {"cost", a.cost}});
        json j{{"sweep", layers},
               {"epsilon", cfg.epsilon},
               {"concepts", concepts},
               {"associations", assoc},
               {"association_capacity", matrixToJson({}, cn.capacity)["rows"]}};
        emit("07-concepts.json", j.dump(2) + "\n");
    });

    json stages = json::array();
    for (const auto &f : report.stageFiles)
        stages.push_back({{"file", f.filename().string()}, {"sha256", sha256File(f)}});
    json manifest{
        {"tool", "netcoh"},
        {"versions",
         {{"netcoh", kVersion},
          {"compiler", __VERSION__},
          {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                        NLOHMANN_JSON_VERSION_PATCH)},
          {"fmt", FMT_VERSION}}},
        {"config", toJson(cfg)},
        {"inputs", json::array({{{"file", cfg.input}, {"sha256", sha256File(cfg.input)}}})},
        {"stages", stages},
        {"created", isoNow()},
    };
    report.manifest = dir / "manifest.json";
    writeFile(report.manifest, manifest.dump(2) + "\n");
    return report;
}

bool VerifyReport::passed() const {
    for (const auto &c : checks)
        if (!c.passed)
            return false;
    return true;
}

json VerifyReport::toJson() const {
    json arr = json::array();
    for (const auto &c : checks)
        arr.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"deviation", finiteOrNull(c.deviation)},
                       {"tolerance", c.tolerance},
                       {"detail", c.detail}});
    return {{"passed", passed()}, {"checks", arr}};
}

VerifyReport verify(const PipelineConfig &cfg) {
    cfg.validate();
    const Network net = runStage("ingest", [&] { return readEdgeListFile(cfg.input); });
    const CompletedNetwork completed = runStage("complete", [&] { return vComplete(net, cfg.completion()); });
    const auto &g = completed.network;
    const auto capacity = capacityMatrix(g);
    const auto ranking = cfg.ranking();
    RankOptions exactRanking = ranking;
    exactRanking.damping.reset();

    VerifyReport report;
    // A check that throws a numeric or resource error is reported as failed.
    auto check = [&](const std::string &name, double tolerance, auto &&measure) {
        CheckResult r{name, false, 0.0, tolerance, {}};
        try {
            r.deviation = measure(r.detail);
            r.passed = r.deviation <= tolerance;
        } catch (const Error &e) {
            r.deviation = std::numeric_limits<double>::infinity();
            r.detail = e.what();
        }
        report.checks.push_back(std::move(r));
    };

    check("completion_idempotent", 1e-12, [&](std::string &detail) {
        const auto again = vComplete(g, cfg.completion()).network;
        if (again.edgeCount() != g.edgeCount()) {
            detail = fmt::format("{} edges became {}", g.edgeCount(), again.edgeCount());
            return std::numeric_limits<double>::infinity();
        }
        double dev = 0.0;
        for (std::size_t e = 0; e < g.edgeCount(); ++e) {
            if (again.edge(e).id != g.edge(e).id) {
                detail = fmt::format("edge {} changed from {} to {}", e, g.edge(e).id, again.edge(e).id);
                return std::numeric_limits<double>::infinity();
            }
            dev = std::max(dev, std::abs(again.edge(e).cost - g.edge(e).cost));
        }
        return dev;
    });

    check("traffic_bias_zero_sum", 1e-12, [&](std::string &) {
        return std::abs(trafficBias(capacityDistribution(capacity).joint.values).entries.sum());
    });

    check("lemma1_closed_forms", 1e-10, [&](std::string &detail) {
        const auto r = lemma1Check(completed);
        detail = fmt::format("path cutoff {}, {} pair violation(s)", formatDouble(r.cutoff), r.pairViolations);
        return r.pairViolations ? std::numeric_limits<double>::infinity() : r.maxDeviation();
    });

    // Exact-mode quantities shared by the proposition and corollary checks.
    std::optional<JointDistribution> dynamicsRank;
    check("proposition1_equivalence", 1e-8, [&](std::string &) {
        const auto pn = buildPathNetwork(completed, std::nullopt, cfg.maxEdges);
        const auto viaPaths = nodeAttraction(g, pathRanks(pn, exactRanking).attraction);
        dynamicsRank = attractionStationary(capacity, {std::nullopt, exactRanking.power});
        return maxAbsDiff(viaPaths.values, dynamicsRank->values);
    });

    check("corollary1_marginals", 1e-8, [&](std::string &detail) {
        if (!dynamicsRank)
            dynamicsRank = attractionStationary(capacity, {std::nullopt, exactRanking.power});
        auto rhat = *dynamicsRank;
        if (cfg.injectFault != 0.0 && rhat.values.rows() > 1) {
            rhat.values(0, 0) += cfg.injectFault;
            rhat.values(1, 1) -= cfg.injectFault;
            detail = fmt::format("fault {} injected into the attraction bias", formatDouble(cfg.injectFault));
        }
        const auto r = marginalCheck(rhat, forwardOutRank(capacity, exactRanking),
                                     backwardInRank(capacity, exactRanking));
        return r.maxDeviation();
    });

    std::optional<double> mi;
    check("attraction_bias_zero_sum", 1e-12, [&](std::string &) {
        const auto pn = buildPathNetwork(completed, cfg.pathCutoff, cfg.maxEdges);
        const auto rhat = nodeAttraction(g, pathRanks(pn, ranking).attraction);
        const auto fo = forwardOutRank(capacity, ranking);
        const auto bi = backwardInRank(capacity, ranking);
        mi = mutualInformation(rhat, fo, bi);
        return std::abs(attractionBias(rhat, fo, bi).sum());
    });

    check("mutual_information_nonnegative", 1e-12, [&](std::string &detail) {
        if (!mi)
            throw NumericError("mutual information unavailable");
        detail = fmt::format("I = {} bits", formatDouble(*mi));
        return std::max(0.0, -*mi);
    });

    auto zScore = [](const SimResult &sim, std::span<const double> exact) {
        double worst = 0.0;
        for (std::size_t s = 0; s < exact.size(); ++s) {
            const double diff = std::abs(sim.frequencies[s] - exact[s]);
            const double z = sim.standardErrors[s] > 0.0 ? diff / sim.standardErrors[s]
                             : diff <= 1e-12          ? 0.0
                                                      : std::numeric_limits<double>::infinity();
            worst = std::max(worst, z);
        }
        return worst;
    };

    check("simulator_forward", 3.0, [&](std::string &detail) {
        auto chain = forward(capacity, ranking.dangling);
        if (ranking.damping)
            chain = teleport(chain, {*ranking.damping, std::nullopt});
        const auto exact = stationary(chain, ranking.power);
        const auto sim = simulate(chain, cfg.simulation());
        const double z = zScore(sim, exact.values);
        detail = fmt::format("max |z| over {} states, {} steps x {} walker(s), seed {}", exact.size(), cfg.steps,
                             cfg.walkers, cfg.seed);
        return z;
    });

    check("simulator_attraction", 3.0, [&](std::string &detail) {
        const AttractionOperator op(capacity.entries);
        const auto exact = attractionStationary(capacity, {ranking.damping, ranking.power});
        const auto sim = simulatePairs(op, cfg.simulation(), ranking.damping);
        const double z = zScore(sim, exact.values.data());
        detail = fmt::format("max |z| over {} pairs, {} steps x {} walker(s), seed {}", exact.values.data().size(),
                             cfg.steps, cfg.walkers, cfg.seed);
        return z;
    });

    return report;
}

} // namespace netcoh
