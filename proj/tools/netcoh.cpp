#include <netcoh/concepts.hpp>
#include <netcoh/error.hpp>
#include <netcoh/io.hpp>
#include <netcoh/path_network.hpp>
#include <netcoh/pipeline.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>

using namespace netcoh;
using nlohmann::json;

namespace {

// Flags left unset fall back to the config file, then to built-in defaults.
/// Comma-separated reals, kept as one token so a following positional is not swallowed.
std::vector<double> parseGrid(const std::string &text, const char *what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parseDouble(text.substr(start, comma - start), what));
        if (comma == std::string::npos)
            return out;
        start = comma + 1;
    }
}

struct Overrides {
    std::string config;
    std::string input;
    std::optional<double> cutoff, penalty, pathCutoff, damping, fixCost, epsilon, tol, injectFault;
    std::optional<std::size_t> maxIter, maxEdges;
    std::optional<std::uint64_t> seed, steps;
    std::optional<std::uint32_t> walkers;
    std::optional<std::string> dangling, outputDir;
    bool exact = false;
    bool raw = false;
    std::string grid;

    PipelineConfig resolve() const {
        PipelineConfig cfg = config.empty() ? PipelineConfig{} : loadConfigFile(config);
        if (!input.empty())
            cfg.input = input;
        auto set = [](auto &field, const auto &opt) {
            if (opt)
                field = *opt;
        };
        set(cfg.cutoff, cutoff);
        set(cfg.penalty, penalty);
        if (pathCutoff)
            cfg.pathCutoff = pathCutoff;
        set(cfg.damping, damping);
        set(cfg.fixCost, fixCost);
        set(cfg.epsilon, epsilon);
        set(cfg.tol, tol);
        set(cfg.injectFault, injectFault);
        set(cfg.maxIter, maxIter);
        set(cfg.maxEdges, maxEdges);
        set(cfg.seed, seed);
        set(cfg.steps, steps);
        set(cfg.walkers, walkers);
        set(cfg.outputDir, outputDir);
        if (dangling)
            cfg.dangling = parseDangling(*dangling);
        if (exact)
            cfg.exact = true;
        if (!grid.empty())
            cfg.epsilonGrid = parseGrid(grid, "--grid");
        cfg.validate();
        if (cfg.input.empty())
            throw InputError("no input file (positional argument or config 'input')");
        return cfg;
    }
};

void addCommon(CLI::App *cmd, Overrides &o) {
    cmd->add_option("input", o.input, "Edge list (TSV)");
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--cutoff", o.cutoff, "Completion cutoff v");
    cmd->add_option("--penalty", o.penalty, "Composition penalty per extra hop");
    cmd->add_option("--max-edges", o.maxEdges, "Resource cap on derived edges");
}

void addDynamics(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--damping", o.damping, "Probability of following the chain");
    cmd->add_flag("--exact", o.exact, "Undamped stationary distributions");
    cmd->add_option("--dangling", o.dangling, "Dangling policy")
        ->check(CLI::IsMember({"complete", "phantom", "reject"}));
    cmd->add_option("--fixcost", o.fixCost, "Cost of links added by the complete policy");
    cmd->add_option("--tol", o.tol, "Power iteration tolerance (l1 residual)");
    cmd->add_option("--max-iter", o.maxIter, "Power iteration limit");
    cmd->add_flag("--raw", o.raw, "Use the input network as is, without completion");
}

struct Loaded {
    PipelineConfig cfg;
    CompletedNetwork net;
    CapacityMatrix capacity;
};

Loaded load(const Overrides &o) {
    Loaded l{o.resolve(), {}, {}};
    auto net = readEdgeListFile(l.cfg.input);
    l.net = o.raw ? CompletedNetwork{std::move(net), l.cfg.completion()} : vComplete(net, l.cfg.completion());
    l.capacity = capacityMatrix(l.net.network);
    return l;
}

struct Output {
    std::ofstream file;
    std::ostream *stream = &std::cout;
    explicit Output(const std::string &path) {
        if (path.empty() || path == "-")
            return;
        file.open(path, std::ios::binary);
        if (!file)
            throw InputError(fmt::format("cannot write '{}'", path));
        stream = &file;
    }
    std::ostream &operator*() { return *stream; }
};

// Either `node<TAB>weight` lines or a labeled N×N matrix TSV (header row
// starting with an empty cell). Matrix rows are stochastic: P_ij is i's trust in j.
void readPersonalization(const std::string &path, const Network &net, RankOptions &ranking) {
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open '{}'", path));
    if (in.peek() == '\t') {
        const auto m = readMatrixTsv(in);
        const std::size_t n = net.nodeCount();
        if (m.rowLabels.size() != n || m.colLabels.size() != n)
            throw InputError(fmt::format("{}: teleport matrix must be {}x{}", path, n, n));
        Matrix p(n, n);
        std::vector<std::size_t> col(n);
        for (std::size_t c = 0; c < n; ++c) {
            const auto idx = net.indexOf(m.colLabels[c]);
            if (!idx)
                throw InputError(fmt::format("{}: unknown node '{}'", path, m.colLabels[c]));
            col[c] = *idx;
        }
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = net.indexOf(m.rowLabels[r]);
            if (!row)
                throw InputError(fmt::format("{}: unknown node '{}'", path, m.rowLabels[r]));
            for (std::size_t c = 0; c < n; ++c)
                p(*row, col[c]) = m.values(r, c);
        }
        ranking.preference = std::move(p);
        return;
    }
    std::vector<double> weights(net.nodeCount(), 0.0);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        const auto fields = splitTabs(line);
        const auto where = fmt::format("{}:{}", path, lineNo);
        if (fields.size() != 2)
            throw InputError(fmt::format("{}: expected node<TAB>weight", where));
        const auto idx = net.indexOf(fields[0]);
        if (!idx)
            throw InputError(fmt::format("{}: unknown node '{}'", where, fields[0]));
        weights[*idx] = parseDouble(fields[1], where);
    }
    ranking.personalization = std::move(weights);
}

struct AttractionView {
    JointDistribution rhat;
    Distribution fo, bi;
};

AttractionView attraction(const Loaded &l) {
    const auto ranking = l.cfg.ranking();
    const auto pn = buildPathNetwork(l.net, l.cfg.pathCutoff, l.cfg.maxEdges);
    return {nodeAttraction(l.net.network, pathRanks(pn, ranking).attraction), forwardOutRank(l.capacity, ranking),
            backwardInRank(l.capacity, ranking)};
}

json simJson(const SimResult &sim, const std::vector<std::string> &states) {
    return {{"states", states},
            {"counts", sim.counts},
            {"frequencies", sim.frequencies},
            {"stderr", sim.standardErrors},
            {"seed", sim.seed},
            {"rng", sim.rng}};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Network coherence analysis: completion, ranking, attraction bias and concepts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    std::string outPath;
    app.add_option("-o,--output", outPath, "Write the result here instead of stdout");

    Overrides o;
    std::function<int()> action;

    auto *ingestCmd = app.add_subcommand("ingest", "Parse and normalize an edge list");
    ingestCmd->add_option("input", o.input, "Edge list (TSV)")->required();
    ingestCmd->callback([&] {
        action = [&] {
            const auto net = readEdgeListFile(o.input);
            Output out(outPath);
            writeEdgeList(*out, net, true);
            return 0;
        };
    });

    auto *completeCmd = app.add_subcommand("complete", "v-completion of a network");
    addCommon(completeCmd, o);
    completeCmd->callback([&] {
        action = [&] {
            const auto cfg = o.resolve();
            const auto net = vComplete(readEdgeListFile(cfg.input), cfg.completion());
            Output out(outPath);
            writeEdgeList(*out, net.network, true);
            return 0;
        };
    });

    std::string dynamicsName = "pull";
    std::string personalization;
    auto *rankCmd = app.add_subcommand("rank", "Stationary ranks of one dynamics");
    addCommon(rankCmd, o);
    addDynamics(rankCmd, o);
    rankCmd->add_option("--dynamics", dynamicsName, "Which chain")
        ->check(CLI::IsMember({"pull", "push", "forward", "backward", "forward-out", "backward-in", "pagerank"}));
    rankCmd->add_option("--personalization", personalization, "Teleport preference: node<TAB>weight lines or an NxN matrix TSV");
    rankCmd->callback([&] {
        action = [&] {
            const auto l = load(o);
            auto ranking = l.cfg.ranking();
            if (dynamicsName == "pagerank" && !ranking.damping)
                throw InputError("pagerank is the damped forward chain; drop --exact");
            if (!personalization.empty())
                readPersonalization(personalization, l.net.network, ranking);
            Distribution r;
            if (dynamicsName == "pull" || dynamicsName == "forward" || dynamicsName == "pagerank")
                r = pullRank(l.capacity, ranking);
            else if (dynamicsName == "push" || dynamicsName == "backward")
                r = pushRank(l.capacity, ranking);
            else if (dynamicsName == "forward-out")
                r = forwardOutRank(l.capacity, ranking);
            else
                r = backwardInRank(l.capacity, ranking);
            Output out(outPath);
            writeRanksTsv(*out, l.net.network.nodes(), r);
            return 0;
        };
    });

    std::string biasMode = "attraction";
    auto *biasCmd = app.add_subcommand("bias", "Traffic or attraction bias matrix (TSV)");
    addCommon(biasCmd, o);
    addDynamics(biasCmd, o);
    biasCmd->add_option("--path-cutoff", o.pathCutoff, "Detour cutoff; default is exhaustive");
    biasCmd->add_option("--mode", biasMode, "traffic or attraction")->check(CLI::IsMember({"traffic", "attraction"}));
    biasCmd->callback([&] {
        action = [&] {
            const auto l = load(o);
            const auto &nodes = l.net.network.nodes();
            Matrix m;
            if (biasMode == "traffic") {
                m = trafficBias(capacityDistribution(l.capacity).joint.values).entries;
            } else {
                const auto v = attraction(l);
                m = attractionBias(v.rhat, v.fo, v.bi);
            }
            Output out(outPath);
            writeMatrixTsv(*out, {nodes, nodes, m});
            return 0;
        };
    });

    auto *mutinfoCmd = app.add_subcommand("mutinfo", "Mutual information of node attraction (JSON)");
    addCommon(mutinfoCmd, o);
    addDynamics(mutinfoCmd, o);
    mutinfoCmd->add_option("--path-cutoff", o.pathCutoff, "Detour cutoff; default is exhaustive");
    mutinfoCmd->callback([&] {
        action = [&] {
            const auto l = load(o);
            const auto v = attraction(l);
            const auto &nodes = l.net.network.nodes();
            json excluded = json::array();
            for (auto [i, j] : AttractionOperator(l.capacity.entries).excludedPairs())
                excluded.push_back({nodes[i], nodes[j]});
            const auto flat = v.rhat.values.data();
            json j{{"mutual_information_bits", mutualInformation(v.rhat, v.fo, v.bi)},
                   {"entropy_fo", entropyBits(v.fo.values)},
                   {"entropy_bi", entropyBits(v.bi.values)},
                   {"entropy_joint", entropyBits(std::vector<double>(flat.begin(), flat.end()))},
                   {"excluded_pairs", excluded}};
            Output out(outPath);
            *out << j.dump(2) << '\n';
            return 0;
        };
    });

    std::string sweep;
    auto *conceptsCmd = app.add_subcommand("concepts", "Maximal epsilon-concepts of the attraction bias (JSON)");
    addCommon(conceptsCmd, o);
    addDynamics(conceptsCmd, o);
    conceptsCmd->add_option("--path-cutoff", o.pathCutoff, "Detour cutoff; default is exhaustive");
    conceptsCmd->add_option("--epsilon", o.epsilon, "Cohesion threshold");
    conceptsCmd->add_option("--sweep", sweep, "Comma-separated epsilon grid; one layer per value");
    conceptsCmd->callback([&] {
        action = [&] {
            const auto l = load(o);
            const auto v = attraction(l);
            const auto upsilon = attractionBias(v.rhat, v.fo, v.bi);
            const auto &nodes = l.net.network.nodes();
            auto layerJson = [&](double eps, const std::vector<ConceptSet> &cs) {
                json arr = json::array();
                for (const auto &c : cs) {
                    std::vector<std::string> members;
                    for (auto i : c.members)
                        members.push_back(nodes[i]);
                    arr.push_back({{"members", members},
                                   {"cohesion", std::isfinite(c.cohesion) ? json(c.cohesion) : json(nullptr)}});
                }
                return json{{"epsilon", eps}, {"concepts", arr}};
            };
            json j;
            if (!sweep.empty()) {
                j = json::array();
                for (const auto &layer : conceptSweep(upsilon, parseGrid(sweep, "--sweep")))
                    j.push_back(layerJson(layer.epsilon, layer.concepts));
            } else {
                j = layerJson(l.cfg.epsilon, epsilonConcepts(upsilon, l.cfg.epsilon));
            }
            Output out(outPath);
            *out << j.dump(2) << '\n';
            return 0;
        };
    });

    auto *associationsCmd = app.add_subcommand("associations", "Associations between overlapping concepts (TSV)");
    addCommon(associationsCmd, o);
    addDynamics(associationsCmd, o);
    associationsCmd->add_option("--path-cutoff", o.pathCutoff, "Detour cutoff; default is exhaustive");
    associationsCmd->add_option("--epsilon", o.epsilon, "Cohesion threshold");
    bool quadruples = false;
    associationsCmd->add_flag("--quadruples", quadruples, "List every edge quadruple instead of aggregates");
    associationsCmd->callback([&] {
        action = [&] {
            const auto l = load(o);
            const auto v = attraction(l);
            const auto &g = l.net.network;
            const auto cn = conceptAssociations(
                l.net, epsilonConcepts(attractionBias(v.rhat, v.fo, v.bi), l.cfg.epsilon), l.cfg.maxEdges);
            auto members = [&](std::size_t c) {
                std::string s;
                for (auto i : cn.concepts[c].members)
                    s += (s.empty() ? "" : ",") + g.nodes()[i];
                return s;
            };
            Table t;
            if (quadruples) {
                t.header = {"from", "to", "a", "b", "first_leg", "last_leg", "cost"};
                for (const auto &a : cn.associations)
                    t.rows.push_back({members(a.from), members(a.to), g.edge(a.a).id, g.edge(a.b).id,
                                      g.edge(a.firstLeg).id, g.edge(a.lastLeg).id, formatDouble(a.cost)});
            } else {
                t.header = {"from", "to", "capacity"};
                for (std::size_t u = 0; u < cn.concepts.size(); ++u)
                    for (std::size_t w = 0; w < cn.concepts.size(); ++w)
                        if (cn.capacity(u, w) > 0.0)
                            t.rows.push_back({members(u), members(w), formatDouble(cn.capacity(u, w))});
            }
            Output out(outPath);
            writeTable(*out, t);
            return 0;
        };
    });

    std::string chainName = "forward";
    auto *simulateCmd = app.add_subcommand("simulate", "Monte Carlo random surfer (JSON)");
    addCommon(simulateCmd, o);
    addDynamics(simulateCmd, o);
    simulateCmd->add_option("--chain", chainName, "forward, backward or attraction")
        ->check(CLI::IsMember({"forward", "backward", "attraction"}));
    simulateCmd->add_option("--steps", o.steps, "Steps per walker, burn-in included");
    simulateCmd->add_option("--seed", o.seed, "Philox key");
    simulateCmd->add_option("--walkers", o.walkers, "Independent walkers");
    simulateCmd->callback([&] {
        action = [&] {
            const auto l = load(o);
            const auto ranking = l.cfg.ranking();
            const auto &nodes = l.net.network.nodes();
            json j;
            if (chainName == "attraction") {
                const auto sim = simulatePairs(AttractionOperator(l.capacity.entries), l.cfg.simulation(),
                                               ranking.damping);
                std::vector<std::string> states;
                for (const auto &a : nodes)
                    for (const auto &b : nodes)
                        states.push_back(a + "," + b);
                j = simJson(sim, states);
            } else {
                auto chain = chainName == "forward" ? forward(l.capacity, ranking.dangling)
                                                    : backward(l.capacity, ranking.dangling);
                if (ranking.damping)
                    chain = teleport(chain, {*ranking.damping, std::nullopt});
                auto states = nodes;
                if (chain.phantom)
                    states.push_back("<phantom>");
                j = simJson(simulate(chain, l.cfg.simulation()), states);
            }
            Output out(outPath);
            *out << j.dump(2) << '\n';
            return 0;
        };
    });

    auto *verifyCmd = app.add_subcommand("verify", "Consistency and oracle checks (JSON); exit 4 on failure");
    addCommon(verifyCmd, o);
    addDynamics(verifyCmd, o);
    verifyCmd->add_option("--path-cutoff", o.pathCutoff, "Detour cutoff for the production ranks");
    verifyCmd->add_option("--steps", o.steps, "Simulator steps per walker");
    verifyCmd->add_option("--seed", o.seed, "Simulator seed");
    verifyCmd->add_option("--walkers", o.walkers, "Simulator walkers");
    verifyCmd->add_option("--inject-fault", o.injectFault, "Perturb the attraction bias by this amount");
    verifyCmd->callback([&] {
        action = [&] {
            const auto report = verify(o.resolve());
            Output out(outPath);
            *out << report.toJson().dump(2) << '\n';
            return report.passed() ? 0 : 4;
        };
    });

    auto *pipelineCmd = app.add_subcommand("pipeline", "Run every stage and write NN-stage files plus a manifest");
    addCommon(pipelineCmd, o);
    addDynamics(pipelineCmd, o);
    pipelineCmd->add_option("--path-cutoff", o.pathCutoff, "Detour cutoff; default is exhaustive");
    pipelineCmd->add_option("--epsilon", o.epsilon, "Concept threshold for associations");
    pipelineCmd->add_option("--grid", o.grid, "Comma-separated epsilon grid for the concept sweep");
    pipelineCmd->add_option("--out", o.outputDir, "Output directory");
    pipelineCmd->callback([&] {
        action = [&] {
            const auto report = runPipeline(o.resolve());
            for (const auto &f : report.stageFiles)
                std::cout << f.string() << '\n';
            std::cout << report.manifest.string() << '\n';
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return action();
    } catch (const DivergentCompletion &e) {
        std::cerr << "error: " << e.what() << '\n';
        std::string cycle;
        for (const auto &n : e.cycle())
            cycle += (cycle.empty() ? "" : " -> ") + n;
        std::cerr << "cycle: " << cycle << '\n';
        return e.exitCode();
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exitCode();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
