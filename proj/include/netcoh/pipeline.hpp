#pragma once

#include <netcoh/completion.hpp>
#include <netcoh/dynamics.hpp>
#include <netcoh/ranking.hpp>
#include <netcoh/surfer.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace netcoh {

inline constexpr const char *kVersion = "0.1.0";

struct PipelineConfig {
    std::string input;
    double cutoff = 4.0;
    double penalty = 1.0;
    std::optional<double> pathCutoff; // unset: exhaustive
    double damping = 0.85;
    bool exact = false;
    DanglingPolicy dangling = DanglingPolicy::Complete;
    double fixCost = 30.0;
    double epsilon = 0.0;
    std::vector<double> epsilonGrid{0.0, 0.005, 0.01, 0.02, 0.05};
    double tol = 1e-12;
    std::size_t maxIter = 100'000;
    std::size_t maxEdges = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t steps = 1'000'000;
    std::uint32_t walkers = 1;
    std::string outputDir = "out";
    double injectFault = 0.0;

    void validate() const;
    CompletionParams completion() const;
    RankOptions ranking() const;
    SimConfig simulation() const;
};

nlohmann::json toJson(const PipelineConfig &cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig configFromJson(const nlohmann::json &j, const PipelineConfig &base = {});
/// A relative `input` is resolved against the config file's directory.
PipelineConfig loadConfigFile(const std::filesystem::path &path);

DanglingPolicy parseDangling(const std::string &name);
std::string danglingName(DanglingPolicy policy);

std::string sha256Hex(const std::string &bytes);
std::string sha256File(const std::filesystem::path &path);

struct PipelineReport {
    std::vector<std::filesystem::path> stageFiles;
    std::filesystem::path manifest;
};

/// Runs every stage and writes `NN-stage.ext` files plus `manifest.json`.
/// Errors are rethrown with the stage name prefixed and their kind preserved.
PipelineReport runPipeline(const PipelineConfig &cfg);

struct CheckResult {
    std::string name;
    bool passed = false;
    double deviation = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const;
    nlohmann::json toJson() const;
};

VerifyReport verify(const PipelineConfig &cfg);

} // namespace netcoh
