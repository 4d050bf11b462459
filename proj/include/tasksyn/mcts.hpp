#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tasksyn/scoring.hpp"
#include "tasksyn/symexec.hpp"

namespace tasksyn {

struct RunStats {
    long long iterations = 0;
    long long uniqueTraces = 0;
    // Rollout terminals by status, counted per iteration.
    long long emitted = 0;
    long long crashed = 0;
    long long depthExceeded = 0;
    long long contradictions = 0;
    // (iteration, best fScore) recorded whenever the best candidate improves.
    std::vector<std::pair<long long, double>> bestScoreTimeline;
    double elapsedSeconds = 0;
};

struct Candidate {
    TaskSpec task;
    ScoreBreakdown scores;
    std::vector<int> decisions;
};

struct SynthesisRun {
    std::optional<Candidate> best;
    RunStats stats;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// UCT over decision prefixes. pool != nullptr switches to pool-mode scoring
// (diversity joins the graded terms and must be positive for selection).
SynthesisRun synthesize_task(const Code& code, const TaskSpec& refTask, const Code& refCode,
                             const SynthesisParams& params, const std::vector<PoolEntry>* pool,
                             std::uint64_t seed);

struct PoolRun {
    std::vector<Candidate> tasks;
    std::vector<RunStats> stats;
};

// Sequential runs, each scored for diversity against the tasks kept so far.
PoolRun synthesize_pool(const Code& code, const TaskSpec& refTask, const Code& refCode, const SynthesisParams& params,
                        int k, std::uint64_t seed);

nlohmann::json run_stats_to_json(const RunStats& s);
nlohmann::json candidate_to_json(const Candidate& c);

}  // namespace tasksyn
