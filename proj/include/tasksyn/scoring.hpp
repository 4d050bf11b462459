#pragma once

#include <optional>
#include <vector>

#include "tasksyn/code.hpp"
#include "tasksyn/interpreter.hpp"
#include "tasksyn/task.hpp"

namespace tasksyn {

struct ScoreBreakdown {
    int fCov = 0;
    double fQual = 0;
    double fDiss = 0;
    int fNocrash = 0;
    int fNocut = 0;
    std::optional<double> fDiversity;
    // Mean of the graded terms, before the indicator is applied.
    double component = 0;
    bool indicator = false;
    double fScore = 0;
    TraceCounts featureCounts;

    bool operator==(const ScoreBreakdown&) const = default;
};

struct PoolEntry {
    TaskSpec task;
    std::vector<int> decisions;
};

struct DissTerms {
    int loc = 0;
    int dir = 0;
    double grid = 0;
};

double f_qual(const Trace& trace, int n, Dialect dialect);
DissTerms diss_terms(const TaskSpec& a, const TaskSpec& b);
double f_diss(const TaskSpec& a, const TaskSpec& b);
int f_cov(const Trace& trace, const Code& code);
int f_nocut(const TaskSpec& task, const Code& code, long long stateCap = 1000000);

// Levenshtein distance divided by the longer length; 0 for two empty strings.
double path_distance(const std::vector<int>& a, const std::vector<int>& b);
bool same_visual(const TaskSpec& a, const TaskSpec& b);
double f_diversity(const TaskSpec& task, const std::vector<int>& decisions, const std::vector<PoolEntry>& pool);

// Without a pool the graded terms are cov, qual, diss; with one, diversity joins them.
ScoreBreakdown f_score(const TaskSpec& task, const Code& code, const Trace& trace, const TaskSpec& refTask,
                       const SynthesisParams& params, const std::vector<PoolEntry>* pool = nullptr,
                       const std::vector<int>& decisions = {});

nlohmann::json score_to_json(const ScoreBreakdown& s);
ScoreBreakdown score_from_json(const nlohmann::json& j);

}  // namespace tasksyn
