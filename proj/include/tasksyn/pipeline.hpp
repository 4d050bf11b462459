#pragma once

#include <map>
#include <string>
#include <vector>

#include "tasksyn/mcts.hpp"
#include "tasksyn/mutation.hpp"

namespace tasksyn {

// Plain "key = value" lines; '#' starts a comment. Keys are SynthesisParams field names.
void apply_config_line(SynthesisParams& p, const std::string& key, const std::string& value);
SynthesisParams parse_config(const std::string& text, SynthesisParams base = {});
SynthesisParams load_config(const std::string& path, SynthesisParams base = {});
nlohmann::json params_to_json(const SynthesisParams& p);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

struct TaskRecord {
    std::string codeId;
    Code code;
    Candidate result;
    std::uint64_t seed = 0;
    std::string taskFile;
};

struct PrunedCode {
    std::string codeId;
    std::string code;
    // "noTaskEmitted": every rollout crashed, hit the unroll cap, or contradicted.
    // "filterNeverPassed": tasks were emitted but none qualified.
    std::string reason;
};

struct PipelineReport {
    StageCounts stageCounts;
    long long mutations = 0;
    long long candidates = 0;
    long long validCodes = 0;
    std::vector<TaskRecord> tasks;
    std::vector<PrunedCode> pruned;
    double elapsedSeconds = 0;
};

std::string jsonl_record(const TaskRecord& r);
nlohmann::json report_to_json(const PipelineReport& r);

// Writes tasks.jsonl, tasks/<codeId>_<k>.json and report.json into outDir.
// An empty outDir skips persistence.
PipelineReport run_pipeline(const TaskSpec& refTask, const Code& refCode, const SynthesisParams& params,
                            const std::string& outDir);

enum class Verdict { Proven, Refuted, Indeterminate };
std::string_view to_string(Verdict v);

struct DiagnosticsReport {
    Verdict minimality = Verdict::Indeterminate;
    Verdict structure = Verdict::Indeterminate;
    std::string minimalityDetail;
    std::string structureDetail;
    long long codesExamined = 0;
    bool exhaustive = false;
    bool conceptuallySimilar = false;
};

// Bounded search over small codes built from the task's store.
DiagnosticsReport objective_diagnostics(const TaskSpec& task, const Code& code, const TaskSpec& refTask,
                                        const Code& refCode, const SynthesisParams& params,
                                        long long nodeBudget = 2000000, int depthLimit = 2);
nlohmann::json diagnostics_to_json(const DiagnosticsReport& d);

}  // namespace tasksyn
