#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tasksyn/code.hpp"
#include "tasksyn/interpreter.hpp"
#include "tasksyn/task.hpp"

namespace tasksyn {

constexpr int kNumInitialConfigs = 20;

struct InitialConfig {
    AgentPose pose;
    int index = 0;
};

// Four corners and the center, each with the four headings; index = 4 * location + dir.
InitialConfig initial_config(int index, int n);

// Cells fixed before symbolic execution; Wall::Unknown means "not fixed".
struct GridPattern {
    int n = 0;
    std::vector<Wall> cells;

    Wall at(int r, int c) const { return cells.empty() ? Wall::Unknown : cells[size_t(r) * size_t(n) + size_t(c)]; }
    int count(Wall w) const;
};

// name: "none", "border", or "scatter(p,seed)".
GridPattern preinit_pattern(const std::string& name, int n);

enum class SymStatus { TaskEmitted, Crashed, DepthExceeded, Contradiction, NeedsDecision };

std::string_view to_string(SymStatus s);

struct PendingChoice {
    int arity = 0;
    std::string description;
};

struct SymOutcome {
    SymStatus status = SymStatus::NeedsDecision;
    std::optional<TaskSpec> task;
    Trace trace;
    // Decisions actually consumed, starting with the config choice.
    std::vector<int> decisions;
    std::optional<PendingChoice> pending;
};

// Supplies decisions on demand; returning nullopt leaves the run pending.
class DecisionSource {
public:
    virtual ~DecisionSource() = default;
    virtual std::optional<int> next(int arity, const std::string& description) = 0;
};

class FixedDecisions : public DecisionSource {
public:
    explicit FixedDecisions(std::vector<int> d) : d_(std::move(d)) {}
    std::optional<int> next(int arity, const std::string& description) override;

private:
    std::vector<int> d_;
    size_t pos_ = 0;
};

// Replays a prefix, then draws uniformly at random. Records the arity seen
// right after the prefix so a search tree can learn a node's fan-out.
class PrefixThenRandom : public DecisionSource {
public:
    PrefixThenRandom(const std::vector<int>& prefix, std::mt19937_64& rng) : prefix_(prefix), rng_(rng) {}
    std::optional<int> next(int arity, const std::string& description) override;
    int arity_after_prefix() const { return arityAfterPrefix_; }

private:
    const std::vector<int>& prefix_;
    std::mt19937_64& rng_;
    size_t pos_ = 0;
    int arityAfterPrefix_ = 0;
};

struct SymContext {
    int n = 10;
    int unrollCap = 20;
    std::set<BlockKind> store;
    GridPattern preinit;
};

SymContext make_sym_context(const SynthesisParams& params, const TaskSpec& refTask);

SymOutcome run_symbolic(const Code& code, DecisionSource& source, const SymContext& ctx);
// Throws ValidationError for malformed decisions (out-of-range values).
SymOutcome run_symbolic(const Code& code, const std::vector<int>& decisions, const SymContext& ctx);

nlohmann::json sym_outcome_to_json(const SymOutcome& o);

TaskSpec apply_distractors(const TaskSpec& task, const Code& code, std::uint64_t seed, int budget,
                           int unrollCap = 0);

std::vector<int> parse_decisions(const std::string& text);

}  // namespace tasksyn
