#pragma once

#include <optional>
#include <set>
#include <vector>

#include "tasksyn/code.hpp"
#include "tasksyn/task.hpp"

namespace tasksyn {

struct ActionEvent {
    Action action;
    // Pose after the action; for a crashing action, the pose before it.
    AgentPose pose;
    bool operator==(const ActionEvent&) const = default;
};

struct TraceCounts {
    int moves = 0;
    int turns = 0;
    int segments = 0;
    int longSegments = 0;
    int pickMarkers = 0;
    int putMarkers = 0;
    bool operator==(const TraceCounts&) const = default;
};

struct Trace {
    bool solved = false;
    bool crashed = false;
    bool depthExceeded = false;
    std::vector<ActionEvent> steps;
    TraceCounts counts;
    std::set<int> coveredNodes;
    AgentPose finalPose;
    std::vector<Cell> finalMarkers;
};

TraceCounts count_actions(const std::vector<ActionEvent>& steps);
nlohmann::json trace_to_json(const Trace& t);

// Non-positive unrollCap means 2n.
Trace execute(const Code& code, const TaskSpec& task, int unrollCap = 0);

// All node ids of the program (for coverage checks).
std::set<int> all_node_ids(const Code& code);

enum class ShortcutStatus { Found, None, Indeterminate };

struct ShortcutResult {
    ShortcutStatus status = ShortcutStatus::None;
    std::vector<Action> actions;
    long long states = 0;
};

ShortcutResult find_shortcut(const TaskSpec& task, int maxLen, long long stateCap = 1000000);

// Runs a flat action sequence; true iff it ends uncrashed in a solved state.
bool actions_solve(const TaskSpec& task, const std::vector<Action>& actions);

}  // namespace tasksyn
