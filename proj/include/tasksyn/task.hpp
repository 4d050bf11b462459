#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tasksyn/code.hpp"

namespace tasksyn {

enum class Wall : std::uint8_t { Unknown, Free, Blocked };

enum class Dir { North, East, South, West };

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell&) const = default;
    auto operator<=>(const Cell&) const = default;
};

struct CellState {
    Wall wall = Wall::Free;
    bool isGoal = false;
    int markers = 0;
    bool operator==(const CellState&) const = default;
};

struct AgentPose {
    int row = 0;
    int col = 0;
    Dir dir = Dir::East;
    bool operator==(const AgentPose&) const = default;
    Cell cell() const { return {row, col}; }
};

class Grid {
public:
    Grid() = default;
    explicit Grid(int n, CellState fill = {}) : n_(n), cells_(size_t(n) * size_t(n), fill) {}

    int n() const { return n_; }
    bool inside(int r, int c) const { return r >= 0 && c >= 0 && r < n_ && c < n_; }
    bool inside(Cell c) const { return inside(c.row, c.col); }
    CellState& at(int r, int c) { return cells_[size_t(r) * size_t(n_) + size_t(c)]; }
    const CellState& at(int r, int c) const { return cells_[size_t(r) * size_t(n_) + size_t(c)]; }
    CellState& at(Cell c) { return at(c.row, c.col); }
    const CellState& at(Cell c) const { return at(c.row, c.col); }
    // Out-of-grid counts as blocked.
    bool is_free(int r, int c) const { return inside(r, c) && at(r, c).wall == Wall::Free; }
    bool operator==(const Grid&) const = default;

private:
    int n_ = 0;
    std::vector<CellState> cells_;
};

struct TaskSpec {
    Dialect dialect = Dialect::Hoc;
    int n = 0;
    Grid pregrid;
    // Karel only; same walls as pregrid, markers after a correct execution.
    Grid postgrid;
    std::optional<Cell> goal;
    AgentPose start;
    // Karel only; when set, a solution must also leave the agent in this pose.
    std::optional<AgentPose> end;
    std::set<BlockKind> store;
    int maxBlocks = 0;

    bool operator==(const TaskSpec&) const = default;
};

struct SynthesisParams {
    int deltaSize = 2;
    int deltaIter = 1;
    double deltaDiss = 0.33;
    // Unset means 0.2 for codes with While/RepeatUntil and 0.05 otherwise.
    std::optional<double> deltaQual;
    int deltaMini = 0;
    int n = 10;
    long long mctsIterations = 2000000;
    double explorationConstant = 2.0;
    // Non-positive means 2n.
    int unrollCap = 0;
    int runsPerCode = 10;
    std::uint64_t seed = 0;

    // Reject HOC mutations whose last action is an inserted turn.
    bool trimTrailingTurns = true;
    long long shortcutStateCap = 1000000;
    int distractorBudget = 0;
    std::string preinit = "none";
    int workers = 1;
};

int effective_unroll_cap(const SynthesisParams& p, int n);
double effective_delta_qual(const SynthesisParams& p, const Code& code);

std::string_view to_string(Dir d);
std::optional<Dir> dir_from_string(std::string_view s);
Dir turn_left(Dir d);
Dir turn_right(Dir d);
Cell step(Cell c, Dir d);

// Throws ValidationError naming the offending field.
void validate_task(const TaskSpec& t);
TaskSpec load_task(const std::string& bytes);
std::string save_task(const TaskSpec& t);
nlohmann::json task_to_json(const TaskSpec& t);
TaskSpec task_from_json(const nlohmann::json& j);

std::string render_ascii(const TaskSpec& t);

bool is_conceptually_similar(const TaskSpec& task, const Code& code, const TaskSpec& refTask, const Code& refCode,
                             int deltaSize);

}  // namespace tasksyn
