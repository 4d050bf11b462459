#include "tasksyn/interpreter.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

class Machine {
public:
    Machine(const TaskSpec& task, int cap) : task_(task), grid_(task.pregrid), pose_(task.start), cap_(cap) {}

    Trace run(const Code& code) {
        exec_list(code.body);
        Trace t;
        t.crashed = crashed_;
        t.depthExceeded = exceeded_;
        t.steps = std::move(steps_);
        t.counts = count_actions(t.steps);
        t.finalPose = pose_;
        for (int r = 0; r < grid_.n(); ++r)
            for (int c = 0; c < grid_.n(); ++c)
                if (grid_.at(r, c).markers > 0) t.finalMarkers.push_back({r, c});
        for (int id : covered_) t.coveredNodes.insert(id);
        for (int id : thenEntered_)
            if (elseEntered_.count(id)) t.coveredNodes.insert(id);
        if (!crashed_ && !exceeded_) {
            if (task_.dialect == Dialect::Hoc) {
                t.solved = task_.goal && pose_.cell() == *task_.goal;
            } else {
                t.solved = !task_.end || pose_ == *task_.end;
                for (int r = 0; r < grid_.n() && t.solved; ++r)
                    for (int c = 0; c < grid_.n(); ++c)
                        if ((grid_.at(r, c).markers > 0) != (task_.postgrid.at(r, c).markers > 0)) {
                            t.solved = false;
                            break;
                        }
            }
        }
        return t;
    }

private:
    bool halted() const { return crashed_ || exceeded_; }

    bool free_toward(Dir d) const {
        Cell c = step(pose_.cell(), d);
        return grid_.is_free(c.row, c.col);
    }

    bool eval(Condition c) const {
        switch (c) {
        case Condition::PathAhead: return free_toward(pose_.dir);
        case Condition::NoPathAhead: return !free_toward(pose_.dir);
        case Condition::PathLeft: return free_toward(turn_left(pose_.dir));
        case Condition::NoPathLeft: return !free_toward(turn_left(pose_.dir));
        case Condition::PathRight: return free_toward(turn_right(pose_.dir));
        case Condition::NoPathRight: return !free_toward(turn_right(pose_.dir));
        case Condition::Marker: return grid_.at(pose_.cell()).markers > 0;
        case Condition::NoMarker: return grid_.at(pose_.cell()).markers == 0;
        case Condition::Goal: return task_.goal && pose_.cell() == *task_.goal;
        }
        return false;
    }

    void act(Action a) {
        switch (a) {
        case Action::Move: {
            Cell c = step(pose_.cell(), pose_.dir);
            if (!grid_.is_free(c.row, c.col)) {
                crashed_ = true;
            } else {
                pose_.row = c.row;
                pose_.col = c.col;
            }
            break;
        }
        case Action::TurnLeft: pose_.dir = turn_left(pose_.dir); break;
        case Action::TurnRight: pose_.dir = turn_right(pose_.dir); break;
        case Action::PutMarker: {
            auto& m = grid_.at(pose_.cell()).markers;
            if (m > 0)
                crashed_ = true;
            else
                m = 1;
            break;
        }
        case Action::PickMarker: {
            auto& m = grid_.at(pose_.cell()).markers;
            if (m == 0)
                crashed_ = true;
            else
                m = 0;
            break;
        }
        }
        steps_.push_back({a, pose_});
    }

    // Returns false when the loop must abort because the cap was hit.
    bool may_iterate(int done) {
        if (done >= cap_) {
            exceeded_ = true;
            return false;
        }
        return true;
    }

    void exec_list(const std::vector<Stmt>& list) {
        for (const auto& s : list) {
            if (halted()) return;
            exec(s);
        }
    }

    void exec(const Stmt& s) {
        switch (s.kind) {
        case Stmt::Kind::Action:
            covered_.insert(s.id);
            act(s.action);
            break;
        case Stmt::Kind::Repeat:
            covered_.insert(s.id);
            for (int i = 0; i < s.iter && !halted(); ++i) {
                if (!may_iterate(i)) break;
                exec_list(s.body);
            }
            break;
        case Stmt::Kind::While:
            covered_.insert(s.id);
            for (int i = 0; !halted() && eval(s.cond); ++i) {
                if (!may_iterate(i)) break;
                exec_list(s.body);
            }
            break;
        case Stmt::Kind::RepeatUntil:
            covered_.insert(s.id);
            for (int i = 0; !halted() && !eval(Condition::Goal); ++i) {
                if (!may_iterate(i)) break;
                exec_list(s.body);
            }
            break;
        case Stmt::Kind::If:
            if (eval(s.cond)) {
                covered_.insert(s.id);
                exec_list(s.body);
            }
            break;
        case Stmt::Kind::IfElse:
            if (eval(s.cond)) {
                thenEntered_.insert(s.id);
                exec_list(s.body);
            } else {
                elseEntered_.insert(s.id);
                exec_list(s.elseBody);
            }
            break;
        }
    }

    const TaskSpec& task_;
    Grid grid_;
    AgentPose pose_;
    int cap_;
    bool crashed_ = false;
    bool exceeded_ = false;
    std::vector<ActionEvent> steps_;
    std::set<int> covered_;
    std::set<int> thenEntered_;
    std::set<int> elseEntered_;
};

void collect_ids(const std::vector<Stmt>& list, std::set<int>& out) {
    for (const auto& s : list) {
        out.insert(s.id);
        collect_ids(s.body, out);
        collect_ids(s.elseBody, out);
    }
}

struct BfsState {
    AgentPose pose;
    // Cells whose marker presence differs from the pregrid, sorted.
    std::vector<int> toggles;
};

std::string state_key(const BfsState& s) {
    std::string k;
    k.reserve(4 + s.toggles.size() * 2);
    k += char(s.pose.row);
    k += char(s.pose.col);
    k += char(int(s.pose.dir));
    for (int t : s.toggles) {
        k += char(t & 0xff);
        k += char(t >> 8);
    }
    return k;
}

}  // namespace

TraceCounts count_actions(const std::vector<ActionEvent>& steps) {
    TraceCounts c;
    int run = 0;
    auto close_run = [&] {
        if (run >= 3) c.segments++;
        if (run >= 5) c.longSegments++;
        run = 0;
    };
    for (const auto& e : steps) {
        switch (e.action) {
        case Action::Move:
            c.moves++;
            run++;
            continue;
        case Action::TurnLeft:
        case Action::TurnRight: c.turns++; break;
        case Action::PutMarker: c.putMarkers++; break;
        case Action::PickMarker: c.pickMarkers++; break;
        }
        close_run();
    }
    close_run();
    return c;
}

nlohmann::json trace_to_json(const Trace& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& e : t.steps)
        steps.push_back({{"action", to_string(e.action)},
                         {"row", e.pose.row},
                         {"col", e.pose.col},
                         {"dir", to_string(e.pose.dir)}});
    nlohmann::json markers = nlohmann::json::array();
    for (auto c : t.finalMarkers) markers.push_back({c.row, c.col});
    return {{"solved", t.solved},
            {"crashed", t.crashed},
            {"depthExceeded", t.depthExceeded},
            {"counts",
             {{"moves", t.counts.moves},
              {"turns", t.counts.turns},
              {"segments", t.counts.segments},
              {"longSegments", t.counts.longSegments},
              {"pickMarkers", t.counts.pickMarkers},
              {"putMarkers", t.counts.putMarkers}}},
            {"coveredNodes", t.coveredNodes},
            {"finalPose", {{"row", t.finalPose.row}, {"col", t.finalPose.col}, {"dir", to_string(t.finalPose.dir)}}},
            {"finalMarkers", markers},
            {"steps", steps}};
}

Trace execute(const Code& code, const TaskSpec& task, int unrollCap) {
    if (code.dialect != task.dialect) throw ValidationError("execute: code and task dialects differ");
    for (int r = 0; r < task.n; ++r)
        for (int c = 0; c < task.n; ++c)
            if (task.pregrid.at(r, c).wall == Wall::Unknown) throw ValidationError("execute: task has unknown cells");
    Machine m(task, unrollCap > 0 ? unrollCap : 2 * task.n);
    return m.run(code);
}

std::set<int> all_node_ids(const Code& code) {
    std::set<int> out;
    collect_ids(code.body, out);
    return out;
}

bool actions_solve(const TaskSpec& task, const std::vector<Action>& actions) {
    std::vector<Stmt> body;
    for (auto a : actions) body.push_back(Stmt::act(a));
    Code c = make_code(task.dialect, std::move(body));
    return execute(c, task).solved;
}

ShortcutResult find_shortcut(const TaskSpec& task, int maxLen, long long stateCap) {
    ShortcutResult res;
    const int n = task.n;
    const bool karel = task.dialect == Dialect::Karel;
    const auto& actions = dialect_actions(task.dialect);

    std::vector<int> required;
    if (karel)
        for (int i = 0; i < n * n; ++i)
            if ((task.pregrid.at(i / n, i % n).markers > 0) != (task.postgrid.at(i / n, i % n).markers > 0))
                required.push_back(i);

    auto has_marker = [&](const BfsState& s, int idx) {
        bool base = task.pregrid.at(idx / n, idx % n).markers > 0;
        bool toggled = std::binary_search(s.toggles.begin(), s.toggles.end(), idx);
        return base != toggled;
    };
    // Admissible lower bound on the remaining actions.
    auto lower_bound = [&](const BfsState& s) {
        if (!karel) return std::abs(s.pose.row - task.goal->row) + std::abs(s.pose.col - task.goal->col);
        std::vector<int> diff;
        std::set_symmetric_difference(required.begin(), required.end(), s.toggles.begin(), s.toggles.end(),
                                      std::back_inserter(diff));
        int toEnd = task.end ? std::abs(s.pose.row - task.end->row) + std::abs(s.pose.col - task.end->col) : 0;
        if (diff.empty()) return toEnd;
        int nearest = 1 << 30;
        for (int idx : diff)
            nearest = std::min(nearest, std::abs(s.pose.row - idx / n) + std::abs(s.pose.col - idx % n));
        return std::max(toEnd, int(diff.size()) + nearest);
    };
    auto solved = [&](const BfsState& s) {
        if (!karel) return s.pose.cell() == *task.goal;
        return s.toggles == required && (!task.end || s.pose == *task.end);
    };

    struct Node {
        BfsState state;
        int parent;
        Action via;
        int depth;
    };
    std::vector<Node> nodes;
    std::unordered_set<std::string> seen;
    std::deque<int> queue;

    BfsState init{task.start, {}};
    nodes.push_back({init, -1, Action::Move, 0});
    seen.insert(state_key(init));
    queue.push_back(0);

    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        if (solved(nodes[cur].state)) {
            for (int at = cur; nodes[at].parent >= 0; at = nodes[at].parent) res.actions.push_back(nodes[at].via);
            std::reverse(res.actions.begin(), res.actions.end());
            res.status = ShortcutStatus::Found;
            res.states = static_cast<long long>(nodes.size());
            return res;
        }
        if (nodes[cur].depth >= maxLen) continue;
        for (Action a : actions) {
            BfsState nx = nodes[cur].state;
            int idx = nx.pose.row * n + nx.pose.col;
            bool ok = true;
            switch (a) {
            case Action::Move: {
                Cell c = step(nx.pose.cell(), nx.pose.dir);
                ok = task.pregrid.is_free(c.row, c.col);
                nx.pose.row = c.row;
                nx.pose.col = c.col;
                break;
            }
            case Action::TurnLeft: nx.pose.dir = turn_left(nx.pose.dir); break;
            case Action::TurnRight: nx.pose.dir = turn_right(nx.pose.dir); break;
            case Action::PutMarker:
            case Action::PickMarker: {
                bool want = a == Action::PickMarker;
                ok = has_marker(nx, idx) == want;
                auto it = std::lower_bound(nx.toggles.begin(), nx.toggles.end(), idx);
                if (it != nx.toggles.end() && *it == idx)
                    nx.toggles.erase(it);
                else
                    nx.toggles.insert(it, idx);
                break;
            }
            }
            if (!ok) continue;
            int depth = nodes[cur].depth + 1;
            if (depth + lower_bound(nx) > maxLen) continue;
            if (!seen.insert(state_key(nx)).second) continue;
            if (static_cast<long long>(nodes.size()) >= stateCap) {
                res.status = ShortcutStatus::Indeterminate;
                res.states = static_cast<long long>(nodes.size());
                return res;
            }
            nodes.push_back({std::move(nx), cur, a, depth});
            queue.push_back(int(nodes.size()) - 1);
        }
    }
    res.status = ShortcutStatus::None;
    res.states = static_cast<long long>(nodes.size());
    return res;
}

}  // namespace tasksyn
