#include "tasksyn/symexec.hpp"

#include <algorithm>
#include <sstream>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

struct SymCell {
    Wall wall = Wall::Unknown;
    // -1 while unobserved.
    int preMarker = -1;
    int curMarker = -1;
    bool notGoal = false;
};

// Thrown internally to unwind when the decision source runs dry.
struct Pending {
    PendingChoice choice;
};

class SymMachine {
public:
    SymMachine(const Code& code, DecisionSource& src, const SymContext& ctx) : code_(code), src_(src), ctx_(ctx) {
        cells_.resize(size_t(ctx.n) * size_t(ctx.n));
        for (int r = 0; r < ctx.n; ++r)
            for (int c = 0; c < ctx.n; ++c) cell(r, c).wall = ctx.preinit.at(r, c);
    }

    SymOutcome run() {
        SymOutcome out;
        try {
            int idx = decide(kNumInitialConfigs, "initial configuration");
            pose_ = initial_config(idx, ctx_.n).pose;
            auto& start = cell(pose_.row, pose_.col);
            if (start.wall == Wall::Blocked) {
                out.status = SymStatus::Contradiction;
                out.decisions = decisions_;
                return out;
            }
            start.wall = Wall::Free;
            startPose_ = pose_;
            exec_list(code_.body);
        } catch (const Pending& p) {
            out.status = SymStatus::NeedsDecision;
            out.pending = p.choice;
            out.decisions = decisions_;
            return out;
        }
        out.decisions = decisions_;
        out.trace = make_trace();
        if (crashed_) {
            out.status = SymStatus::Crashed;
            return out;
        }
        if (exceeded_) {
            out.status = SymStatus::DepthExceeded;
            return out;
        }
        if (code_.dialect == Dialect::Hoc && !goal_) goal_ = pose_.cell();
        out.status = SymStatus::TaskEmitted;
        out.task = materialize();
        out.trace.solved = true;
        return out;
    }

private:
    SymCell& cell(int r, int c) { return cells_[size_t(r) * size_t(ctx_.n) + size_t(c)]; }
    bool inside(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < ctx_.n && c.col < ctx_.n; }
    bool halted() const { return crashed_ || exceeded_; }

    int decide(int arity, const std::string& what) {
        auto d = src_.next(arity, what);
        if (!d) throw Pending{{arity, what}};
        if (*d < 0 || *d >= arity)
            throw ValidationError("decision " + std::to_string(*d) + " out of range for " + what);
        decisions_.push_back(*d);
        return *d;
    }

    static std::string cell_name(Cell c) { return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")"; }

    bool path_free(Dir d) {
        Cell c = step(pose_.cell(), d);
        if (!inside(c)) return false;
        auto& s = cell(c.row, c.col);
        if (s.wall == Wall::Unknown) s.wall = decide(2, "free cell at " + cell_name(c)) ? Wall::Free : Wall::Blocked;
        return s.wall == Wall::Free;
    }

    int& marker_here(bool observe, int assumeIfUnknown) {
        auto& s = cell(pose_.row, pose_.col);
        if (s.curMarker < 0) {
            int v = observe ? decide(2, "marker at " + cell_name(pose_.cell())) : assumeIfUnknown;
            s.preMarker = v;
            s.curMarker = v;
        }
        return s.curMarker;
    }

    bool eval(Condition c) {
        switch (c) {
        case Condition::PathAhead: return path_free(pose_.dir);
        case Condition::NoPathAhead: return !path_free(pose_.dir);
        case Condition::PathLeft: return path_free(turn_left(pose_.dir));
        case Condition::NoPathLeft: return !path_free(turn_left(pose_.dir));
        case Condition::PathRight: return path_free(turn_right(pose_.dir));
        case Condition::NoPathRight: return !path_free(turn_right(pose_.dir));
        case Condition::Marker: return marker_here(true, 0) > 0;
        case Condition::NoMarker: return marker_here(true, 0) == 0;
        case Condition::Goal: break;
        }
        return false;
    }

    // Decision 1 means "keep looping": the current cell is not the goal.
    bool at_goal() {
        auto& s = cell(pose_.row, pose_.col);
        if (s.notGoal) return false;
        if (decide(2, "continue before goal at " + cell_name(pose_.cell()))) {
            s.notGoal = true;
            return false;
        }
        goal_ = pose_.cell();
        return true;
    }

    void act(Action a) {
        switch (a) {
        case Action::Move: {
            Cell c = step(pose_.cell(), pose_.dir);
            if (!inside(c) || cell(c.row, c.col).wall == Wall::Blocked) {
                crashed_ = true;
            } else {
                cell(c.row, c.col).wall = Wall::Free;
                pose_.row = c.row;
                pose_.col = c.col;
            }
            break;
        }
        case Action::TurnLeft: pose_.dir = turn_left(pose_.dir); break;
        case Action::TurnRight: pose_.dir = turn_right(pose_.dir); break;
        case Action::PutMarker: {
            int& m = marker_here(false, 0);
            if (m > 0)
                crashed_ = true;
            else
                m = 1;
            break;
        }
        case Action::PickMarker: {
            int& m = marker_here(false, 1);
            if (m == 0)
                crashed_ = true;
            else
                m = 0;
            break;
        }
        }
        steps_.push_back({a, pose_});
    }

    bool may_iterate(int done) {
        if (done >= ctx_.unrollCap) {
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
            for (int i = 0; !halted() && !at_goal(); ++i) {
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

    Trace make_trace() {
        Trace t;
        t.crashed = crashed_;
        t.depthExceeded = exceeded_;
        t.steps = steps_;
        t.counts = count_actions(steps_);
        t.finalPose = pose_;
        t.coveredNodes = covered_;
        for (int id : thenEntered_)
            if (elseEntered_.count(id)) t.coveredNodes.insert(id);
        for (int r = 0; r < ctx_.n; ++r)
            for (int c = 0; c < ctx_.n; ++c)
                if (cell(r, c).curMarker > 0) t.finalMarkers.push_back({r, c});
        return t;
    }

    TaskSpec materialize() {
        TaskSpec t;
        t.dialect = code_.dialect;
        t.n = ctx_.n;
        t.start = startPose_;
        t.store = ctx_.store;
        t.maxBlocks = code_size(code_);
        t.pregrid = Grid(ctx_.n);
        for (int r = 0; r < ctx_.n; ++r)
            for (int c = 0; c < ctx_.n; ++c) {
                const auto& s = cell(r, c);
                auto& g = t.pregrid.at(r, c);
                g.wall = s.wall == Wall::Free ? Wall::Free : Wall::Blocked;
                g.markers = g.wall == Wall::Free ? std::max(0, s.preMarker) : 0;
            }
        if (t.dialect == Dialect::Hoc) {
            t.goal = goal_;
            t.pregrid.at(*goal_).isGoal = true;
        } else {
            t.end = pose_;
            t.postgrid = t.pregrid;
            for (int r = 0; r < ctx_.n; ++r)
                for (int c = 0; c < ctx_.n; ++c) {
                    const auto& s = cell(r, c);
                    t.postgrid.at(r, c).markers = s.curMarker >= 0 ? s.curMarker : std::max(0, s.preMarker);
                }
        }
        return t;
    }

    const Code& code_;
    DecisionSource& src_;
    const SymContext& ctx_;
    std::vector<SymCell> cells_;
    AgentPose pose_;
    AgentPose startPose_;
    std::optional<Cell> goal_;
    bool crashed_ = false;
    bool exceeded_ = false;
    std::vector<int> decisions_;
    std::vector<ActionEvent> steps_;
    std::set<int> covered_;
    std::set<int> thenEntered_;
    std::set<int> elseEntered_;
};

std::set<Cell> visited_cells(const TaskSpec& task, const Trace& tr) {
    std::set<Cell> out{task.start.cell()};
    for (const auto& e : tr.steps) out.insert(e.pose.cell());
    return out;
}

double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * (1.0 / 9007199254740992.0); }

}  // namespace

InitialConfig initial_config(int index, int n) {
    if (index < 0 || index >= kNumInitialConfigs) throw ValidationError("initial configuration index out of range");
    const Cell locs[5] = {{0, 0}, {0, n - 1}, {n - 1, 0}, {n - 1, n - 1}, {n / 2, n / 2}};
    Cell c = locs[index / 4];
    return {{c.row, c.col, Dir(index % 4)}, index};
}

int GridPattern::count(Wall w) const { return int(std::count(cells.begin(), cells.end(), w)); }

GridPattern preinit_pattern(const std::string& name, int n) {
    GridPattern p;
    p.n = n;
    if (name == "none" || name.empty()) return p;
    p.cells.assign(size_t(n) * size_t(n), Wall::Unknown);
    if (name == "border") {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (r == 0 || c == 0 || r == n - 1 || c == n - 1) p.cells[size_t(r * n + c)] = Wall::Blocked;
        return p;
    }
    if (name.rfind("scatter(", 0) == 0 && name.back() == ')') {
        std::string args = name.substr(8, name.size() - 9);
        auto comma = args.find(',');
        if (comma == std::string::npos) throw ValidationError("scatter pattern needs (p,seed)");
        double prob = 0;
        std::uint64_t seed = 0;
        try {
            prob = std::stod(args.substr(0, comma));
            seed = std::stoull(args.substr(comma + 1));
        } catch (const std::exception&) {
            throw ValidationError("scatter pattern needs numeric (p,seed)");
        }
        if (prob < 0 || prob > 1) throw ValidationError("scatter probability must be in [0,1]");
        std::mt19937_64 rng(seed);
        for (auto& w : p.cells)
            if (unit_draw(rng) < prob) w = Wall::Blocked;
        return p;
    }
    throw ValidationError("unknown preinit pattern '" + name + "'");
}

std::string_view to_string(SymStatus s) {
    switch (s) {
    case SymStatus::TaskEmitted: return "taskEmitted";
    case SymStatus::Crashed: return "crashed";
    case SymStatus::DepthExceeded: return "depthExceeded";
    case SymStatus::Contradiction: return "contradiction";
    case SymStatus::NeedsDecision: return "needsDecision";
    }
    return "?";
}

std::optional<int> FixedDecisions::next(int, const std::string&) {
    if (pos_ >= d_.size()) return std::nullopt;
    return d_[pos_++];
}

std::optional<int> PrefixThenRandom::next(int arity, const std::string&) {
    if (pos_ < prefix_.size()) return prefix_[pos_++];
    if (pos_ == prefix_.size() && arityAfterPrefix_ == 0) arityAfterPrefix_ = arity;
    pos_++;
    return int(rng_() % std::uint64_t(arity));
}

SymContext make_sym_context(const SynthesisParams& params, const TaskSpec& refTask) {
    SymContext ctx;
    ctx.n = params.n;
    ctx.unrollCap = effective_unroll_cap(params, params.n);
    ctx.store = refTask.store;
    ctx.preinit = preinit_pattern(params.preinit, params.n);
    return ctx;
}

SymOutcome run_symbolic(const Code& code, DecisionSource& source, const SymContext& ctx) {
    if (ctx.n < 1 || ctx.n > 64) throw ValidationError("symbolic execution: n must be in 1..64");
    SymMachine m(code, source, ctx);
    return m.run();
}

SymOutcome run_symbolic(const Code& code, const std::vector<int>& decisions, const SymContext& ctx) {
    FixedDecisions src(decisions);
    return run_symbolic(code, src, ctx);
}

nlohmann::json sym_outcome_to_json(const SymOutcome& o) {
    nlohmann::json j;
    j["status"] = to_string(o.status);
    j["decisions"] = o.decisions;
    if (o.pending) j["pending"] = {{"arity", o.pending->arity}, {"description", o.pending->description}};
    if (o.status != SymStatus::NeedsDecision && o.status != SymStatus::Contradiction)
        j["trace"] = trace_to_json(o.trace);
    if (o.task) {
        j["task"] = task_to_json(*o.task);
        j["rendered"] = render_ascii(*o.task);
    }
    return j;
}

TaskSpec apply_distractors(const TaskSpec& task, const Code& code, std::uint64_t seed, int budget, int unrollCap) {
    if (budget <= 0) return task;
    Trace base = execute(code, task, unrollCap);
    if (!base.solved) return task;
    const int maxLen = code_size(code) - 1;
    std::vector<Cell> path;
    for (Cell c : visited_cells(task, base)) path.push_back(c);
    std::mt19937_64 rng(seed);
    TaskSpec cur = task;
    int converted = 0;
    const int attempts = 8 * budget + 16;
    for (int a = 0; a < attempts && converted < budget; ++a) {
        TaskSpec trial = cur;
        Cell at = path[rng() % path.size()];
        int added = 0;
        for (int stepNo = 0; stepNo < task.n && converted + added < budget; ++stepNo) {
            Cell nx = step(at, Dir(rng() % 4));
            if (!trial.pregrid.inside(nx)) break;
            auto& s = trial.pregrid.at(nx);
            if (s.wall == Wall::Blocked) {
                s.wall = Wall::Free;
                if (trial.dialect == Dialect::Karel) trial.postgrid.at(nx).wall = Wall::Free;
                added++;
            }
            at = nx;
        }
        if (!added) continue;
        Trace tr = execute(code, trial, unrollCap);
        bool samePath = tr.solved && !tr.crashed && tr.steps == base.steps && tr.coveredNodes == base.coveredNodes;
        if (!samePath) continue;
        if (maxLen >= 0 && find_shortcut(trial, maxLen).status != ShortcutStatus::None) continue;
        cur = std::move(trial);
        converted += added;
    }
    return cur;
}

std::vector<int> parse_decisions(const std::string& text) {
    std::vector<int> out;
    std::string tok;
    std::stringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (tok.empty()) continue;
        try {
            size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError("malformed decision '" + tok + "'");
        }
    }
    return out;
}

}  // namespace tasksyn
