#include "tasksyn/task.hpp"

#include <algorithm>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

using nlohmann::json;

Cell cell_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ValidationError(std::string(field) + ": expected [row, col]");
    return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<Cell> cells_from_json(const json& j, const char* field) {
    std::vector<Cell> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw ValidationError(std::string(field) + ": expected a list of [row, col]");
    for (const auto& e : j) out.push_back(cell_from_json(e, field));
    return out;
}

json pose_to_json(const AgentPose& p) { return {{"row", p.row}, {"col", p.col}, {"dir", to_string(p.dir)}}; }

AgentPose pose_from_json(const json& s, const std::string& field) {
    AgentPose p;
    p.row = s.at("row").get<int>();
    p.col = s.at("col").get<int>();
    auto dir = dir_from_string(s.at("dir").get<std::string>());
    if (!dir) throw ValidationError(field + ".dir: expected north/east/south/west");
    p.dir = *dir;
    return p;
}

json cells_to_json(const Grid& g, bool markers) {
    json arr = json::array();
    for (int r = 0; r < g.n(); ++r)
        for (int c = 0; c < g.n(); ++c) {
            const auto& s = g.at(r, c);
            if (markers ? s.markers > 0 : s.wall == Wall::Blocked) arr.push_back({r, c});
        }
    return arr;
}

char agent_char(Dir d) {
    switch (d) {
    case Dir::North: return '^';
    case Dir::East: return '>';
    case Dir::South: return 'v';
    case Dir::West: return '<';
    }
    return '?';
}

std::string render_row(const Grid& g, int r, const std::optional<AgentPose>& agent) {
    std::string line;
    for (int c = 0; c < g.n(); ++c) {
        const auto& s = g.at(r, c);
        if (s.wall == Wall::Unknown) throw ValidationError("render: unknown cell at (" + std::to_string(r) + "," +
                                                           std::to_string(c) + ")");
        char ch = '.';
        if (s.wall == Wall::Blocked)
            ch = '#';
        else if (s.markers > 0)
            ch = 'm';
        else if (s.isGoal)
            ch = '+';
        if (agent && agent->row == r && agent->col == c) ch = agent_char(agent->dir);
        line += ch;
    }
    return line;
}

std::string cell_str(int r, int c) { return "(" + std::to_string(r) + "," + std::to_string(c) + ")"; }

}  // namespace

int effective_unroll_cap(const SynthesisParams& p, int n) { return p.unrollCap > 0 ? p.unrollCap : 2 * n; }

double effective_delta_qual(const SynthesisParams& p, const Code& code) {
    if (p.deltaQual) return *p.deltaQual;
    return has_loop_until_or_while(code) ? 0.2 : 0.05;
}

std::string_view to_string(Dir d) {
    switch (d) {
    case Dir::North: return "north";
    case Dir::East: return "east";
    case Dir::South: return "south";
    case Dir::West: return "west";
    }
    return "?";
}

std::optional<Dir> dir_from_string(std::string_view s) {
    if (s == "north") return Dir::North;
    if (s == "east") return Dir::East;
    if (s == "south") return Dir::South;
    if (s == "west") return Dir::West;
    return std::nullopt;
}

Dir turn_left(Dir d) { return Dir((int(d) + 3) % 4); }
Dir turn_right(Dir d) { return Dir((int(d) + 1) % 4); }

Cell step(Cell c, Dir d) {
    switch (d) {
    case Dir::North: return {c.row - 1, c.col};
    case Dir::East: return {c.row, c.col + 1};
    case Dir::South: return {c.row + 1, c.col};
    case Dir::West: return {c.row, c.col - 1};
    }
    return c;
}

void validate_task(const TaskSpec& t) {
    if (t.n < 1 || t.n > 64) throw ValidationError("n: grid size must be in 1..64");
    if (t.pregrid.n() != t.n) throw ValidationError("pregrid: size does not match n");
    if (!t.pregrid.inside(t.start.row, t.start.col)) throw ValidationError("start: pose outside the grid");
    if (t.maxBlocks < 0) throw ValidationError("maxBlocks: must be non-negative");
    for (auto b : t.store) {
        const auto& allowed = dialect_blocks(t.dialect);
        if (std::find(allowed.begin(), allowed.end(), b) == allowed.end())
            throw ValidationError("store: " + std::string(to_string(b)) + " is not a " +
                                  std::string(to_string(t.dialect)) + " block");
    }
    int goals = 0;
    for (int r = 0; r < t.n; ++r)
        for (int c = 0; c < t.n; ++c) {
            const auto& s = t.pregrid.at(r, c);
            if (s.wall == Wall::Unknown) throw ValidationError("walls: unknown cell at " + cell_str(r, c));
            if (s.isGoal) {
                goals++;
                if (s.wall != Wall::Free) throw ValidationError("goal: goal cell is blocked");
            }
            if (s.markers < 0 || s.markers > 1) throw ValidationError("premarkers: at most one marker per cell");
            if (s.markers > 0 && s.wall != Wall::Free)
                throw ValidationError("premarkers: marker on blocked cell " + cell_str(r, c));
        }
    if (t.pregrid.at(t.start.row, t.start.col).wall != Wall::Free)
        throw ValidationError("start: agent stands on a blocked cell");
    if (t.dialect == Dialect::Hoc) {
        if (!t.goal || goals != 1) throw ValidationError("goal: hoc task needs exactly one goal cell");
        if (!t.pregrid.inside(*t.goal) || !t.pregrid.at(*t.goal).isGoal)
            throw ValidationError("goal: goal coordinate disagrees with the grid");
        if (t.postgrid.n() != 0) throw ValidationError("postgrid: hoc tasks have no postgrid");
        if (t.end) throw ValidationError("end: hoc tasks have no end pose");
        for (int r = 0; r < t.n; ++r)
            for (int c = 0; c < t.n; ++c)
                if (t.pregrid.at(r, c).markers) throw ValidationError("premarkers: hoc tasks carry no markers");
    } else {
        if (t.goal || goals) throw ValidationError("goal: karel tasks have no goal cell");
        if (t.postgrid.n() != t.n) throw ValidationError("postgrid: size does not match n");
        if (t.end && !t.postgrid.is_free(t.end->row, t.end->col))
            throw ValidationError("end: pose outside the grid or on a blocked cell");
        for (int r = 0; r < t.n; ++r)
            for (int c = 0; c < t.n; ++c) {
                const auto& a = t.pregrid.at(r, c);
                const auto& b = t.postgrid.at(r, c);
                if (a.wall != b.wall) throw ValidationError("postgrid: walls differ from pregrid at " + cell_str(r, c));
                if (b.isGoal) throw ValidationError("postgrid: karel tasks have no goal cell");
                if (b.markers < 0 || b.markers > 1) throw ValidationError("postmarkers: at most one marker per cell");
                if (b.markers > 0 && b.wall != Wall::Free)
                    throw ValidationError("postmarkers: marker on blocked cell " + cell_str(r, c));
            }
    }
}

json task_to_json(const TaskSpec& t) {
    json j;
    j["dialect"] = to_string(t.dialect);
    j["n"] = t.n;
    j["start"] = pose_to_json(t.start);
    if (t.end) j["end"] = pose_to_json(*t.end);
    if (t.goal) j["goal"] = {t.goal->row, t.goal->col};
    j["walls"] = cells_to_json(t.pregrid, false);
    if (t.dialect == Dialect::Karel) {
        j["premarkers"] = cells_to_json(t.pregrid, true);
        j["postmarkers"] = cells_to_json(t.postgrid, true);
    }
    json store = json::array();
    for (auto b : t.store) store.push_back(to_string(b));
    j["store"] = store;
    j["maxBlocks"] = t.maxBlocks;
    return j;
}

TaskSpec task_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ValidationError("task: expected a JSON object");
        TaskSpec t;
        auto d = dialect_from_string(j.at("dialect").get<std::string>());
        if (!d) throw ValidationError("dialect: expected hoc or karel");
        t.dialect = *d;
        t.n = j.at("n").get<int>();
        if (t.n < 1 || t.n > 64) throw ValidationError("n: grid size must be in 1..64");
        t.pregrid = Grid(t.n);
        t.start = pose_from_json(j.at("start"), "start");
        if (j.contains("end")) t.end = pose_from_json(j.at("end"), "end");
        for (auto c : cells_from_json(j.value("walls", json()), "walls")) {
            if (!t.pregrid.inside(c)) throw ValidationError("walls: cell outside the grid");
            t.pregrid.at(c).wall = Wall::Blocked;
        }
        if (j.contains("goal")) {
            Cell g = cell_from_json(j["goal"], "goal");
            if (!t.pregrid.inside(g)) throw ValidationError("goal: cell outside the grid");
            t.goal = g;
            t.pregrid.at(g).isGoal = true;
        }
        if (t.dialect == Dialect::Karel) {
            t.postgrid = t.pregrid;
            for (auto c : cells_from_json(j.value("premarkers", json()), "premarkers")) {
                if (!t.pregrid.inside(c)) throw ValidationError("premarkers: cell outside the grid");
                t.pregrid.at(c).markers++;
            }
            for (auto c : cells_from_json(j.value("postmarkers", json()), "postmarkers")) {
                if (!t.postgrid.inside(c)) throw ValidationError("postmarkers: cell outside the grid");
                t.postgrid.at(c).markers++;
            }
        } else if (j.contains("premarkers") || j.contains("postmarkers")) {
            throw ValidationError("premarkers: hoc tasks carry no markers");
        }
        for (const auto& b : j.value("store", json::array())) {
            auto k = block_kind_from_string(b.get<std::string>());
            if (!k) throw ValidationError("store: unknown block '" + b.get<std::string>() + "'");
            t.store.insert(*k);
        }
        t.maxBlocks = j.value("maxBlocks", 0);
        validate_task(t);
        return t;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("task: malformed JSON: ") + e.what());
    }
}

TaskSpec load_task(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("task: malformed JSON: ") + e.what());
    }
    return task_from_json(j);
}

std::string save_task(const TaskSpec& t) { return task_to_json(t).dump(); }

std::string render_ascii(const TaskSpec& t) {
    std::string out;
    for (int r = 0; r < t.n; ++r) {
        out += render_row(t.pregrid, r, t.start);
        if (t.dialect == Dialect::Karel) {
            out += ' ';
            out += render_row(t.postgrid, r, t.end);
        }
        out += '\n';
    }
    return out;
}

bool is_conceptually_similar(const TaskSpec& task, const Code& code, const TaskSpec& refTask, const Code& refCode,
                             int deltaSize) {
    return task.store == refTask.store && std::abs(task.maxBlocks - refTask.maxBlocks) <= deltaSize &&
           struct_equal(code, refCode);
}

}  // namespace tasksyn
