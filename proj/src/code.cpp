#include "tasksyn/code.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

struct Named {
    std::string_view name;
    int value;
};

constexpr std::array kActionNames{
    Named{"move", int(Action::Move)},           Named{"turnLeft", int(Action::TurnLeft)},
    Named{"turnRight", int(Action::TurnRight)}, Named{"putMarker", int(Action::PutMarker)},
    Named{"pickMarker", int(Action::PickMarker)},
};
constexpr std::array kActionAliases{
    Named{"turnL", int(Action::TurnLeft)},
    Named{"turnR", int(Action::TurnRight)},
    Named{"putM", int(Action::PutMarker)},
    Named{"pickM", int(Action::PickMarker)},
};
constexpr std::array kCondNames{
    Named{"pathAhead", int(Condition::PathAhead)},     Named{"noPathAhead", int(Condition::NoPathAhead)},
    Named{"pathLeft", int(Condition::PathLeft)},       Named{"noPathLeft", int(Condition::NoPathLeft)},
    Named{"pathRight", int(Condition::PathRight)},     Named{"noPathRight", int(Condition::NoPathRight)},
    Named{"marker", int(Condition::Marker)},           Named{"noMarker", int(Condition::NoMarker)},
    Named{"goal", int(Condition::Goal)},
};
constexpr std::array kCondAliases{
    Named{"pathA", int(Condition::PathAhead)},   Named{"noPathA", int(Condition::NoPathAhead)},
    Named{"pathL", int(Condition::PathLeft)},    Named{"noPathL", int(Condition::NoPathLeft)},
    Named{"pathR", int(Condition::PathRight)},   Named{"noPathR", int(Condition::NoPathRight)},
};
constexpr std::array kBlockNames{
    Named{"move", int(BlockKind::Move)},
    Named{"turnLeft", int(BlockKind::TurnLeft)},
    Named{"turnRight", int(BlockKind::TurnRight)},
    Named{"putMarker", int(BlockKind::PutMarker)},
    Named{"pickMarker", int(BlockKind::PickMarker)},
    Named{"Repeat", int(BlockKind::Repeat)},
    Named{"While", int(BlockKind::While)},
    Named{"RepeatUntil", int(BlockKind::RepeatUntil)},
    Named{"If", int(BlockKind::If)},
    Named{"IfElse", int(BlockKind::IfElse)},
};

template <typename Arr>
std::optional<int> lookup(const Arr& arr, std::string_view s) {
    for (const auto& n : arr)
        if (n.name == s) return n.value;
    return std::nullopt;
}

template <typename Arr>
std::string_view name_of(const Arr& arr, int v) {
    for (const auto& n : arr)
        if (n.value == v) return n.name;
    return "?";
}

int number_list(std::vector<Stmt>& list, int next) {
    for (auto& s : list) {
        s.id = next++;
        next = number_list(s.body, next);
        next = number_list(s.elseBody, next);
    }
    return next;
}

void collect_props(const std::vector<Stmt>& list, int level, CodeProps& p) {
    for (const auto& s : list) {
        p.size++;
        p.depth = std::max(p.depth, level);
        switch (s.kind) {
        case Stmt::Kind::Action: p.blocks.insert(block_of(s.action)); break;
        case Stmt::Kind::Repeat: p.blocks.insert(BlockKind::Repeat); break;
        case Stmt::Kind::While: p.blocks.insert(BlockKind::While); break;
        case Stmt::Kind::RepeatUntil: p.blocks.insert(BlockKind::RepeatUntil); break;
        case Stmt::Kind::If: p.blocks.insert(BlockKind::If); break;
        case Stmt::Kind::IfElse: p.blocks.insert(BlockKind::IfElse); break;
        }
        collect_props(s.body, level + 1, p);
        collect_props(s.elseBody, level + 1, p);
    }
}

std::string_view construct_name(Stmt::Kind k) {
    switch (k) {
    case Stmt::Kind::Repeat: return "Repeat";
    case Stmt::Kind::While: return "While";
    case Stmt::Kind::RepeatUntil: return "RepeatUntil";
    case Stmt::Kind::If: return "If";
    case Stmt::Kind::IfElse: return "IfElse";
    default: return "";
    }
}

void sig_list(const std::vector<Stmt>& list, std::string& out);

void sig_stmt(const Stmt& s, std::string& out) {
    out += construct_name(s.kind);
    bool nested = std::any_of(s.body.begin(), s.body.end(), [](const Stmt& c) { return !c.isAction(); }) ||
                  std::any_of(s.elseBody.begin(), s.elseBody.end(), [](const Stmt& c) { return !c.isAction(); });
    if (!nested) return;
    out += '{';
    sig_list(s.body, out);
    if (s.kind == Stmt::Kind::IfElse) {
        out += '|';
        sig_list(s.elseBody, out);
    }
    out += '}';
}

void sig_list(const std::vector<Stmt>& list, std::string& out) {
    bool first = true;
    for (const auto& s : list) {
        if (s.isAction()) continue;
        if (!first) out += ',';
        first = false;
        sig_stmt(s, out);
    }
}

void validate_list(const std::vector<Stmt>& list, Dialect d, bool top) {
    for (size_t i = 0; i < list.size(); ++i) {
        const Stmt& s = list[i];
        switch (s.kind) {
        case Stmt::Kind::Action:
            if (!action_in_dialect(s.action, d))
                throw ValidationError(std::string(to_string(s.action)) + " is not allowed in " +
                                      std::string(to_string(d)));
            continue;
        case Stmt::Kind::Repeat:
            if (s.iter < 2 || s.iter > 10)
                throw ValidationError("Repeat iteration count " + std::to_string(s.iter) + " outside 2..10");
            break;
        case Stmt::Kind::While:
            if (d != Dialect::Karel) throw ValidationError("While is only allowed in karel");
            [[fallthrough]];
        case Stmt::Kind::If:
        case Stmt::Kind::IfElse:
            if (!condition_in_dialect(s.cond, d))
                throw ValidationError(std::string(to_string(s.cond)) + " is not a valid condition in " +
                                      std::string(to_string(d)));
            break;
        case Stmt::Kind::RepeatUntil:
            if (d != Dialect::Hoc) throw ValidationError("RepeatUntil is only allowed in hoc");
            if (s.cond != Condition::Goal) throw ValidationError("RepeatUntil condition must be goal");
            if (!top || i + 1 != list.size())
                throw ValidationError("RepeatUntil must be the last top-level statement");
            break;
        }
        if (s.body.empty()) throw ValidationError(std::string(construct_name(s.kind)) + " has an empty body");
        if (s.kind == Stmt::Kind::IfElse && s.elseBody.empty())
            throw ValidationError("Else branch is empty");
        if (s.kind != Stmt::Kind::IfElse && !s.elseBody.empty())
            throw ValidationError("only IfElse has an else branch");
        validate_list(s.body, d, false);
        validate_list(s.elseBody, d, false);
    }
}

void print_list(const std::vector<Stmt>& list, int indent, std::ostringstream& os) {
    std::string pad(size_t(indent) * 2, ' ');
    for (const auto& s : list) {
        os << pad;
        switch (s.kind) {
        case Stmt::Kind::Action: os << to_string(s.action) << '\n'; continue;
        case Stmt::Kind::Repeat: os << "Repeat(" << s.iter << "){\n"; break;
        case Stmt::Kind::While: os << "While(" << to_string(s.cond) << "){\n"; break;
        case Stmt::Kind::RepeatUntil: os << "RepeatUntil(" << to_string(s.cond) << "){\n"; break;
        case Stmt::Kind::If:
        case Stmt::Kind::IfElse: os << "If(" << to_string(s.cond) << "){\n"; break;
        }
        print_list(s.body, indent + 1, os);
        if (s.kind == Stmt::Kind::IfElse) {
            os << pad << "} Else {\n";
            print_list(s.elseBody, indent + 1, os);
        }
        os << pad << "}\n";
    }
}

void key_list(const std::vector<Stmt>& list, std::string& out) {
    bool first = true;
    for (const auto& s : list) {
        if (!first) out += ' ';
        first = false;
        switch (s.kind) {
        case Stmt::Kind::Action: out += to_string(s.action); continue;
        case Stmt::Kind::Repeat: out += "Repeat(" + std::to_string(s.iter) + ")"; break;
        case Stmt::Kind::While: out += "While(" + std::string(to_string(s.cond)) + ")"; break;
        case Stmt::Kind::RepeatUntil: out += "RepeatUntil(" + std::string(to_string(s.cond)) + ")"; break;
        case Stmt::Kind::If:
        case Stmt::Kind::IfElse: out += "If(" + std::string(to_string(s.cond)) + ")"; break;
        }
        out += '{';
        key_list(s.body, out);
        out += '}';
        if (s.kind == Stmt::Kind::IfElse) {
            out += " Else{";
            key_list(s.elseBody, out);
            out += '}';
        }
    }
}

std::string_view json_type(Stmt::Kind k) {
    switch (k) {
    case Stmt::Kind::Action: return "action";
    case Stmt::Kind::Repeat: return "repeat";
    case Stmt::Kind::While: return "while";
    case Stmt::Kind::RepeatUntil: return "repeatUntil";
    case Stmt::Kind::If: return "if";
    case Stmt::Kind::IfElse: return "ifElse";
    }
    return "";
}

nlohmann::json list_to_json(const std::vector<Stmt>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : list) {
        nlohmann::json j;
        if (s.isAction()) {
            j["type"] = to_string(s.action);
        } else {
            j["type"] = json_type(s.kind);
            if (s.kind == Stmt::Kind::Repeat)
                j["iter"] = s.iter;
            else
                j["cond"] = to_string(s.cond);
            j["body"] = list_to_json(s.body);
            if (s.kind == Stmt::Kind::IfElse) j["elseBody"] = list_to_json(s.elseBody);
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<Stmt> list_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ValidationError("statement list must be an array");
    std::vector<Stmt> out;
    for (const auto& j : arr) {
        std::string type = j.at("type").get<std::string>();
        if (auto a = action_from_string(type)) {
            out.push_back(Stmt::act(*a));
            continue;
        }
        Stmt s;
        if (type == "repeat") {
            s.kind = Stmt::Kind::Repeat;
            s.iter = j.at("iter").get<int>();
        } else {
            if (type == "while")
                s.kind = Stmt::Kind::While;
            else if (type == "repeatUntil")
                s.kind = Stmt::Kind::RepeatUntil;
            else if (type == "if")
                s.kind = Stmt::Kind::If;
            else if (type == "ifElse")
                s.kind = Stmt::Kind::IfElse;
            else
                throw ValidationError("unknown statement type '" + type + "'");
            auto c = condition_from_string(j.at("cond").get<std::string>());
            if (!c) throw ValidationError("unknown condition '" + j.at("cond").get<std::string>() + "'");
            s.cond = *c;
        }
        s.body = list_from_json(j.at("body"));
        if (s.kind == Stmt::Kind::IfElse) s.elseBody = list_from_json(j.at("elseBody"));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

Stmt Stmt::act(Action a) {
    Stmt s;
    s.kind = Kind::Action;
    s.action = a;
    return s;
}

Stmt Stmt::repeat(int iter, std::vector<Stmt> body) {
    Stmt s;
    s.kind = Kind::Repeat;
    s.iter = iter;
    s.body = std::move(body);
    return s;
}

Stmt Stmt::whileLoop(Condition c, std::vector<Stmt> body) {
    Stmt s;
    s.kind = Kind::While;
    s.cond = c;
    s.body = std::move(body);
    return s;
}

Stmt Stmt::repeatUntil(std::vector<Stmt> body) {
    Stmt s;
    s.kind = Kind::RepeatUntil;
    s.cond = Condition::Goal;
    s.body = std::move(body);
    return s;
}

Stmt Stmt::ifThen(Condition c, std::vector<Stmt> body) {
    Stmt s;
    s.kind = Kind::If;
    s.cond = c;
    s.body = std::move(body);
    return s;
}

Stmt Stmt::ifElse(Condition c, std::vector<Stmt> thenBody, std::vector<Stmt> elseBody) {
    Stmt s;
    s.kind = Kind::IfElse;
    s.cond = c;
    s.body = std::move(thenBody);
    s.elseBody = std::move(elseBody);
    return s;
}

bool Stmt::operator==(const Stmt& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
    case Kind::Action: return action == o.action;
    case Kind::Repeat: return iter == o.iter && body == o.body;
    case Kind::IfElse: return cond == o.cond && body == o.body && elseBody == o.elseBody;
    default: return cond == o.cond && body == o.body;
    }
}

int number_nodes(Code& code) { return number_list(code.body, 0); }

Code make_code(Dialect d, std::vector<Stmt> body) {
    Code c{d, std::move(body)};
    number_nodes(c);
    return c;
}

std::string print_code(const Code& code) {
    std::ostringstream os;
    os << "def Run(){\n";
    print_list(code.body, 1, os);
    os << "}";
    return os.str();
}

std::string code_key(const Code& code) {
    std::string out;
    key_list(code.body, out);
    return out;
}

CodeProps code_props(const Code& code) {
    CodeProps p;
    collect_props(code.body, 1, p);
    p.structSig = struct_sig(code);
    return p;
}

int code_size(const Code& code) {
    CodeProps p;
    collect_props(code.body, 1, p);
    return p.size;
}

std::string struct_sig(const Code& code) {
    std::string out = "Run{";
    sig_list(code.body, out);
    out += '}';
    return out;
}

bool struct_equal(const Code& a, const Code& b) { return struct_sig(a) == struct_sig(b); }

bool has_loop_until_or_while(const Code& code) {
    auto blocks = code_props(code).blocks;
    return blocks.count(BlockKind::While) || blocks.count(BlockKind::RepeatUntil);
}

void validate_code(const Code& code) { validate_list(code.body, code.dialect, true); }

nlohmann::json code_to_json(const Code& code) {
    return {{"type", "run"}, {"dialect", to_string(code.dialect)}, {"body", list_to_json(code.body)}};
}

Code code_from_json(const nlohmann::json& j) {
    try {
        auto d = dialect_from_string(j.at("dialect").get<std::string>());
        if (!d) throw ValidationError("unknown dialect");
        Code c = make_code(*d, list_from_json(j.at("body")));
        validate_code(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed code JSON: ") + e.what());
    }
}

std::string_view to_string(Action a) { return name_of(kActionNames, int(a)); }
std::string_view to_string(Condition c) { return name_of(kCondNames, int(c)); }
std::string_view to_string(BlockKind b) { return name_of(kBlockNames, int(b)); }
std::string_view to_string(Dialect d) { return d == Dialect::Hoc ? "hoc" : "karel"; }

std::optional<Action> action_from_string(std::string_view s) {
    auto v = lookup(kActionNames, s);
    if (!v) v = lookup(kActionAliases, s);
    if (!v) return std::nullopt;
    return Action(*v);
}

std::optional<Condition> condition_from_string(std::string_view s) {
    auto v = lookup(kCondNames, s);
    if (!v) v = lookup(kCondAliases, s);
    if (!v) return std::nullopt;
    return Condition(*v);
}

std::optional<BlockKind> block_kind_from_string(std::string_view s) {
    auto v = lookup(kBlockNames, s);
    if (!v) {
        if (auto a = action_from_string(s)) return block_of(*a);
        return std::nullopt;
    }
    return BlockKind(*v);
}

std::optional<Dialect> dialect_from_string(std::string_view s) {
    if (s == "hoc" || s == "HOC") return Dialect::Hoc;
    if (s == "karel" || s == "Karel") return Dialect::Karel;
    return std::nullopt;
}

const std::vector<Action>& dialect_actions(Dialect d) {
    static const std::vector<Action> hoc{Action::Move, Action::TurnLeft, Action::TurnRight};
    static const std::vector<Action> karel{Action::Move, Action::TurnLeft, Action::TurnRight, Action::PutMarker,
                                           Action::PickMarker};
    return d == Dialect::Hoc ? hoc : karel;
}

const std::vector<Condition>& dialect_conditions(Dialect d) {
    static const std::vector<Condition> hoc{Condition::PathAhead, Condition::PathLeft, Condition::PathRight};
    static const std::vector<Condition> karel{Condition::PathAhead, Condition::NoPathAhead, Condition::PathLeft,
                                              Condition::NoPathLeft, Condition::PathRight, Condition::NoPathRight,
                                              Condition::Marker, Condition::NoMarker};
    return d == Dialect::Hoc ? hoc : karel;
}

const std::vector<BlockKind>& dialect_blocks(Dialect d) {
    static const std::vector<BlockKind> hoc{BlockKind::Move, BlockKind::TurnLeft, BlockKind::TurnRight,
                                            BlockKind::Repeat, BlockKind::RepeatUntil, BlockKind::If,
                                            BlockKind::IfElse};
    static const std::vector<BlockKind> karel{BlockKind::Move,       BlockKind::TurnLeft, BlockKind::TurnRight,
                                              BlockKind::PutMarker,  BlockKind::PickMarker, BlockKind::Repeat,
                                              BlockKind::While,      BlockKind::If,       BlockKind::IfElse};
    return d == Dialect::Hoc ? hoc : karel;
}

bool action_in_dialect(Action a, Dialect d) {
    return d == Dialect::Karel || (a != Action::PutMarker && a != Action::PickMarker);
}

bool condition_in_dialect(Condition c, Dialect d) {
    const auto& v = dialect_conditions(d);
    return std::find(v.begin(), v.end(), c) != v.end();
}

BlockKind block_of(Action a) {
    switch (a) {
    case Action::Move: return BlockKind::Move;
    case Action::TurnLeft: return BlockKind::TurnLeft;
    case Action::TurnRight: return BlockKind::TurnRight;
    case Action::PutMarker: return BlockKind::PutMarker;
    case Action::PickMarker: return BlockKind::PickMarker;
    }
    return BlockKind::Move;
}

Condition negate(Condition c) {
    switch (c) {
    case Condition::PathAhead: return Condition::NoPathAhead;
    case Condition::NoPathAhead: return Condition::PathAhead;
    case Condition::PathLeft: return Condition::NoPathLeft;
    case Condition::NoPathLeft: return Condition::PathLeft;
    case Condition::PathRight: return Condition::NoPathRight;
    case Condition::NoPathRight: return Condition::PathRight;
    case Condition::Marker: return Condition::NoMarker;
    case Condition::NoMarker: return Condition::Marker;
    case Condition::Goal: return Condition::Goal;
    }
    return c;
}

}  // namespace tasksyn
