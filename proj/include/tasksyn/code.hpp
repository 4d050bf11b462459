#pragma once

#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tasksyn {

enum class Dialect { Hoc, Karel };

enum class Action { Move, TurnLeft, TurnRight, PutMarker, PickMarker };

enum class Condition {
    PathAhead,
    NoPathAhead,
    PathLeft,
    NoPathLeft,
    PathRight,
    NoPathRight,
    Marker,
    NoMarker,
    Goal
};

// Everything that can appear in a toolbox (T_store) or C_blocks.
enum class BlockKind {
    Move,
    TurnLeft,
    TurnRight,
    PutMarker,
    PickMarker,
    Repeat,
    While,
    RepeatUntil,
    If,
    IfElse
};

struct Stmt {
    enum class Kind { Action, Repeat, While, RepeatUntil, If, IfElse };

    Kind kind = Kind::Action;
    Action action = Action::Move;
    Condition cond = Condition::PathAhead;
    int iter = 0;
    std::vector<Stmt> body;
    std::vector<Stmt> elseBody;
    // Preorder index within the program, assigned by number_nodes().
    int id = -1;

    static Stmt act(Action a);
    static Stmt repeat(int iter, std::vector<Stmt> body);
    static Stmt whileLoop(Condition c, std::vector<Stmt> body);
    static Stmt repeatUntil(std::vector<Stmt> body);
    static Stmt ifThen(Condition c, std::vector<Stmt> body);
    static Stmt ifElse(Condition c, std::vector<Stmt> thenBody, std::vector<Stmt> elseBody);

    bool isAction() const { return kind == Kind::Action; }
    // Ids are derived data and do not take part in equality.
    bool operator==(const Stmt& o) const;
};

struct Code {
    Dialect dialect = Dialect::Hoc;
    std::vector<Stmt> body;

    bool operator==(const Code& o) const { return dialect == o.dialect && body == o.body; }
};

struct CodeProps {
    std::set<BlockKind> blocks;
    int size = 0;
    int depth = 0;
    std::string structSig;
};

// Assigns preorder ids starting at 0; returns the node count.
int number_nodes(Code& code);
Code make_code(Dialect d, std::vector<Stmt> body);

Code parse_code(std::string_view text, Dialect dialect);
std::string print_code(const Code& code);
// Single-line rendering used for ids, logs and dedup keys.
std::string code_key(const Code& code);

CodeProps code_props(const Code& code);
int code_size(const Code& code);
std::string struct_sig(const Code& code);
bool struct_equal(const Code& a, const Code& b);
bool has_loop_until_or_while(const Code& code);

// Throws ValidationError when an invariant of the dialect grammar is violated.
void validate_code(const Code& code);

nlohmann::json code_to_json(const Code& code);
Code code_from_json(const nlohmann::json& j);

std::string_view to_string(Action a);
std::string_view to_string(Condition c);
std::string_view to_string(BlockKind b);
std::string_view to_string(Dialect d);
std::optional<Action> action_from_string(std::string_view s);
std::optional<Condition> condition_from_string(std::string_view s);
std::optional<BlockKind> block_kind_from_string(std::string_view s);
std::optional<Dialect> dialect_from_string(std::string_view s);

const std::vector<Action>& dialect_actions(Dialect d);
// Conditions usable in If/IfElse/While for the dialect (never goal).
const std::vector<Condition>& dialect_conditions(Dialect d);
const std::vector<BlockKind>& dialect_blocks(Dialect d);
bool action_in_dialect(Action a, Dialect d);
bool condition_in_dialect(Condition c, Dialect d);
BlockKind block_of(Action a);
Condition negate(Condition c);

}  // namespace tasksyn
