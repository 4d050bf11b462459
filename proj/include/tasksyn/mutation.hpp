#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tasksyn/code.hpp"
#include "tasksyn/task.hpp"

namespace tasksyn {

enum class Stage { D0, D01, All };

std::optional<Stage> stage_from_string(std::string_view s);

using SlotValue = std::optional<Action>;  // nullopt is the empty action φ

struct Slot {
    bool original = false;
    SlotValue ref;
    std::vector<SlotValue> domain;
    // Insertion site inside the sequence: 0 = leading block, i = gap after the
    // i-th original, originals() = trailing block. Original slots use -1.
    int site = -1;
};

struct ActionSeq {
    std::vector<Slot> slots;

    int originals() const;
    std::vector<Action> ref_actions() const;
    int site_capacity(int site) const;
    int site_count() const;
};

struct CondVar {
    Condition ref;
    std::vector<Condition> domain;
};

struct IterVar {
    int ref;
};

struct SketchNode {
    enum class Kind { Seq, Repeat, While, RepeatUntil, If, IfElse };
    Kind kind = Kind::Seq;
    int seq = -1;
    int cond = -1;
    int iter = -1;
    std::vector<SketchNode> body;
    std::vector<SketchNode> elseBody;
};

struct Sketch {
    Code origin;
    int deltaSize = 2;
    std::vector<SketchNode> skeleton;
    std::vector<ActionSeq> seqs;
    std::vector<CondVar> conds;
    std::vector<IterVar> iters;

    Dialect dialect() const { return origin.dialect; }
};

Sketch build_sketch(const Code& code, int deltaSize);

// Condition group a reference condition may move within.
std::vector<Condition> condition_group(Condition ref, Dialect d);
std::vector<int> iter_domain(int ref, int deltaIter);
const std::vector<std::vector<Action>>& elimination_sequences(Dialect d);
bool contains_elimination(const std::vector<Action>& run, Dialect d);
// Rule for the action run that opens the body of a construct guarded by `c`.
bool body_rule_holds(Condition c, const std::vector<Action>& run);

struct Instantiation {
    std::vector<std::vector<Action>> seqs;
    std::vector<Condition> conds;
    std::vector<int> iters;
};

Code instantiate(const Sketch& sk, const Instantiation& inst);

std::vector<Code> enumerate_mutations(const Sketch& sk, const SynthesisParams& params, Stage stage = Stage::All);

struct ConstraintReport {
    bool structure = true;
    bool d0 = true;
    bool d1 = true;
    bool d2 = true;
    bool d3 = true;
    bool d4 = true;
    bool d5 = true;
    bool d6 = true;
    std::vector<std::string> messages;

    bool all() const { return structure && d0 && d1 && d2 && d3 && d4 && d5 && d6; }
    // Name of the first failing family, or empty when all pass.
    std::string first_failure() const;
};

// Evaluates each constraint family directly on `code`. Throws ValidationError
// when the construct structure does not match the sketch.
ConstraintReport check_constraints(const Code& code, const Sketch& sk, const SynthesisParams& params,
                                   Stage stage = Stage::All);

struct StageCounts {
    std::uint64_t d0 = 0;
    std::uint64_t d01 = 0;
    std::uint64_t all = 0;
    double elapsedSeconds = 0;
};

StageCounts stage_counts(const Sketch& sk, const SynthesisParams& params);

}  // namespace tasksyn
