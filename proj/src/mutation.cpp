#include "tasksyn/mutation.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <unordered_set>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

using Run = std::vector<Action>;

constexpr Action M = Action::Move;
constexpr Action L = Action::TurnLeft;
constexpr Action R = Action::TurnRight;
constexpr Action Pi = Action::PickMarker;
constexpr Action Pu = Action::PutMarker;

bool is_turn(Action a) { return a == L || a == R; }
bool is_marker(Action a) { return a == Pi || a == Pu; }

// Original slots keep their action class: move stays move, turns and marker
// actions may flip within their class.
bool same_class(Action a, Action ref) {
    if (ref == M) return a == M;
    if (is_turn(ref)) return is_turn(a);
    return is_marker(a);
}

std::vector<SlotValue> original_domain(Action ref) {
    if (ref == M) return {M};
    if (is_turn(ref)) return {L, R};
    return {Pu, Pi};
}

std::vector<SlotValue> insertion_domain(Dialect d) {
    std::vector<SlotValue> dom{std::nullopt};
    for (auto a : dialect_actions(d)) dom.push_back(a);
    return dom;
}

SketchNode::Kind node_kind(Stmt::Kind k) {
    switch (k) {
    case Stmt::Kind::Repeat: return SketchNode::Kind::Repeat;
    case Stmt::Kind::While: return SketchNode::Kind::While;
    case Stmt::Kind::RepeatUntil: return SketchNode::Kind::RepeatUntil;
    case Stmt::Kind::If: return SketchNode::Kind::If;
    case Stmt::Kind::IfElse: return SketchNode::Kind::IfElse;
    default: return SketchNode::Kind::Seq;
    }
}

Stmt::Kind stmt_kind(SketchNode::Kind k) {
    switch (k) {
    case SketchNode::Kind::Repeat: return Stmt::Kind::Repeat;
    case SketchNode::Kind::While: return Stmt::Kind::While;
    case SketchNode::Kind::RepeatUntil: return Stmt::Kind::RepeatUntil;
    case SketchNode::Kind::If: return Stmt::Kind::If;
    case SketchNode::Kind::IfElse: return Stmt::Kind::IfElse;
    default: return Stmt::Kind::Action;
    }
}

class SketchBuilder {
public:
    SketchBuilder(Sketch& sk) : sk_(sk), ins_(insertion_domain(sk.origin.dialect)) {}

    std::vector<SketchNode> list(const std::vector<Stmt>& stmts, bool top) {
        std::vector<SketchNode> out;
        if (top && (stmts.empty() || !stmts.front().isAction())) out.push_back(seq({}));
        for (size_t i = 0; i < stmts.size();) {
            if (stmts[i].isAction()) {
                Run run;
                while (i < stmts.size() && stmts[i].isAction()) run.push_back(stmts[i++].action);
                out.push_back(seq(run));
                continue;
            }
            const Stmt& s = stmts[i++];
            SketchNode node;
            node.kind = node_kind(s.kind);
            if (s.kind == Stmt::Kind::Repeat) {
                node.iter = int(sk_.iters.size());
                sk_.iters.push_back({s.iter});
            } else if (s.kind != Stmt::Kind::RepeatUntil) {
                node.cond = int(sk_.conds.size());
                sk_.conds.push_back({s.cond, condition_group(s.cond, sk_.origin.dialect)});
            }
            node.body = list(s.body, false);
            node.elseBody = list(s.elseBody, false);
            out.push_back(std::move(node));
        }
        if (top && !stmts.empty() && !stmts.back().isAction() && stmts.back().kind != Stmt::Kind::RepeatUntil)
            out.push_back(seq({}));
        return out;
    }

private:
    SketchNode seq(const Run& run) {
        ActionSeq q;
        int k = int(run.size());
        auto insertion = [&](int site) { q.slots.push_back({false, std::nullopt, ins_, site}); };
        for (int j = 0; j < sk_.deltaSize; ++j) insertion(0);
        for (int i = 0; i < k; ++i) {
            q.slots.push_back({true, run[size_t(i)], original_domain(run[size_t(i)]), -1});
            if (i + 1 < k) insertion(i + 1);
        }
        if (k > 0)
            for (int j = 0; j < sk_.deltaSize; ++j) insertion(k);
        SketchNode node;
        node.kind = SketchNode::Kind::Seq;
        node.seq = int(sk_.seqs.size());
        sk_.seqs.push_back(std::move(q));
        return node;
    }

    Sketch& sk_;
    std::vector<SlotValue> ins_;
};

void instantiate_list(const std::vector<SketchNode>& nodes, const Instantiation& inst, std::vector<Stmt>& out) {
    for (const auto& nd : nodes) {
        if (nd.kind == SketchNode::Kind::Seq) {
            for (auto a : inst.seqs[size_t(nd.seq)]) out.push_back(Stmt::act(a));
            continue;
        }
        Stmt s;
        s.kind = stmt_kind(nd.kind);
        if (nd.kind == SketchNode::Kind::Repeat)
            s.iter = inst.iters[size_t(nd.iter)];
        else if (nd.kind == SketchNode::Kind::RepeatUntil)
            s.cond = Condition::Goal;
        else
            s.cond = inst.conds[size_t(nd.cond)];
        instantiate_list(nd.body, inst, s.body);
        instantiate_list(nd.elseBody, inst, s.elseBody);
        out.push_back(std::move(s));
    }
}

bool is_suffix(const Run& needle, const Run& hay) {
    return needle.size() <= hay.size() && std::equal(needle.begin(), needle.end(), hay.end() - long(needle.size()));
}

bool is_prefix(const Run& needle, const Run& hay) {
    return needle.size() <= hay.size() && std::equal(needle.begin(), needle.end(), hay.begin());
}

// Repeat context and nested-body rules, evaluated on a full instantiation.
void context_checks(const std::vector<SketchNode>& nodes, const Instantiation& inst, bool& d3, bool& d5,
                    std::vector<std::string>* msgs) {
    for (size_t i = 0; i < nodes.size(); ++i) {
        const SketchNode& nd = nodes[i];
        if (nd.kind == SketchNode::Kind::Seq) continue;
        if (nd.kind == SketchNode::Kind::Repeat && nd.body.size() == 1 && nd.body[0].kind == SketchNode::Kind::Seq) {
            const Run& body = inst.seqs[size_t(nd.body[0].seq)];
            if (i > 0 && nodes[i - 1].kind == SketchNode::Kind::Seq &&
                is_suffix(body, inst.seqs[size_t(nodes[i - 1].seq)])) {
                d3 = false;
                if (msgs) msgs->push_back("Repeat body repeats the preceding action run");
            }
            if (i + 1 < nodes.size() && nodes[i + 1].kind == SketchNode::Kind::Seq &&
                is_prefix(body, inst.seqs[size_t(nodes[i + 1].seq)])) {
                d3 = false;
                if (msgs) msgs->push_back("Repeat body repeats the following action run");
            }
        }
        if (nd.kind == SketchNode::Kind::If || nd.kind == SketchNode::Kind::IfElse ||
            nd.kind == SketchNode::Kind::While) {
            Condition c = inst.conds[size_t(nd.cond)];
            if (!nd.body.empty() && nd.body[0].kind == SketchNode::Kind::Seq &&
                !body_rule_holds(c, inst.seqs[size_t(nd.body[0].seq)])) {
                d5 = false;
                if (msgs) msgs->push_back("body does not fit condition " + std::string(to_string(c)));
            }
            if (nd.kind == SketchNode::Kind::IfElse && !nd.elseBody.empty() &&
                nd.elseBody[0].kind == SketchNode::Kind::Seq &&
                !body_rule_holds(negate(c), inst.seqs[size_t(nd.elseBody[0].seq)])) {
                d5 = false;
                if (msgs) msgs->push_back("else body does not fit condition " + std::string(to_string(negate(c))));
            }
        }
        context_checks(nd.body, inst, d3, d5, msgs);
        context_checks(nd.elseBody, inst, d3, d5, msgs);
    }
}

// In HOC only the final position matters, so an inserted turn that ends the
// program is dead code.
bool trailing_turn_ok(const Sketch& sk, const Instantiation& inst) {
    if (sk.dialect() != Dialect::Hoc || sk.skeleton.empty()) return true;
    const SketchNode& last = sk.skeleton.back();
    if (last.kind != SketchNode::Kind::Seq) return true;
    const Run& run = inst.seqs[size_t(last.seq)];
    if (run.empty() || !is_turn(run.back())) return true;
    Run ref = sk.seqs[size_t(last.seq)].ref_actions();
    return !ref.empty() && is_turn(ref.back());
}

// Places `content` at insertion site `site` of a sequence whose originals are `orig`.
Run splice(const Run& orig, int site, const Run& content) {
    Run out = orig;
    out.insert(out.begin() + site, content.begin(), content.end());
    return out;
}

void all_strings(const std::vector<Action>& alphabet, int len, Run& cur, std::vector<Run>& out) {
    if (int(cur.size()) == len) {
        out.push_back(cur);
        return;
    }
    for (auto a : alphabet) {
        cur.push_back(a);
        all_strings(alphabet, len, cur, out);
        cur.pop_back();
    }
}

std::vector<Run> all_strings(const std::vector<Action>& alphabet, int len) {
    std::vector<Run> out;
    Run cur;
    all_strings(alphabet, len, cur, out);
    return out;
}

std::vector<Run> original_variants(const ActionSeq& q) {
    std::vector<Run> out{{}};
    for (const auto& s : q.slots) {
        if (!s.original) continue;
        std::vector<Run> next;
        for (const auto& prefix : out)
            for (const auto& v : s.domain) {
                Run r = prefix;
                r.push_back(*v);
                next.push_back(std::move(r));
            }
        out = std::move(next);
    }
    return out;
}

// Distinct candidate strings of a sequence, grouped by the number of inserted actions.
std::vector<std::vector<Run>> seq_candidates(const ActionSeq& q, Dialect d, int budget, Stage stage) {
    const auto& alphabet = dialect_actions(d);
    int k = q.originals();
    int insertSlots = int(q.slots.size()) - k;
    std::vector<std::vector<Run>> byExtra(size_t(std::min(budget, insertSlots)) + 1);
    if (stage == Stage::D0) {
        for (size_t m = 0; m < byExtra.size(); ++m) byExtra[m] = all_strings(alphabet, k + int(m));
        return byExtra;
    }
    auto variants = original_variants(q);
    for (size_t m = 0; m < byExtra.size(); ++m) {
        std::set<Run> seen;
        auto add = [&](Run r) {
            if (stage == Stage::All && contains_elimination(r, d)) return;
            if (seen.insert(r).second) byExtra[m].push_back(std::move(r));
        };
        if (m == 0) {
            for (const auto& v : variants) add(v);
        } else {
            auto contents = all_strings(alphabet, int(m));
            for (int site = 0; site < q.site_count(); ++site) {
                if (q.site_capacity(site) < int(m)) continue;
                for (const auto& v : variants)
                    for (const auto& c : contents) add(splice(v, site, c));
            }
        }
        std::sort(byExtra[m].begin(), byExtra[m].end());
    }
    return byExtra;
}

struct Keyed {
    std::vector<int> key;
    Code code;
};

void key_append_seq(std::vector<int>& key, const Run& r, size_t slots) {
    for (auto a : r) key.push_back(int(a) + 1);
    for (size_t i = r.size(); i < slots; ++i) key.push_back(0);
}

std::vector<Condition> stage_cond_domain(const CondVar& v, Dialect d, Stage stage) {
    if (stage == Stage::All) return v.domain;
    return dialect_conditions(d);
}

std::vector<int> stage_iter_domain(const IterVar& v, const SynthesisParams& p, Stage stage) {
    if (stage == Stage::All) return iter_domain(v.ref, p.deltaIter);
    std::vector<int> all;
    for (int x = 2; x <= 10; ++x) all.push_back(x);
    return all;
}

class Enumerator {
public:
    Enumerator(const Sketch& sk, const SynthesisParams& p, Stage stage)
        : sk_(sk), stage_(stage), trimTrailingTurns_(p.trimTrailingTurns) {
        for (const auto& q : sk.seqs) cands_.push_back(seq_candidates(q, sk.dialect(), sk.deltaSize, stage));
        for (const auto& c : sk.conds) condDom_.push_back(stage_cond_domain(c, sk.dialect(), stage));
        for (const auto& it : sk.iters) iterDom_.push_back(stage_iter_domain(it, p, stage));
        inst_.seqs.resize(sk.seqs.size());
        inst_.conds.resize(sk.conds.size());
        inst_.iters.resize(sk.iters.size());
    }

    std::vector<Code> run() {
        seqs(0, sk_.deltaSize, false);
        std::sort(out_.begin(), out_.end(), [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
        std::vector<Code> codes;
        std::unordered_set<std::string> seen;
        for (auto& k : out_)
            if (seen.insert(code_key(k.code)).second) codes.push_back(std::move(k.code));
        return codes;
    }

private:
    void seqs(size_t i, int budget, bool inserted) {
        if (i == sk_.seqs.size()) {
            conds(0);
            return;
        }
        const auto& byExtra = cands_[i];
        for (size_t m = 0; m < byExtra.size() && int(m) <= budget; ++m) {
            if (m > 0 && inserted && stage_ != Stage::D0) break;
            for (const auto& r : byExtra[m]) {
                inst_.seqs[i] = r;
                seqs(i + 1, budget - int(m), inserted || m > 0);
            }
        }
    }

    void conds(size_t i) {
        if (i == sk_.conds.size()) {
            iters(0);
            return;
        }
        for (auto c : condDom_[i]) {
            inst_.conds[i] = c;
            conds(i + 1);
        }
    }

    void iters(size_t i) {
        if (i == sk_.iters.size()) {
            emit();
            return;
        }
        for (int x : iterDom_[i]) {
            inst_.iters[i] = x;
            iters(i + 1);
        }
    }

    void emit() {
        if (stage_ == Stage::All) {
            bool d3 = true, d5 = true;
            context_checks(sk_.skeleton, inst_, d3, d5, nullptr);
            if (!d3 || !d5) return;
            if (trimTrailingTurns_ && !trailing_turn_ok(sk_, inst_)) return;
        }
        Keyed k;
        for (size_t i = 0; i < inst_.seqs.size(); ++i) key_append_seq(k.key, inst_.seqs[i], sk_.seqs[i].slots.size());
        for (auto c : inst_.conds) k.key.push_back(int(c));
        for (int x : inst_.iters) k.key.push_back(x);
        k.code = instantiate(sk_, inst_);
        out_.push_back(std::move(k));
    }

    const Sketch& sk_;
    Stage stage_;
    bool trimTrailingTurns_;
    std::vector<std::vector<std::vector<Run>>> cands_;
    std::vector<std::vector<Condition>> condDom_;
    std::vector<std::vector<int>> iterDom_;
    Instantiation inst_;
    std::vector<Keyed> out_;
};

void align(const std::vector<SketchNode>& nodes, const std::vector<Stmt>& stmts, Instantiation& inst,
           std::vector<bool>& assigned, ConstraintReport& rep) {
    std::vector<const SketchNode*> skCons;
    std::vector<int> gapSeq{-1};
    for (const auto& nd : nodes) {
        if (nd.kind == SketchNode::Kind::Seq) {
            gapSeq.back() = nd.seq;
        } else {
            skCons.push_back(&nd);
            gapSeq.push_back(-1);
        }
    }
    std::vector<const Stmt*> cons;
    std::vector<Run> gaps(1);
    for (const auto& s : stmts) {
        if (s.isAction()) {
            gaps.back().push_back(s.action);
        } else {
            cons.push_back(&s);
            gaps.emplace_back();
        }
    }
    if (cons.size() != skCons.size()) throw ValidationError("check_constraints: structure mismatch");
    for (size_t i = 0; i < cons.size(); ++i) {
        const SketchNode& nd = *skCons[i];
        const Stmt& s = *cons[i];
        if (stmt_kind(nd.kind) != s.kind) throw ValidationError("check_constraints: structure mismatch");
        if (nd.kind == SketchNode::Kind::Repeat)
            inst.iters[size_t(nd.iter)] = s.iter;
        else if (nd.cond >= 0)
            inst.conds[size_t(nd.cond)] = s.cond;
        align(nd.body, s.body, inst, assigned, rep);
        align(nd.elseBody, s.elseBody, inst, assigned, rep);
    }
    for (size_t g = 0; g < gaps.size(); ++g) {
        if (gapSeq[g] >= 0) {
            inst.seqs[size_t(gapSeq[g])] = gaps[g];
            assigned[size_t(gapSeq[g])] = true;
        } else if (!gaps[g].empty()) {
            rep.d1 = false;
            rep.messages.push_back("actions placed where the reference has no action sequence");
        }
    }
}

bool classes_match(const Run& s, size_t from, const Run& ref, size_t refFrom, size_t count) {
    for (size_t i = 0; i < count; ++i)
        if (!same_class(s[from + i], ref[refFrom + i])) return false;
    return true;
}

// Number of inserted actions if `s` is the sequence's originals (class-preserving)
// plus one contiguous insertion at a single site; -1 otherwise.
int single_site_extra(const Run& s, const ActionSeq& q) {
    Run ref = q.ref_actions();
    int k = int(ref.size());
    int m = int(s.size()) - k;
    if (m < 0) return -1;
    if (k == 0) return m <= q.site_capacity(0) ? m : -1;
    if (m == 0) return classes_match(s, 0, ref, 0, size_t(k)) ? 0 : -1;
    for (int site = 0; site <= k; ++site) {
        if (q.site_capacity(site) < m) continue;
        if (classes_match(s, 0, ref, 0, size_t(site)) &&
            classes_match(s, size_t(site + m), ref, size_t(site), size_t(k - site)))
            return m;
    }
    return -1;
}

}  // namespace

std::optional<Stage> stage_from_string(std::string_view s) {
    if (s == "d0") return Stage::D0;
    if (s == "d01") return Stage::D01;
    if (s == "all") return Stage::All;
    return std::nullopt;
}

int ActionSeq::originals() const {
    return int(std::count_if(slots.begin(), slots.end(), [](const Slot& s) { return s.original; }));
}

std::vector<Action> ActionSeq::ref_actions() const {
    std::vector<Action> out;
    for (const auto& s : slots)
        if (s.original) out.push_back(*s.ref);
    return out;
}

int ActionSeq::site_capacity(int site) const {
    return int(std::count_if(slots.begin(), slots.end(), [&](const Slot& s) { return !s.original && s.site == site; }));
}

int ActionSeq::site_count() const {
    int k = originals();
    return k == 0 ? 1 : k + 1;
}

Sketch build_sketch(const Code& code, int deltaSize) {
    Sketch sk;
    sk.origin = code;
    sk.deltaSize = deltaSize;
    SketchBuilder b(sk);
    sk.skeleton = b.list(code.body, true);
    return sk;
}

std::vector<Condition> condition_group(Condition ref, Dialect d) {
    std::vector<Condition> g;
    switch (ref) {
    case Condition::PathAhead:
    case Condition::NoPathAhead: g = {Condition::PathAhead, Condition::NoPathAhead}; break;
    case Condition::PathLeft:
    case Condition::NoPathLeft:
    case Condition::PathRight:
    case Condition::NoPathRight:
        g = {Condition::PathLeft, Condition::NoPathLeft, Condition::PathRight, Condition::NoPathRight};
        break;
    case Condition::Marker:
    case Condition::NoMarker: g = {Condition::Marker, Condition::NoMarker}; break;
    case Condition::Goal: return {Condition::Goal};
    }
    std::vector<Condition> out;
    for (auto c : g)
        if (condition_in_dialect(c, d)) out.push_back(c);
    return out;
}

std::vector<int> iter_domain(int ref, int deltaIter) {
    std::vector<int> out;
    for (int x = std::max(2, ref - deltaIter); x <= std::min(10, ref + deltaIter); ++x) out.push_back(x);
    return out;
}

const std::vector<std::vector<Action>>& elimination_sequences(Dialect d) {
    static const std::vector<std::vector<Action>> hoc{{L, R}, {R, L}, {L, L, L}, {R, R, R}};
    static const std::vector<std::vector<Action>> karel{
        {L, R},       {R, L},       {L, L, L},    {R, R, R},    {Pi, Pu},     {Pu, Pi},     {Pi, Pi},
        {Pu, Pu},     {L, Pi, R},   {R, Pi, L},   {L, Pu, R},   {R, Pu, L},   {Pi, L, Pu},  {Pu, L, Pi},
        {Pi, R, Pu},  {Pu, R, Pi},  {Pi, L, Pi},  {Pi, R, Pi},  {Pu, L, Pu},  {Pu, R, Pu},
    };
    return d == Dialect::Hoc ? hoc : karel;
}

bool contains_elimination(const std::vector<Action>& run, Dialect d) {
    for (const auto& e : elimination_sequences(d))
        if (std::search(run.begin(), run.end(), e.begin(), e.end()) != run.end()) return true;
    return false;
}

bool body_rule_holds(Condition c, const std::vector<Action>& run) {
    switch (c) {
    case Condition::PathLeft:
    case Condition::PathRight: {
        Action want = c == Condition::PathLeft ? L : R;
        for (auto a : run) {
            if (a == want) return true;
            if (a == M || is_turn(a)) return false;
        }
        return false;
    }
    case Condition::PathAhead:
        for (auto a : run) {
            if (a == M) return true;
            if (is_turn(a)) return false;
        }
        return false;
    case Condition::NoPathAhead: {
        bool turned = false;
        for (auto a : run) {
            if (is_turn(a)) turned = true;
            if (a == M && !turned) return false;
        }
        return true;
    }
    case Condition::NoPathLeft:
    case Condition::NoPathRight: {
        // The first move must not head into the blocked side.
        int heading = 0;
        int blocked = c == Condition::NoPathLeft ? 3 : 1;
        for (auto a : run) {
            if (a == L) heading = (heading + 3) % 4;
            if (a == R) heading = (heading + 1) % 4;
            if (a == M) return heading != blocked;
        }
        return true;
    }
    case Condition::Marker:
    case Condition::NoMarker: {
        Action want = c == Condition::Marker ? Pi : Pu;
        for (auto a : run)
            if (is_marker(a)) return a == want;
        return true;
    }
    case Condition::Goal: return true;
    }
    return true;
}

Code instantiate(const Sketch& sk, const Instantiation& inst) {
    std::vector<Stmt> body;
    instantiate_list(sk.skeleton, inst, body);
    return make_code(sk.dialect(), std::move(body));
}

std::vector<Code> enumerate_mutations(const Sketch& sk, const SynthesisParams& params, Stage stage) {
    if (stage == Stage::D0) {
        auto counts = stage_counts(sk, params);
        if (counts.d0 > 5000000) throw ValidationError("enumerate_mutations: d0 space too large to materialize");
    }
    Enumerator e(sk, params, stage);
    return e.run();
}

std::string ConstraintReport::first_failure() const {
    if (!structure) return "structure";
    if (!d0) return "d0";
    if (!d1) return "d1";
    if (!d2) return "d2";
    if (!d3) return "d3";
    if (!d4) return "d4";
    if (!d5) return "d5";
    if (!d6) return "d6";
    return "";
}

ConstraintReport check_constraints(const Code& code, const Sketch& sk, const SynthesisParams& params, Stage stage) {
    ConstraintReport rep;
    if (code.dialect != sk.dialect()) throw ValidationError("check_constraints: dialect mismatch");
    Instantiation inst;
    inst.seqs.resize(sk.seqs.size());
    inst.conds.resize(sk.conds.size());
    inst.iters.resize(sk.iters.size());
    std::vector<bool> assigned(sk.seqs.size(), false);
    align(sk.skeleton, code.body, inst, assigned, rep);

    if (code_size(code) > code_size(sk.origin) + sk.deltaSize) {
        rep.d0 = false;
        rep.messages.push_back("code exceeds the size budget");
    }
    for (size_t i = 0; i < sk.seqs.size(); ++i) {
        int len = int(inst.seqs[i].size());
        if (len < sk.seqs[i].originals() || len > int(sk.seqs[i].slots.size())) {
            rep.d0 = false;
            rep.messages.push_back("action sequence " + std::to_string(i) + " does not fit its slots");
        }
    }
    if (stage == Stage::D0) return rep;

    int inserted = 0;
    for (size_t i = 0; i < sk.seqs.size(); ++i) {
        int m = single_site_extra(inst.seqs[i], sk.seqs[i]);
        if (m < 0) {
            rep.d1 = false;
            rep.messages.push_back("action sequence " + std::to_string(i) + " is not a single-site insertion edit");
        } else if (m > 0) {
            inserted++;
        }
    }
    if (inserted > 1) {
        rep.d1 = false;
        rep.messages.push_back("insertions in more than one action sequence");
    }
    if (stage == Stage::D01) return rep;

    for (size_t i = 0; i < sk.iters.size(); ++i) {
        auto dom = iter_domain(sk.iters[i].ref, params.deltaIter);
        if (std::find(dom.begin(), dom.end(), inst.iters[i]) == dom.end()) {
            rep.d2 = false;
            rep.messages.push_back("Repeat count " + std::to_string(inst.iters[i]) + " too far from " +
                                   std::to_string(sk.iters[i].ref));
        }
    }
    for (size_t i = 0; i < sk.conds.size(); ++i) {
        const auto& dom = sk.conds[i].domain;
        if (std::find(dom.begin(), dom.end(), inst.conds[i]) == dom.end()) {
            rep.d4 = false;
            rep.messages.push_back("condition " + std::string(to_string(inst.conds[i])) + " leaves the group of " +
                                   std::string(to_string(sk.conds[i].ref)));
        }
    }
    context_checks(sk.skeleton, inst, rep.d3, rep.d5, &rep.messages);
    for (size_t i = 0; i < sk.seqs.size(); ++i)
        if (contains_elimination(inst.seqs[i], sk.dialect())) {
            rep.d6 = false;
            rep.messages.push_back("action sequence " + std::to_string(i) + " contains an elimination sequence");
        }
    if (params.trimTrailingTurns && !trailing_turn_ok(sk, inst)) {
        rep.d6 = false;
        rep.messages.push_back("program ends with an inserted turn");
    }
    return rep;
}

StageCounts stage_counts(const Sketch& sk, const SynthesisParams& params) {
    auto t0 = std::chrono::steady_clock::now();
    StageCounts out;
    const Dialect d = sk.dialect();
    std::uint64_t condIter = 1;
    for (size_t i = 0; i < sk.conds.size(); ++i) condIter *= dialect_conditions(d).size();
    for (size_t i = 0; i < sk.iters.size(); ++i) condIter *= 9;

    // Size-only stage: free strings per sequence, total insertions within budget.
    const std::uint64_t A = dialect_actions(d).size();
    std::vector<std::uint64_t> ways(size_t(sk.deltaSize) + 1, 0);
    ways[0] = 1;
    for (const auto& q : sk.seqs) {
        int k = q.originals();
        int extraMax = int(q.slots.size()) - k;
        std::vector<std::uint64_t> next(ways.size(), 0);
        for (size_t used = 0; used < ways.size(); ++used) {
            if (!ways[used]) continue;
            for (int m = 0; m <= extraMax && used + size_t(m) < ways.size(); ++m) {
                std::uint64_t strings = 1;
                for (int j = 0; j < k + m; ++j) strings *= A;
                next[used + size_t(m)] += ways[used] * strings;
            }
        }
        ways = std::move(next);
    }
    for (auto w : ways) out.d0 += w;
    out.d0 *= condIter;

    // Edit stage: single-site insertions in at most one sequence.
    std::vector<std::uint64_t> none, ins;
    for (const auto& q : sk.seqs) {
        auto byExtra = seq_candidates(q, d, sk.deltaSize, Stage::D01);
        none.push_back(byExtra[0].size());
        std::uint64_t total = 0;
        for (size_t m = 1; m < byExtra.size(); ++m) total += byExtra[m].size();
        ins.push_back(total);
    }
    std::uint64_t base = 1;
    for (auto v : none) base *= v;
    std::uint64_t combos = base;
    for (size_t t = 0; t < sk.seqs.size(); ++t) {
        std::uint64_t p = ins[t];
        for (size_t s = 0; s < sk.seqs.size(); ++s)
            if (s != t) p *= none[s];
        combos += p;
    }
    out.d01 = combos * condIter;

    out.all = enumerate_mutations(sk, params, Stage::All).size();
    out.elapsedSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace tasksyn
