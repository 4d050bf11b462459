#pragma once

#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tasksyn/mutation.hpp"
#include "tasksyn/pipeline.hpp"

namespace testsupport {

using namespace tasksyn;

inline const std::vector<std::string> kRefIds = {"H1", "H2", "H3", "H4", "H5", "H6", "K7", "K8", "K9", "K10"};

inline Dialect dialect_of(const std::string& id) { return id[0] == 'H' ? Dialect::Hoc : Dialect::Karel; }

inline std::string data_path(const std::string& rel) { return std::string(TASKSYN_DATA_DIR) + "/" + rel; }

inline Code ref_code(const std::string& id) {
    return parse_code(read_file(data_path("reference/" + id + ".code")), dialect_of(id));
}
inline TaskSpec ref_task(const std::string& id) { return load_task(read_file(data_path("reference/" + id + ".json"))); }
inline Code exemplar(const std::string& id) {
    return parse_code(read_file(data_path("exemplars/" + id + ".code")), dialect_of(id));
}

inline Code code_of(const std::string& text, Dialect d = Dialect::Hoc) { return parse_code(text, d); }

inline int pick(std::mt19937_64& rng, int n) { return int(rng() % std::uint64_t(n)); }

// Random dialect-valid code with roughly `budget` blocks.
class CodeGen {
public:
    CodeGen(std::mt19937_64& rng, Dialect d, int maxDepth = 3) : rng_(rng), d_(d), maxDepth_(maxDepth) {}

    Code make(int budget) {
        left_ = std::max(1, budget);
        std::vector<Stmt> body = list(1, true);
        return make_code(d_, std::move(body));
    }

private:
    std::vector<Stmt> list(int depth, bool top) {
        std::vector<Stmt> out;
        int len = 1 + pick(rng_, 3);
        for (int i = 0; i < len && left_ > 0; ++i) {
            bool lastTop = top && (i + 1 == len || left_ == 1);
            out.push_back(stmt(depth, top, lastTop));
        }
        if (out.empty()) out.push_back(Stmt::act(action()));
        // RepeatUntil may only close the top level.
        if (top)
            for (size_t i = 0; i + 1 < out.size(); ++i)
                if (out[i].kind == Stmt::Kind::RepeatUntil) out[i] = Stmt::act(action());
        return out;
    }

    Action action() {
        const auto& a = dialect_actions(d_);
        return a[size_t(pick(rng_, int(a.size())))];
    }

    Condition cond() {
        const auto& c = dialect_conditions(d_);
        return c[size_t(pick(rng_, int(c.size())))];
    }

    Stmt stmt(int depth, bool top, bool lastTop) {
        left_--;
        if (depth >= maxDepth_ || left_ <= 0 || pick(rng_, 2) == 0) return Stmt::act(action());
        switch (pick(rng_, 5)) {
        case 0: return Stmt::repeat(2 + pick(rng_, 9), list(depth + 1, false));
        case 1:
            if (d_ == Dialect::Karel) return Stmt::whileLoop(cond(), list(depth + 1, false));
            if (top && lastTop) return Stmt::repeatUntil(list(depth + 1, false));
            return Stmt::repeat(2 + pick(rng_, 9), list(depth + 1, false));
        case 2: return Stmt::ifThen(cond(), list(depth + 1, false));
        case 3: {
            auto t = list(depth + 1, false);
            return Stmt::ifElse(cond(), std::move(t), list(depth + 1, false));
        }
        default: return Stmt::act(action());
        }
    }

    std::mt19937_64& rng_;
    Dialect d_;
    int maxDepth_;
    int left_ = 0;
};

// Random fully materialized task; roughly `wallRate` of cells blocked.
inline TaskSpec random_task(std::mt19937_64& rng, Dialect d, int n, double wallRate = 0.3) {
    std::uniform_real_distribution<double> u(0, 1);
    TaskSpec t;
    t.dialect = d;
    t.n = n;
    t.pregrid = Grid(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (u(rng) < wallRate) t.pregrid.at(r, c).wall = Wall::Blocked;
    t.start = {pick(rng, n), pick(rng, n), Dir(pick(rng, 4))};
    t.pregrid.at(t.start.row, t.start.col).wall = Wall::Free;
    if (d == Dialect::Hoc) {
        Cell g{pick(rng, n), pick(rng, n)};
        t.pregrid.at(g).wall = Wall::Free;
        t.pregrid.at(g).isGoal = true;
        t.goal = g;
    } else {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (t.pregrid.at(r, c).wall == Wall::Free && u(rng) < 0.15) t.pregrid.at(r, c).markers = 1;
        t.postgrid = t.pregrid;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (t.postgrid.at(r, c).wall == Wall::Free && u(rng) < 0.1)
                    t.postgrid.at(r, c).markers ^= 1;
        if (pick(rng, 2)) {
            for (int tries = 0; tries < 50; ++tries) {
                AgentPose e{pick(rng, n), pick(rng, n), Dir(pick(rng, 4))};
                if (t.pregrid.at(e.row, e.col).wall == Wall::Free) {
                    t.end = e;
                    break;
                }
            }
        }
    }
    auto& store = t.store;
    for (auto a : dialect_actions(d)) store.insert(block_of(a));
    if (pick(rng, 2)) store.insert(BlockKind::Repeat);
    t.maxBlocks = 1 + pick(rng, 8);
    return t;
}

// Shortest solving action string up to maxLen by trying every string, or -1.
inline int brute_shortest(const TaskSpec& t, int maxLen) {
    const auto& acts = dialect_actions(t.dialect);
    std::vector<Action> s;
    for (int len = 0; len <= maxLen; ++len) {
        std::vector<int> idx(size_t(len), 0);
        while (true) {
            s.clear();
            for (int i : idx) s.push_back(acts[size_t(i)]);
            if (actions_solve(t, s)) return len;
            int p = len - 1;
            while (p >= 0 && ++idx[size_t(p)] == int(acts.size())) idx[size_t(p--)] = 0;
            if (p < 0) break;
        }
    }
    return -1;
}

// Every string over `alphabet` whose length lies in [lo, hi].
inline void strings(const std::vector<Action>& alphabet, int lo, int hi,
                    const std::function<void(const std::vector<Action>&)>& f) {
    std::vector<Action> cur;
    std::function<void()> rec = [&] {
        if (int(cur.size()) >= lo) f(cur);
        if (int(cur.size()) == hi) return;
        for (auto a : alphabet) {
            cur.push_back(a);
            rec();
            cur.pop_back();
        }
    };
    rec();
}

// Domain product of the sketch (free strings within the size budget, every
// condition, every iteration count), filtered by check_constraints.
inline std::set<std::string> brute_mutations(const Sketch& sk, const SynthesisParams& p, Stage stage = Stage::All) {
    const Dialect d = sk.dialect();
    const auto& acts = dialect_actions(d);
    std::vector<std::vector<std::vector<Action>>> seqChoices(sk.seqs.size());
    for (size_t i = 0; i < sk.seqs.size(); ++i) {
        int k = sk.seqs[i].originals();
        int cap = int(sk.seqs[i].slots.size());
        strings(acts, k, std::min(cap, k + sk.deltaSize), [&](const std::vector<Action>& s) {
            seqChoices[i].push_back(s);
        });
    }
    std::vector<Condition> conds;
    for (auto c : dialect_conditions(d))
        if (c != Condition::Goal) conds.push_back(c);

    std::set<std::string> out;
    Instantiation inst;
    inst.seqs.resize(sk.seqs.size());
    inst.conds.resize(sk.conds.size());
    inst.iters.resize(sk.iters.size());
    int extraBudget = sk.deltaSize;
    std::function<void(size_t, int)> seqRec;
    std::function<void(size_t)> condRec;
    std::function<void(size_t)> iterRec;
    iterRec = [&](size_t i) {
        if (i == sk.iters.size()) {
            Code c = instantiate(sk, inst);
            if (check_constraints(c, sk, p, stage).all()) out.insert(code_key(c));
            return;
        }
        for (int it = 2; it <= 10; ++it) {
            inst.iters[i] = it;
            iterRec(i + 1);
        }
    };
    condRec = [&](size_t i) {
        if (i == sk.conds.size()) return iterRec(0);
        for (auto c : conds) {
            inst.conds[i] = c;
            condRec(i + 1);
        }
    };
    seqRec = [&](size_t i, int used) {
        if (i == sk.seqs.size()) return condRec(0);
        int k = sk.seqs[i].originals();
        for (const auto& s : seqChoices[i]) {
            int extra = int(s.size()) - k;
            if (used + extra > extraBudget) continue;
            inst.seqs[i] = s;
            seqRec(i + 1, used + extra);
        }
    };
    seqRec(0, 0);
    return out;
}

}  // namespace testsupport
