// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>

#include "support.hpp"

using namespace testsupport;
namespace fs = std::filesystem;

namespace {

// Pinned limits and tolerances.
constexpr double kMembershipSeconds = 60;
constexpr double kSeedSeconds = 120;
constexpr double kPoolSeconds = 600;
constexpr double kFormulaTol = 1e-9;
constexpr long long kDeskIterations = 20000;
constexpr long long kShortIterations = 200;
constexpr int kOracleCodes = 20;
constexpr int kShortcutTasks = 60;
constexpr int kShortcutLen = 6;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

bool close(double a, double b) { return std::fabs(a - b) <= kFormulaTol; }

SynthesisParams desk(long long iterations) {
    SynthesisParams p;
    p.mctsIterations = iterations;
    return p;
}

// Independent re-scoring of a selected task; empty string means it passes.
std::string recheck(const Candidate& c, const Code& code, const TaskSpec& ref, const SynthesisParams& p) {
    try {
        validate_task(c.task);
    } catch (const std::exception& e) {
        return std::string("invalid task: ") + e.what();
    }
    auto tr = execute(code, c.task, effective_unroll_cap(p, p.n));
    if (tr.crashed) return "crashes";
    if (!tr.solved) return "not solved";
    for (int id : all_node_ids(code))
        if (!tr.coveredNodes.count(id)) return "node " + std::to_string(id) + " not covered";
    if (f_qual(tr, c.task.n, c.task.dialect) < effective_delta_qual(p, code)) return "quality below threshold";
    if (f_diss(c.task, ref) < p.deltaDiss) return "too similar to the reference";
    int limit = code_size(code) - 1;
    if (limit <= kShortcutLen) {
        if (brute_shortest(c.task, limit) >= 0) return "shortcut found by exhaustive search";
    } else if (find_shortcut(c.task, limit).status != ShortcutStatus::None) {
        return "shortcut found";
    }
    return "";
}

Outcome c1_membership() {
    Outcome o;
    SynthesisParams p;
    double worst = 0;
    for (const char* id : {"H1", "H2", "H3", "H5", "H6", "K7", "K8", "K9", "K10"}) {
        auto t0 = Clock::now();
        auto muts = enumerate_mutations(build_sketch(ref_code(id), p.deltaSize), p, Stage::All);
        double s = since(t0);
        worst = std::max(worst, s);
        Code want = exemplar(id);
        bool found = std::any_of(muts.begin(), muts.end(), [&](const Code& m) { return m == want; });
        if (!found) o.fail(std::string(id) + " exemplar missing");
        if (s >= kMembershipSeconds) o.fail(std::string(id) + " took " + std::to_string(s) + " s");
    }
    if (o.pass) o.detail = "9/9 exemplars found, slowest " + std::to_string(worst) + " s";
    return o;
}

Outcome c2_monotone() {
    Outcome o;
    SynthesisParams p;
    std::printf("  stage counts (delta0 / delta0_1 / all):\n");
    for (const auto& id : kRefIds) {
        auto k = stage_counts(build_sketch(ref_code(id), p.deltaSize), p);
        std::printf("    %-4s %12llu %8llu %6llu\n", id.c_str(), (unsigned long long)k.d0, (unsigned long long)k.d01,
                    (unsigned long long)k.all);
        if (!(k.d0 >= k.d01 && k.d01 >= k.all && k.all > 0)) o.fail(id + " not monotone");
        if (id == "H5" && k.all != 66) o.fail("H5 all = " + std::to_string(k.all) + ", want 66");
        if (id == "H6" && k.all != 54) o.fail("H6 all = " + std::to_string(k.all) + ", want 54");
    }
    if (o.pass) o.detail = "monotone on 10 codes, H5 = 66, H6 = 54";
    return o;
}

Outcome c3_oracle() {
    Outcome o;
    SynthesisParams p;
    std::mt19937_64 rng(20);
    int done = 0;
    size_t total = 0;
    for (int i = 0; done < kOracleCodes && i < 5000; ++i) {
        Dialect d = i % 2 ? Dialect::Karel : Dialect::Hoc;
        Code c = CodeGen(rng, d, 3).make(1 + pick(rng, 4));
        if (code_size(c) > 4) continue;
        Sketch sk = build_sketch(c, p.deltaSize);
        std::set<std::string> fast;
        for (const auto& m : enumerate_mutations(sk, p)) fast.insert(code_key(m));
        auto slow = brute_mutations(sk, p);
        if (fast != slow) o.fail("mismatch on " + code_key(c));
        total += fast.size();
        ++done;
    }
    if (done < kOracleCodes) o.fail("generator produced only " + std::to_string(done) + " codes");
    if (o.pass) o.detail = std::to_string(done) + " codes, " + std::to_string(total) + " mutations, sets equal";
    return o;
}

Outcome c4_replay() {
    Outcome o;
    long long emitted = 0;
    for (const char* id : {"H2", "H4", "H5"}) {
        for (const Code& code : {ref_code(id), exemplar(id)}) {
            SynthesisParams p = desk(kDeskIterations);
            auto ctx = make_sym_context(p, ref_task(id));
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                std::mt19937_64 rng(seed);
                std::vector<int> none;
                for (long long it = 0; it < kDeskIterations; ++it) {
                    PrefixThenRandom src(none, rng);
                    auto so = run_symbolic(code, src, ctx);
                    if (so.status != SymStatus::TaskEmitted) continue;
                    ++emitted;
                    auto tr = execute(code, *so.task, ctx.unrollCap);
                    bool same = tr.solved && !tr.crashed && tr.steps == so.trace.steps &&
                                tr.coveredNodes == so.trace.coveredNodes && tr.counts.moves == so.trace.counts.moves &&
                                tr.counts.turns == so.trace.counts.turns &&
                                tr.counts.segments == so.trace.counts.segments &&
                                tr.counts.longSegments == so.trace.counts.longSegments;
                    if (!same) o.fail(std::string(id) + " replay differs, seed " + std::to_string(seed));
                }
                auto run = synthesize_task(code, ref_task(id), ref_code(id), p, nullptr, seed);
                if (run.best) {
                    ++emitted;
                    auto tr = execute(code, run.best->task, ctx.unrollCap);
                    if (!tr.solved || tr.crashed) o.fail(std::string(id) + " selected task does not replay");
                }
            }
        }
    }
    if (emitted == 0) o.fail("nothing emitted");
    if (o.pass) o.detail = std::to_string(emitted) + " emitted tasks replayed";
    return o;
}

Outcome c5_filter() {
    Outcome o;
    int found = 0, runs = 0;
    for (const auto& id : kRefIds) {
        Code code = exemplar(id);
        TaskSpec ref = ref_task(id);
        SynthesisParams p = desk(kDeskIterations);
        for (std::uint64_t seed = 0; seed < 2; ++seed) {
            ++runs;
            auto r = synthesize_task(code, ref, ref_code(id), p, nullptr, seed);
            if (!r.best) continue;
            ++found;
            auto why = recheck(*r.best, code, ref, p);
            if (!why.empty()) o.fail(id + ": " + why);
            const auto& s = r.best->scores;
            if (!(s.fCov == 1 && s.fNocrash == 1 && s.fNocut == 1 && s.indicator)) o.fail(id + ": stored scores disagree");
        }
    }
    if (found == 0) o.fail("no task returned");
    if (o.pass) o.detail = std::to_string(found) + "/" + std::to_string(runs) + " runs returned a task, all re-verified";
    return o;
}

Outcome c6_shortcut() {
    Outcome o;
    std::mt19937_64 rng(6);
    int found = 0;
    for (int i = 0; i < kShortcutTasks; ++i) {
        auto t = random_task(rng, i % 2 ? Dialect::Karel : Dialect::Hoc, 5, 0.1 + 0.05 * (i % 5));
        int brute = brute_shortest(t, kShortcutLen);
        auto r = find_shortcut(t, kShortcutLen);
        if (brute < 0) {
            if (r.status != ShortcutStatus::None) o.fail("task " + std::to_string(i) + ": spurious shortcut");
        } else {
            ++found;
            if (r.status != ShortcutStatus::Found || int(r.actions.size()) != brute || !actions_solve(t, r.actions))
                o.fail("task " + std::to_string(i) + ": wrong shortest length");
        }
    }
    if (o.pass)
        o.detail = std::to_string(kShortcutTasks) + " tasks (" + std::to_string(found) + " with a solution), all agree";
    return o;
}

Outcome c7_formulas() {
    Outcome o;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) o.fail(what);
    };
    Trace t;
    t.counts = {6, 2, 1, 0, 0, 0};
    expect(close(f_qual(t, 10, Dialect::Hoc), 0.175), "qual 6/2/1/0");
    t.counts = {6, 0, 1, 1, 0, 0};
    expect(close(f_qual(t, 10, Dialect::Hoc), (0.3 + 0 + 0.2 + 0.3) / 4), "qual with runs 6 and 2");
    t.counts = {99, 99, 99, 99, 99, 99};
    expect(f_qual(t, 10, Dialect::Karel) == 1.0, "qual clamp");
    Trace crashed = t;
    crashed.crashed = true;
    expect(f_qual(crashed, 10, Dialect::Hoc) == 0.0, "crash => qual 0");

    TaskSpec a;
    a.dialect = Dialect::Hoc;
    a.n = 10;
    a.pregrid = Grid(10);
    a.start = {0, 0, Dir::East};
    a.goal = Cell{9, 9};
    a.pregrid.at(9, 9).isGoal = true;
    a.store = {BlockKind::Move, BlockKind::TurnLeft};
    a.maxBlocks = 2;
    expect(f_diss(a, a) == 0.0, "diss(T,T) = 0");
    TaskSpec b = a;
    b.start = {3, 4, Dir::South};
    expect(close(f_diss(a, b), 2.0 / 3), "diss loc+dir = 2/3");
    TaskSpec c = b;
    for (int k = 0; k < 50; ++k) c.pregrid.at(k / 10, k % 10).wall = Wall::Blocked;
    expect(diss_terms(a, c).grid == 1.0, "grid term saturates");

    expect(f_diversity(a, {1, 2}, {}) == 1.0, "empty pool diversity = 1");
    TaskSpec dirOnly = a;
    dirOnly.start.dir = Dir::North;
    expect(close(f_diversity(dirOnly, {4, 1, 0}, {{a, {4, 1, 0}}}), 0.25), "diversity dir only = 0.25");
    expect(f_diversity(a, {4}, {{a, {5}}}) == 0.0, "identical grid diversity = 0");
    expect(close((1 + 0.3 + 0.6) / 3.0, 1.9 / 3), "score arithmetic");

    // Combination rule on a real task.
    Code code = code_of("def Run(){ move move turnRight move }");
    TaskSpec corridor = a;
    for (int r = 0; r < 10; ++r)
        for (int col = 0; col < 10; ++col) corridor.pregrid.at(r, col).wall = Wall::Blocked;
    corridor.pregrid.at(9, 9).isGoal = false;
    corridor.goal = Cell{1, 2};
    corridor.pregrid.at(1, 2).isGoal = true;
    for (Cell p : {Cell{0, 0}, Cell{0, 1}, Cell{0, 2}, Cell{1, 2}}) corridor.pregrid.at(p).wall = Wall::Free;
    SynthesisParams params;
    auto tr = execute(code, corridor);
    auto s = f_score(corridor, code, tr, a, params);
    expect(s.indicator, "corridor qualifies");
    expect(close(s.fScore, (s.fCov + s.fQual + s.fDiss) / 3), "fScore = mean of three terms");
    TaskSpec bad = corridor;
    bad.pregrid.at(0, 2).wall = Wall::Blocked;
    auto badTr = execute(code, bad);
    auto bs = f_score(bad, code, badTr, a, params);
    expect(badTr.crashed && bs.fQual == 0.0 && bs.fScore == 0.0, "crash => fScore 0");
    if (o.pass) o.detail = "all examples within 1e-9, identities exact";
    return o;
}

Outcome c8_improvement() {
    Outcome o;
    Code code = exemplar("H5");
    TaskSpec ref = ref_task("H5");
    double sumShort = 0, sumLong = 0;
    int qualifying = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto t0 = Clock::now();
        auto s = synthesize_task(code, ref, ref_code("H5"), desk(kShortIterations), nullptr, seed);
        auto l = synthesize_task(code, ref, ref_code("H5"), desk(kDeskIterations), nullptr, seed);
        double secs = since(t0);
        double bs = s.best ? s.best->scores.fScore : 0.0;
        double bl = l.best ? l.best->scores.fScore : 0.0;
        std::printf("  seed %llu: best@%lld %.4f  best@%lld %.4f  (%.2f s)\n", (unsigned long long)seed,
                    kShortIterations, bs, kDeskIterations, bl, secs);
        sumShort += bs;
        sumLong += bl;
        if (l.best && recheck(*l.best, code, ref, desk(kDeskIterations)).empty()) ++qualifying;
        if (secs >= kSeedSeconds) o.fail("seed " + std::to_string(seed) + " too slow");
    }
    if (sumLong < sumShort) o.fail("mean best fell with more iterations");
    if (qualifying < 4) o.fail("only " + std::to_string(qualifying) + "/5 seeds qualified");
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean best %.4f -> %.4f, %d/5 seeds qualify", sumShort / 5, sumLong / 5, qualifying);
    if (o.pass) o.detail = buf;
    else o.detail += std::string("; ") + buf;
    return o;
}

Outcome c9_pool() {
    Outcome o;
    Code code = exemplar("H5");
    TaskSpec ref = ref_task("H5");
    auto t0 = Clock::now();
    auto pool = synthesize_pool(code, ref, ref_code("H5"), desk(kDeskIterations), 5, 11);
    double secs = since(t0);
    const auto& ts = pool.tasks;
    if (ts.size() != 5) o.fail("pool has " + std::to_string(ts.size()) + " tasks");
    for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = 0; j < ts.size(); ++j) {
            if (i == j) continue;
            if (i < j && same_visual(ts[i].task, ts[j].task)) o.fail("tasks " + std::to_string(i) + "," + std::to_string(j) + " identical");
            double d = f_diversity(ts[i].task, ts[i].decisions, {{ts[j].task, ts[j].decisions}});
            if (!(d > 0)) o.fail("diversity(" + std::to_string(i) + "," + std::to_string(j) + ") = 0");
        }
    if (secs >= kPoolSeconds) o.fail("pool took " + std::to_string(secs) + " s");
    if (o.pass) o.detail = "5 distinct tasks, pairwise diversity > 0, " + std::to_string(secs) + " s";
    return o;
}

Outcome c10_determinism() {
    Outcome o;
    SynthesisParams p;
    p.mctsIterations = 2000;
    p.runsPerCode = 2;
    p.seed = 3;
    p.workers = 4;
    fs::path base = fs::temp_directory_path() / "tasksyn_acceptance";
    fs::remove_all(base);
    std::string bytes[2];
    for (int k = 0; k < 2; ++k) {
        auto dir = base / ("run" + std::to_string(k));
        run_pipeline(ref_task("H5"), ref_code("H5"), p, dir.string());
        bytes[k] = read_file((dir / "tasks.jsonl").string());
    }
    fs::remove_all(base);
    if (bytes[0].empty()) o.fail("no JSONL records");
    if (bytes[0] != bytes[1]) o.fail("JSONL differs between runs");
    if (o.pass) o.detail = std::to_string(std::count(bytes[0].begin(), bytes[0].end(), '\n')) + " records, identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"exemplar mutation membership", c1_membership},
        {"constraint-stage monotonicity", c2_monotone},
        {"enumerator-oracle equivalence", c3_oracle},
        {"replay consistency", c4_replay},
        {"selection-filter soundness", c5_filter},
        {"shortcut-oracle correctness", c6_shortcut},
        {"scoring formula suite", c7_formulas},
        {"MCTS improvement", c8_improvement},
        {"diversity pool", c9_pool},
        {"determinism", c10_determinism},
    };
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                    since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}
