#include <CLI11.hpp>

#include <iostream>

#include "tasksyn/error.hpp"
#include "tasksyn/pipeline.hpp"

using namespace tasksyn;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "key=value parameter file");
    cmd->add_option("--set", c.sets, "override one parameter, key=value")->take_all();
}

SynthesisParams params_of(const Common& c) {
    SynthesisParams p;
    if (!c.config.empty()) p = load_config(c.config, p);
    for (const auto& kv : c.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
        apply_config_line(p, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return p;
}

Code load_code(const std::string& path, std::optional<Dialect> dialect) {
    std::string text = read_file(path);
    if (dialect) return parse_code(text, *dialect);
    try {
        return parse_code(text, Dialect::Hoc);
    } catch (const ParseError&) {
        try {
            return parse_code(text, Dialect::Karel);
        } catch (const ParseError&) {
        }
        throw;
    }
}

std::optional<Dialect> dialect_opt(const std::string& s) {
    if (s.empty() || s == "auto") return std::nullopt;
    auto d = dialect_from_string(s);
    if (!d) throw ValidationError("--dialect expects hoc, karel or auto");
    return d;
}

TaskSpec load_task_file(const std::string& path) { return load_task(read_file(path)); }

std::vector<PoolEntry> load_pool(const std::string& path) {
    std::vector<PoolEntry> pool;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("pool: malformed JSON line: ") + e.what());
        }
        PoolEntry e;
        e.task = task_from_json(j.at("task"));
        if (j.contains("decisions")) e.decisions = j["decisions"].get<std::vector<int>>();
        pool.push_back(std::move(e));
    }
    return pool;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Task synthesis for HOC and Karel grid programming puzzles"};
    app.require_subcommand(1);

    std::string a1, a2, a3, a4, dialect, out, decisionsText, refPath, poolPath, stage = "all", codePath;
    int maxLen = 0, unrollCap = 0, runs = 0, depth = 2;
    long long iterations = -1, budget = 2000000;
    std::optional<std::uint64_t> seed;
    std::optional<int> deltaSize, deltaIter, deltaMini;
    bool countOnly = false;
    Common common;

    auto* cParse = app.add_subcommand("parse", "parse a code file and print its canonical form and properties");
    cParse->add_option("code", a1)->required();
    cParse->add_option("--dialect", dialect, "hoc, karel or auto");

    auto* cRender = app.add_subcommand("render", "render a task as ASCII");
    cRender->add_option("task", a1)->required();

    auto* cRun = app.add_subcommand("run", "execute a code on a task and print the trace");
    cRun->add_option("task", a1)->required();
    cRun->add_option("code", a2)->required();
    cRun->add_option("--unroll-cap", unrollCap, "loop unroll cap (default 2n)");

    auto* cShort = app.add_subcommand("shortcut", "search for a pure action sequence solving a task");
    cShort->add_option("task", a1)->required();
    cShort->add_option("--max-len", maxLen, "maximum sequence length")->required();

    auto* cMutate = app.add_subcommand("mutate", "enumerate mutations of a code");
    cMutate->add_option("code", a1)->required();
    cMutate->add_option("--dialect", dialect, "hoc, karel or auto");
    cMutate->add_option("--delta-size", deltaSize);
    cMutate->add_option("--delta-iter", deltaIter);
    cMutate->add_option("--stage", stage, "d0, d01 or all");
    cMutate->add_flag("--count-only", countOnly, "print per-stage counts only");
    add_common(cMutate, common);

    auto* cSym = app.add_subcommand("symrun", "symbolically execute a code along a decision string");
    cSym->add_option("code", a1)->required();
    cSym->add_option("--decisions", decisionsText, "comma-separated decisions, config index first")->required();
    cSym->add_option("--dialect", dialect, "hoc, karel or auto");
    cSym->add_option("--ref", refPath, "reference task supplying the block store");
    add_common(cSym, common);

    auto* cScore = app.add_subcommand("score", "score a task against a reference");
    cScore->add_option("task", a1)->required();
    cScore->add_option("code", a2)->required();
    cScore->add_option("--ref", refPath, "reference task")->required();
    cScore->add_option("--pool", poolPath, "JSONL pool of earlier tasks");
    cScore->add_option("--decisions", decisionsText, "decision string of the task (for diversity)");
    add_common(cScore, common);

    auto* cSynth = app.add_subcommand("synthesize", "run MCTS for one code");
    cSynth->add_option("refTask", a1)->required();
    cSynth->add_option("refCode", a2)->required();
    cSynth->add_option("--code", codePath, "code to synthesize for (default: the reference code)");
    cSynth->add_option("--iterations", iterations);
    cSynth->add_option("--runs", runs, "pool size; runs > 1 enables diversity scoring");
    cSynth->add_option("--seed", seed);
    cSynth->add_option("--out", out, "directory for task files");
    add_common(cSynth, common);

    auto* cPipe = app.add_subcommand("pipeline", "mutate the reference code and synthesize tasks for every mutation");
    cPipe->add_option("refTask", a1)->required();
    cPipe->add_option("refCode", a2)->required();
    cPipe->add_option("--out", out, "output directory")->required();
    cPipe->add_option("--seed", seed);
    cPipe->add_option("--iterations", iterations);
    cPipe->add_option("--runs", runs);
    add_common(cPipe, common);

    auto* cDiag = app.add_subcommand("diagnostics", "bounded checks of minimality and structure objectives");
    cDiag->add_option("task", a1)->required();
    cDiag->add_option("code", a2)->required();
    cDiag->add_option("refTask", a3)->required();
    cDiag->add_option("refCode", a4)->required();
    cDiag->add_option("--budget", budget, "maximum number of codes examined");
    cDiag->add_option("--depth", depth, "maximum code depth searched");
    cDiag->add_option("--delta-mini", deltaMini);
    add_common(cDiag, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*cParse) {
            Code c = load_code(a1, dialect_opt(dialect));
            auto p = code_props(c);
            json blocks = json::array();
            for (auto b : p.blocks) blocks.push_back(to_string(b));
            print({{"dialect", to_string(c.dialect)},
                   {"code", print_code(c)},
                   {"size", p.size},
                   {"depth", p.depth},
                   {"structSig", p.structSig},
                   {"blocks", blocks}});
        } else if (*cRender) {
            std::cout << render_ascii(load_task_file(a1));
        } else if (*cRun) {
            TaskSpec t = load_task_file(a1);
            Code c = load_code(a2, t.dialect);
            print(trace_to_json(execute(c, t, unrollCap)));
        } else if (*cShort) {
            TaskSpec t = load_task_file(a1);
            if (maxLen < 0) throw ValidationError("--max-len must be non-negative");
            auto r = find_shortcut(t, maxLen);
            if (r.status == ShortcutStatus::None) {
                std::cout << "none\n";
            } else if (r.status == ShortcutStatus::Indeterminate) {
                std::cout << "indeterminate\n";
            } else {
                std::string s;
                for (auto a : r.actions) s += std::string(s.empty() ? "" : " ") + std::string(to_string(a));
                std::cout << s << "\n";
            }
        } else if (*cMutate) {
            SynthesisParams p = params_of(common);
            if (deltaSize) p.deltaSize = *deltaSize;
            if (deltaIter) p.deltaIter = *deltaIter;
            auto st = stage_from_string(stage);
            if (!st) throw ValidationError("--stage expects d0, d01 or all");
            Code c = load_code(a1, dialect_opt(dialect));
            Sketch sk = build_sketch(c, p.deltaSize);
            if (countOnly) {
                auto k = stage_counts(sk, p);
                print({{"delta0", k.d0}, {"delta0_1", k.d01}, {"all", k.all}, {"elapsedSeconds", k.elapsedSeconds}});
            } else {
                for (const auto& m : enumerate_mutations(sk, p, *st)) std::cout << code_key(m) << "\n";
            }
        } else if (*cSym) {
            SynthesisParams p = params_of(common);
            Code c = load_code(a1, dialect_opt(dialect));
            TaskSpec ref;
            if (!refPath.empty()) {
                ref = load_task_file(refPath);
            } else {
                ref.store = code_props(c).blocks;
            }
            auto ctx = make_sym_context(p, ref);
            print(sym_outcome_to_json(run_symbolic(c, parse_decisions(decisionsText), ctx)));
        } else if (*cScore) {
            SynthesisParams p = params_of(common);
            TaskSpec t = load_task_file(a1);
            TaskSpec ref = load_task_file(refPath);
            Code c = load_code(a2, t.dialect);
            Trace tr = execute(c, t, effective_unroll_cap(p, t.n));
            std::vector<PoolEntry> pool;
            if (!poolPath.empty()) pool = load_pool(poolPath);
            auto s = f_score(t, c, tr, ref, p, poolPath.empty() ? nullptr : &pool, parse_decisions(decisionsText));
            print(score_to_json(s));
        } else if (*cSynth) {
            SynthesisParams p = params_of(common);
            if (iterations >= 0) p.mctsIterations = iterations;
            if (seed) p.seed = *seed;
            TaskSpec ref = load_task_file(a1);
            Code refCode = load_code(a2, ref.dialect);
            Code c = codePath.empty() ? refCode : load_code(codePath, ref.dialect);
            json stats = json::array();
            json tasks = json::array();
            std::vector<Candidate> found;
            if (runs > 1) {
                auto pr = synthesize_pool(c, ref, refCode, p, runs, p.seed);
                for (const auto& s : pr.stats) stats.push_back(run_stats_to_json(s));
                found = pr.tasks;
            } else {
                auto r = synthesize_task(c, ref, refCode, p, nullptr, p.seed);
                stats.push_back(run_stats_to_json(r.stats));
                if (r.best) found.push_back(*r.best);
            }
            for (size_t k = 0; k < found.size(); ++k) {
                json j = candidate_to_json(found[k]);
                j["rendered"] = render_ascii(found[k].task);
                tasks.push_back(j);
                if (!out.empty())
                    write_file(out + "/task_" + std::to_string(k) + ".json", save_task(found[k].task) + "\n");
            }
            json result = {{"code", print_code(c)}, {"runs", stats}, {"tasks", tasks}};
            if (!out.empty()) write_file(out + "/synthesis.json", result.dump(2) + "\n");
            print(result);
            if (found.empty()) std::cerr << "no qualifying task found\n";
        } else if (*cPipe) {
            SynthesisParams p = params_of(common);
            if (iterations >= 0) p.mctsIterations = iterations;
            if (runs > 0) p.runsPerCode = runs;
            if (seed) p.seed = *seed;
            TaskSpec ref = load_task_file(a1);
            Code refCode = load_code(a2, ref.dialect);
            auto rep = run_pipeline(ref, refCode, p, out);
            print(report_to_json(rep)["perStageCounts"]);
        } else if (*cDiag) {
            SynthesisParams p = params_of(common);
            if (deltaMini) p.deltaMini = *deltaMini;
            TaskSpec t = load_task_file(a1);
            Code c = load_code(a2, t.dialect);
            TaskSpec ref = load_task_file(a3);
            Code refCode = load_code(a4, ref.dialect);
            print(diagnostics_to_json(objective_diagnostics(t, c, ref, refCode, p, budget, depth)));
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
