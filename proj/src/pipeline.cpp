#include "tasksyn/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    T out{};
    in >> out;
    if (in.fail() || !in.eof()) throw ValidationError("config: " + key + " expects a number, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config: " + key + " expects true/false, got '" + v + "'");
}

std::string code_id(size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "c%04zu", i);
    return buf;
}

}  // namespace

void apply_config_line(SynthesisParams& p, const std::string& key, const std::string& value) {
    const std::string& v = value;
    if (key == "deltaSize") p.deltaSize = parse_number<int>(key, v);
    else if (key == "deltaIter") p.deltaIter = parse_number<int>(key, v);
    else if (key == "deltaDiss") p.deltaDiss = parse_number<double>(key, v);
    else if (key == "deltaQual") {
        if (v == "auto" || v.empty())
            p.deltaQual.reset();
        else
            p.deltaQual = parse_number<double>(key, v);
    } else if (key == "deltaMini") p.deltaMini = parse_number<int>(key, v);
    else if (key == "n") p.n = parse_number<int>(key, v);
    else if (key == "mctsIterations") p.mctsIterations = parse_number<long long>(key, v);
    else if (key == "explorationConstant") p.explorationConstant = parse_number<double>(key, v);
    else if (key == "unrollCap") p.unrollCap = parse_number<int>(key, v);
    else if (key == "runsPerCode") p.runsPerCode = parse_number<int>(key, v);
    else if (key == "seed") p.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "trimTrailingTurns") p.trimTrailingTurns = parse_bool(key, v);
    else if (key == "shortcutStateCap") p.shortcutStateCap = parse_number<long long>(key, v);
    else if (key == "distractorBudget") p.distractorBudget = parse_number<int>(key, v);
    else if (key == "preinit") p.preinit = v;
    else if (key == "workers") p.workers = parse_number<int>(key, v);
    else throw ValidationError("config: unknown key '" + key + "'");

    if (p.deltaSize < 0) throw ValidationError("config: deltaSize must be non-negative");
    if (p.deltaIter < 0) throw ValidationError("config: deltaIter must be non-negative");
    if (p.n < 1 || p.n > 64) throw ValidationError("config: n must be in 1..64");
    if (p.runsPerCode < 1) throw ValidationError("config: runsPerCode must be at least 1");
    if (p.workers < 1) throw ValidationError("config: workers must be at least 1");
}

SynthesisParams parse_config(const std::string& text, SynthesisParams base) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineNo) + ": expected key = value");
        apply_config_line(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

SynthesisParams load_config(const std::string& path, SynthesisParams base) {
    return parse_config(read_file(path), std::move(base));
}

nlohmann::json params_to_json(const SynthesisParams& p) {
    nlohmann::json j;
    j["deltaSize"] = p.deltaSize;
    j["deltaIter"] = p.deltaIter;
    j["deltaDiss"] = p.deltaDiss;
    if (p.deltaQual)
        j["deltaQual"] = *p.deltaQual;
    else
        j["deltaQual"] = "auto";
    j["deltaMini"] = p.deltaMini;
    j["n"] = p.n;
    j["mctsIterations"] = p.mctsIterations;
    j["explorationConstant"] = p.explorationConstant;
    j["unrollCap"] = p.unrollCap;
    j["runsPerCode"] = p.runsPerCode;
    j["seed"] = p.seed;
    j["trimTrailingTurns"] = p.trimTrailingTurns;
    j["shortcutStateCap"] = p.shortcutStateCap;
    j["distractorBudget"] = p.distractorBudget;
    j["preinit"] = p.preinit;
    j["workers"] = p.workers;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << bytes;
    if (!out) throw IoError("write failed for " + path);
}

std::string jsonl_record(const TaskRecord& r) {
    nlohmann::json j;
    j["codeId"] = r.codeId;
    j["code"] = print_code(r.code);
    j["task"] = task_to_json(r.result.task);
    j["scores"] = score_to_json(r.result.scores);
    j["decisions"] = r.result.decisions;
    j["seed"] = r.seed;
    return j.dump();
}

nlohmann::json report_to_json(const PipelineReport& r) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& t : r.tasks)
        recs.push_back({{"codeId", t.codeId},
                        {"taskFile", t.taskFile},
                        {"scores", score_to_json(t.result.scores)},
                        {"seed", t.seed},
                        {"decisions", t.result.decisions}});
    nlohmann::json pruned = nlohmann::json::array();
    std::map<std::string, int> reasons;
    for (const auto& p : r.pruned) {
        pruned.push_back({{"codeId", p.codeId}, {"code", p.code}, {"reason", p.reason}});
        reasons[p.reason]++;
    }
    return {{"perStageCounts",
             {{"delta0", r.stageCounts.d0},
              {"delta0_1", r.stageCounts.d01},
              {"all", r.stageCounts.all},
              {"candidates", r.candidates},
              {"validCodes", r.validCodes},
              {"emittedTasks", r.tasks.size()}}},
            {"tasks", recs},
            {"pruned", pruned},
            {"prunedReasons", reasons},
            {"elapsedSeconds", r.elapsedSeconds}};
}

PipelineReport run_pipeline(const TaskSpec& refTask, const Code& refCode, const SynthesisParams& params,
                            const std::string& outDir) {
    auto t0 = std::chrono::steady_clock::now();
    validate_task(refTask);
    validate_code(refCode);
    const int cap = effective_unroll_cap(params, refTask.n);
    if (!execute(refCode, refTask, cap).solved)
        throw ValidationError("reference code does not solve the reference task");

    PipelineReport rep;
    Sketch sk = build_sketch(refCode, params.deltaSize);
    rep.stageCounts = stage_counts(sk, params);
    std::vector<Code> muts = enumerate_mutations(sk, params, Stage::All);
    rep.mutations = (long long)muts.size();
    const std::string refKey = code_key(refCode);
    std::vector<Code> codes;
    for (auto& m : muts)
        if (code_key(m) != refKey) codes.push_back(std::move(m));
    rep.candidates = (long long)codes.size();

    std::vector<PoolRun> runs(codes.size());
    std::vector<std::uint64_t> seeds(codes.size());
    std::atomic<size_t> next{0};
    std::mutex errMu;
    std::exception_ptr err;
    auto worker = [&] {
        for (size_t i = next++; i < codes.size(); i = next++) {
            try {
                seeds[i] = mix_seed(params.seed, i);
                runs[i] = synthesize_pool(codes[i], refTask, refCode, params, params.runsPerCode, seeds[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lk(errMu);
                if (!err) err = std::current_exception();
            }
        }
    };
    int nThreads = std::max(1, std::min<int>(params.workers, int(codes.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nThreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);

    for (size_t i = 0; i < codes.size(); ++i) {
        const auto id = code_id(i);
        if (runs[i].tasks.empty()) {
            long long emitted = 0;
            for (const auto& s : runs[i].stats) emitted += s.emitted;
            rep.pruned.push_back({id, code_key(codes[i]), emitted ? "filterNeverPassed" : "noTaskEmitted"});
            continue;
        }
        rep.validCodes++;
        for (size_t k = 0; k < runs[i].tasks.size(); ++k) {
            TaskRecord r;
            r.codeId = id;
            r.code = codes[i];
            r.result = runs[i].tasks[k];
            r.seed = seeds[i];
            r.taskFile = "tasks/" + id + "_" + std::to_string(k) + ".json";
            rep.tasks.push_back(std::move(r));
        }
    }
    rep.elapsedSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!outDir.empty()) {
        std::string jsonl;
        for (const auto& r : rep.tasks) jsonl += jsonl_record(r) + "\n";
        write_file(outDir + "/tasks.jsonl", jsonl);
        for (const auto& r : rep.tasks) write_file(outDir + "/" + r.taskFile, save_task(r.result.task) + "\n");
        nlohmann::json j = report_to_json(rep);
        j["params"] = params_to_json(params);
        write_file(outDir + "/report.json", j.dump(2) + "\n");
    }
    return rep;
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Proven: return "proven";
    case Verdict::Refuted: return "refuted";
    case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

// Enumerates codes over a block store, smallest first, within a node budget.
class SmallCodes {
public:
    SmallCodes(const TaskSpec& task, int depthLimit, long long budget)
        : dialect_(task.dialect), depthLimit_(depthLimit), budget_(budget) {
        for (auto a : dialect_actions(dialect_))
            if (task.store.count(block_of(a))) actions_.push_back(a);
        auto has = [&](BlockKind b) { return task.store.count(b) > 0; };
        repeat_ = has(BlockKind::Repeat);
        while_ = has(BlockKind::While) && dialect_ == Dialect::Karel;
        until_ = has(BlockKind::RepeatUntil) && dialect_ == Dialect::Hoc;
        if_ = has(BlockKind::If);
        ifElse_ = has(BlockKind::IfElse);
        for (auto c : dialect_conditions(dialect_))
            if (c != Condition::Goal) conds_.push_back(c);
    }

    bool has_constructs() const { return repeat_ || while_ || until_ || if_ || ifElse_; }

    // Returns false if the budget ran out.
    bool run(int size, const std::function<void(const Code&)>& visit) {
        std::vector<Stmt> acc;
        lists(size, depthLimit_, true, acc, [&] {
            Code c = make_code(dialect_, acc);
            ++examined_;
            visit(c);
            if (examined_ >= budget_) aborted_ = true;
        });
        return !aborted_;
    }

    long long examined() const { return examined_; }

private:
    using Sink = std::function<void()>;
    using StmtSink = std::function<void(Stmt)>;

    void lists(int size, int depth, bool top, std::vector<Stmt>& acc, const Sink& done) {
        if (aborted_) return;
        if (size == 0) {
            done();
            return;
        }
        for (int k = 1; k <= size && !aborted_; ++k)
            stmts(k, depth, top && k == size, [&](Stmt s) {
                acc.push_back(std::move(s));
                lists(size - k, depth, top, acc, done);
                acc.pop_back();
            });
    }

    void bodies(int size, int depth, const std::function<void(const std::vector<Stmt>&)>& f) {
        std::vector<Stmt> acc;
        lists(size, depth, false, acc, [&] { f(acc); });
    }

    void stmts(int k, int depth, bool lastTop, const StmtSink& out) {
        if (aborted_ || depth < 1) return;
        if (k == 1) {
            for (auto a : actions_) out(Stmt::act(a));
            return;
        }
        if (depth < 2) return;
        bodies(k - 1, depth - 1, [&](const std::vector<Stmt>& b) {
            if (repeat_)
                for (int it = 2; it <= 10; ++it) out(Stmt::repeat(it, b));
            for (auto c : conds_) {
                if (while_) out(Stmt::whileLoop(c, b));
                if (if_) out(Stmt::ifThen(c, b));
            }
            if (until_ && lastTop) out(Stmt::repeatUntil(b));
        });
        if (!ifElse_) return;
        for (int a = 1; a + 1 <= k - 1; ++a)
            bodies(a, depth - 1, [&](const std::vector<Stmt>& t) {
                bodies(k - 1 - a, depth - 1, [&](const std::vector<Stmt>& e) {
                    for (auto c : conds_) out(Stmt::ifElse(c, t, e));
                });
            });
    }

    Dialect dialect_;
    int depthLimit_;
    long long budget_;
    long long examined_ = 0;
    bool aborted_ = false;
    std::vector<Action> actions_;
    std::vector<Condition> conds_;
    bool repeat_ = false, while_ = false, until_ = false, if_ = false, ifElse_ = false;
};

}  // namespace

DiagnosticsReport objective_diagnostics(const TaskSpec& task, const Code& code, const TaskSpec& refTask,
                                        const Code& refCode, const SynthesisParams& params, long long nodeBudget,
                                        int depthLimit) {
    DiagnosticsReport rep;
    rep.conceptuallySimilar = is_conceptually_similar(task, code, refTask, refCode, params.deltaSize);
    const int cap = effective_unroll_cap(params, task.n);
    const int minLimit = task.maxBlocks - params.deltaMini - 1;
    const int structLimit = task.maxBlocks;

    std::optional<std::string> shorter;
    if (minLimit >= 0) {
        auto sc = find_shortcut(task, minLimit, params.shortcutStateCap);
        if (sc.status == ShortcutStatus::Found) {
            std::string s;
            for (auto a : sc.actions) s += std::string(s.empty() ? "" : " ") + std::string(to_string(a));
            shorter = "action sequence of length " + std::to_string(sc.actions.size()) + ": " + s;
        }
    }

    SmallCodes gen(task, depthLimit, nodeBudget);
    std::optional<std::string> otherStruct;
    bool complete = true;
    const std::string sig = struct_sig(code);
    for (int size = 1; size <= structLimit && complete; ++size) {
        complete = gen.run(size, [&](const Code& c) {
            if (shorter && otherStruct) return;
            if (!execute(c, task, cap).solved) return;
            if (!shorter && size <= minLimit) shorter = "code of size " + std::to_string(size) + ": " + code_key(c);
            if (!otherStruct && struct_sig(c) != sig)
                otherStruct = "solution with structure " + struct_sig(c) + ": " + code_key(c);
        });
    }
    rep.codesExamined = gen.examined();
    // Depth is capped, so the search covers every code only when the cap cannot bind.
    rep.exhaustive = complete && (!gen.has_constructs() || depthLimit >= structLimit);
    const bool minExhaustive = complete && (!gen.has_constructs() || depthLimit >= minLimit);

    if (shorter) {
        rep.minimality = Verdict::Refuted;
        rep.minimalityDetail = *shorter;
    } else if (minExhaustive) {
        rep.minimality = Verdict::Proven;
        rep.minimalityDetail = "no solution of size <= " + std::to_string(minLimit);
    } else {
        rep.minimalityDetail = complete ? "depth cap may hide solutions" : "node budget exhausted";
    }
    if (otherStruct) {
        rep.structure = Verdict::Refuted;
        rep.structureDetail = *otherStruct;
    } else if (rep.exhaustive) {
        rep.structure = Verdict::Proven;
        rep.structureDetail = "every solution of size <= " + std::to_string(structLimit) + " has structure " + sig;
    } else {
        rep.structureDetail = complete ? "depth cap may hide solutions" : "node budget exhausted";
    }
    return rep;
}

nlohmann::json diagnostics_to_json(const DiagnosticsReport& d) {
    return {{"minimality", {{"verdict", to_string(d.minimality)}, {"detail", d.minimalityDetail}}},
            {"structure", {{"verdict", to_string(d.structure)}, {"detail", d.structureDetail}}},
            {"codesExamined", d.codesExamined},
            {"exhaustive", d.exhaustive},
            {"conceptuallySimilar", d.conceptuallySimilar}};
}

}  // namespace tasksyn
