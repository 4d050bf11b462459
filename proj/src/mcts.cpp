#include "tasksyn/mcts.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <unordered_map>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

struct Node {
    // -1 until a rollout first passes through; 0 marks a terminal prefix.
    int arity = -1;
    std::vector<int> children;
    long long visits = 0;
    double total = 0;
};

std::string key_of(const std::vector<int>& d) {
    std::string k;
    k.reserve(d.size());
    for (int v : d) k += char(v);
    return k;
}

class Search {
public:
    Search(const Code& code, const TaskSpec& refTask, const SynthesisParams& params, const std::vector<PoolEntry>* pool,
           std::uint64_t seed)
        : code_(code), ref_(refTask), params_(params), pool_(pool), seed_(seed), rng_(seed),
          ctx_(make_sym_context(params, refTask)), deltaQual_(effective_delta_qual(params, code)) {
        nodes_.emplace_back();
    }

    SynthesisRun run() {
        auto t0 = std::chrono::steady_clock::now();
        SynthesisRun out;
        std::vector<int> path;
        std::vector<int> prefix;
        for (long long it = 1; it <= params_.mctsIterations; ++it) {
            path.assign(1, 0);
            prefix.clear();
            int cur = 0;
            while (true) {
                Node& nd = nodes_[size_t(cur)];
                if (nd.arity <= 0) break;
                int pick = -1;
                for (int i = 0; i < nd.arity; ++i)
                    if (nd.children[size_t(i)] < 0) {
                        pick = i;
                        break;
                    }
                if (pick >= 0) {
                    int id = int(nodes_.size());
                    nodes_[size_t(cur)].children[size_t(pick)] = id;
                    nodes_.emplace_back();
                    prefix.push_back(pick);
                    path.push_back(id);
                    cur = id;
                    break;
                }
                pick = select(nd);
                prefix.push_back(pick);
                cur = nd.children[size_t(pick)];
                path.push_back(cur);
            }

            PrefixThenRandom src(prefix, rng_);
            SymOutcome o = run_symbolic(code_, src, ctx_);
            Node& leaf = nodes_[size_t(cur)];
            if (leaf.arity < 0) {
                leaf.arity = src.arity_after_prefix();
                leaf.children.assign(size_t(leaf.arity), -1);
            }
            switch (o.status) {
            case SymStatus::TaskEmitted: out.stats.emitted++; break;
            case SymStatus::Crashed: out.stats.crashed++; break;
            case SymStatus::DepthExceeded: out.stats.depthExceeded++; break;
            case SymStatus::Contradiction: out.stats.contradictions++; break;
            case SymStatus::NeedsDecision: break;
            }
            double reward = evaluate(o, it);
            for (int id : path) {
                nodes_[size_t(id)].visits++;
                nodes_[size_t(id)].total += reward;
            }
            out.stats.iterations = it;
        }
        out.stats.uniqueTraces = (long long)(cache_.size());
        if (bestOutcome_) out.best = finish(*bestOutcome_);
        out.stats.bestScoreTimeline = timeline_;
        out.stats.elapsedSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

private:
    int select(const Node& nd) const {
        double logN = std::log(double(nd.visits));
        int best = 0;
        double bestV = -1;
        for (int i = 0; i < nd.arity; ++i) {
            const Node& ch = nodes_[size_t(nd.children[size_t(i)])];
            double v = ch.total / double(ch.visits) +
                       params_.explorationConstant * std::sqrt(logN / double(ch.visits));
            if (v > bestV) {
                bestV = v;
                best = i;
            }
        }
        return best;
    }

    double evaluate(const SymOutcome& o, long long it) {
        if (o.status != SymStatus::TaskEmitted) return 0.0;
        auto key = key_of(o.decisions);
        auto hit = cache_.find(key);
        if (hit != cache_.end()) return hit->second;

        const TaskSpec& task = *o.task;
        const Trace& tr = o.trace;
        int cov = f_cov(tr, code_);
        double qual = f_qual(tr, task.n, task.dialect);
        double diss = f_diss(task, ref_);
        double sum = cov + qual + diss;
        double reward = sum / 3.0;
        double div = 1.0;
        if (pool_) {
            div = f_diversity(task, o.decisions, *pool_);
            reward = (sum + div) / 4.0;
        }
        cache_.emplace(std::move(key), reward);

        bool eligible = cov == 1 && qual >= deltaQual_ && diss >= params_.deltaDiss && (!pool_ || div > 0);
        if (eligible && reward > bestReward_ && f_nocut(task, code_, params_.shortcutStateCap) == 1) {
            bestReward_ = reward;
            bestOutcome_ = o;
            timeline_.push_back({it, reward});
        }
        return reward;
    }

    // Re-scores from the concrete interpreter so the stored breakdown never
    // depends on the symbolic bookkeeping.
    Candidate finish(const SymOutcome& o) {
        Candidate c;
        c.task = *o.task;
        c.decisions = o.decisions;
        int cap = effective_unroll_cap(params_, params_.n);
        c.scores = f_score(c.task, code_, execute(code_, c.task, cap), ref_, params_, pool_, c.decisions);
        if (params_.distractorBudget > 0) {
            TaskSpec d = apply_distractors(c.task, code_, mix_seed(seed_, 0xd157), params_.distractorBudget, cap);
            ScoreBreakdown s = f_score(d, code_, execute(code_, d, cap), ref_, params_, pool_, c.decisions);
            if (s.indicator && s.fCov == 1 && s.fDiss >= params_.deltaDiss &&
                (!pool_ || (s.fDiversity && *s.fDiversity > 0))) {
                c.task = std::move(d);
                c.scores = s;
            }
        }
        return c;
    }

    const Code& code_;
    const TaskSpec& ref_;
    const SynthesisParams& params_;
    const std::vector<PoolEntry>* pool_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    SymContext ctx_;
    double deltaQual_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, double> cache_;
    double bestReward_ = -1;
    std::optional<SymOutcome> bestOutcome_;
    std::vector<std::pair<long long, double>> timeline_;
};

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SynthesisRun synthesize_task(const Code& code, const TaskSpec& refTask, const Code& refCode,
                             const SynthesisParams& params, const std::vector<PoolEntry>* pool,
                             std::uint64_t seed) {
    if (code.dialect != refCode.dialect || code.dialect != refTask.dialect)
        throw ValidationError("code and reference task dialects differ");
    if (params.n != refTask.n)
        throw ValidationError("grid size n=" + std::to_string(params.n) + " differs from the reference task's " +
                              std::to_string(refTask.n));
    if (params.mctsIterations < 0) throw ValidationError("mctsIterations must be non-negative");
    Search s(code, refTask, params, pool, seed);
    return s.run();
}

PoolRun synthesize_pool(const Code& code, const TaskSpec& refTask, const Code& refCode, const SynthesisParams& params,
                        int k, std::uint64_t seed) {
    if (k < 1) throw ValidationError("pool size k must be at least 1");
    PoolRun out;
    std::vector<PoolEntry> pool;
    for (int i = 0; i < k; ++i) {
        SynthesisRun r = synthesize_task(code, refTask, refCode, params, &pool, mix_seed(seed, std::uint64_t(i)));
        out.stats.push_back(r.stats);
        if (!r.best || !r.best->scores.fDiversity || *r.best->scores.fDiversity <= 0) break;
        pool.push_back({r.best->task, r.best->decisions});
        out.tasks.push_back(std::move(*r.best));
    }
    return out;
}

nlohmann::json run_stats_to_json(const RunStats& s) {
    nlohmann::json tl = nlohmann::json::array();
    for (auto [it, v] : s.bestScoreTimeline) tl.push_back({it, v});
    return {{"iterations", s.iterations},
            {"uniqueTraces", s.uniqueTraces},
            {"emitted", s.emitted},
            {"crashed", s.crashed},
            {"depthExceeded", s.depthExceeded},
            {"contradictions", s.contradictions},
            {"bestScoreTimeline", tl},
            {"elapsedSeconds", s.elapsedSeconds}};
}

nlohmann::json candidate_to_json(const Candidate& c) {
    return {{"task", task_to_json(c.task)}, {"scores", score_to_json(c.scores)}, {"decisions", c.decisions}};
}

}  // namespace tasksyn
