#include "tasksyn/scoring.hpp"

#include <algorithm>

#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

double ratio(int count, double scale) { return std::min(1.0, double(count) / scale); }

enum class Label { Blocked, Free, Goal, Marker };

Label label(const TaskSpec& t, int r, int c) {
    const auto& s = t.pregrid.at(r, c);
    if (s.wall == Wall::Blocked) return Label::Blocked;
    if (s.isGoal || (t.goal && *t.goal == Cell{r, c})) return Label::Goal;
    if (s.markers > 0) return Label::Marker;
    return Label::Free;
}

}  // namespace

double f_qual(const Trace& trace, int n, Dialect dialect) {
    if (n <= 0) throw ValidationError("f_qual: n must be positive");
    if (trace.crashed) return 0.0;
    const auto& k = trace.counts;
    double base = (ratio(k.moves, 2.0 * n) + ratio(k.turns, n) + ratio(k.segments, n / 2.0) +
                   ratio(k.longSegments, n / 3.0)) /
                  4.0;
    if (dialect == Dialect::Hoc) return base;
    double markers = (ratio(k.pickMarkers, n) + ratio(k.putMarkers, n)) / 2.0;
    return 0.75 * base + 0.25 * markers;
}

DissTerms diss_terms(const TaskSpec& a, const TaskSpec& b) {
    if (a.n != b.n) throw ValidationError("dissimilarity needs equal grid sizes (" + std::to_string(a.n) + " vs " +
                                          std::to_string(b.n) + ")");
    DissTerms d;
    d.loc = a.start.cell() != b.start.cell();
    d.dir = a.start.dir != b.start.dir;
    int diff = 0;
    for (int r = 0; r < a.n; ++r)
        for (int c = 0; c < a.n; ++c) diff += label(a, r, c) != label(b, r, c);
    d.grid = a.n == 0 ? 0.0 : std::min(1.0, double(diff) * 2.0 / double(a.n * a.n));
    return d;
}

double f_diss(const TaskSpec& a, const TaskSpec& b) {
    auto d = diss_terms(a, b);
    return (d.loc + d.dir + d.grid) / 3.0;
}

int f_cov(const Trace& trace, const Code& code) {
    for (int id : all_node_ids(code))
        if (!trace.coveredNodes.count(id)) return 0;
    return 1;
}

int f_nocut(const TaskSpec& task, const Code& code, long long stateCap) {
    int maxLen = code_size(code) - 1;
    if (maxLen < 0) return 1;
    return find_shortcut(task, maxLen, stateCap).status == ShortcutStatus::None ? 1 : 0;
}

double path_distance(const std::vector<int>& a, const std::vector<int>& b) {
    size_t longer = std::max(a.size(), b.size());
    if (longer == 0) return 0.0;
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return double(prev[b.size()]) / double(longer);
}

bool same_visual(const TaskSpec& a, const TaskSpec& b) {
    return a.n == b.n && a.start == b.start && a.end == b.end && a.goal == b.goal && a.pregrid == b.pregrid &&
           a.postgrid == b.postgrid;
}

double f_diversity(const TaskSpec& task, const std::vector<int>& decisions, const std::vector<PoolEntry>& pool) {
    double best = 1.0;
    for (const auto& e : pool) {
        if (same_visual(task, e.task)) return 0.0;
        auto d = diss_terms(task, e.task);
        best = std::min(best, (d.loc + d.dir + d.grid + path_distance(decisions, e.decisions)) / 4.0);
    }
    return best;
}

ScoreBreakdown f_score(const TaskSpec& task, const Code& code, const Trace& trace, const TaskSpec& refTask,
                       const SynthesisParams& params, const std::vector<PoolEntry>* pool,
                       const std::vector<int>& decisions) {
    ScoreBreakdown s;
    s.featureCounts = trace.counts;
    s.fNocrash = trace.crashed ? 0 : 1;
    s.fCov = f_cov(trace, code);
    s.fQual = f_qual(trace, task.n, task.dialect);
    s.fDiss = f_diss(task, refTask);
    s.fNocut = f_nocut(task, code, params.shortcutStateCap);
    double sum = s.fCov + s.fQual + s.fDiss;
    if (pool) {
        s.fDiversity = f_diversity(task, decisions, *pool);
        s.component = (sum + *s.fDiversity) / 4.0;
    } else {
        s.component = sum / 3.0;
    }
    s.indicator = s.fQual >= effective_delta_qual(params, code) && s.fNocrash == 1 && s.fNocut == 1;
    s.fScore = s.indicator ? s.component : 0.0;
    return s;
}

nlohmann::json score_to_json(const ScoreBreakdown& s) {
    nlohmann::json j;
    j["fCov"] = s.fCov;
    j["fQual"] = s.fQual;
    j["fDiss"] = s.fDiss;
    j["fNocrash"] = s.fNocrash;
    j["fNocut"] = s.fNocut;
    if (s.fDiversity) j["fDiversity"] = *s.fDiversity;
    j["component"] = s.component;
    j["indicator"] = s.indicator;
    j["fScore"] = s.fScore;
    const auto& k = s.featureCounts;
    j["featureCounts"] = {{"moves", k.moves},           {"turns", k.turns},           {"segments", k.segments},
                          {"longSegments", k.longSegments}, {"pickMarkers", k.pickMarkers}, {"putMarkers", k.putMarkers}};
    return j;
}

ScoreBreakdown score_from_json(const nlohmann::json& j) {
    ScoreBreakdown s;
    try {
        s.fCov = j.at("fCov").get<int>();
        s.fQual = j.at("fQual").get<double>();
        s.fDiss = j.at("fDiss").get<double>();
        s.fNocrash = j.at("fNocrash").get<int>();
        s.fNocut = j.at("fNocut").get<int>();
        if (j.contains("fDiversity")) s.fDiversity = j.at("fDiversity").get<double>();
        s.component = j.at("component").get<double>();
        s.indicator = j.at("indicator").get<bool>();
        s.fScore = j.at("fScore").get<double>();
        const auto& k = j.at("featureCounts");
        s.featureCounts = {k.at("moves").get<int>(),        k.at("turns").get<int>(),
                           k.at("segments").get<int>(),     k.at("longSegments").get<int>(),
                           k.at("pickMarkers").get<int>(),  k.at("putMarkers").get<int>()};
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad score record: ") + e.what());
    }
    return s;
}

}  // namespace tasksyn
