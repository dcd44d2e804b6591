#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "b2g/core/error.hpp"

namespace b2g::workflow {

/// One callable function of the codebase, described by its data interface.
struct FunctionNode {
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;  // empty only for terminal sinks
    std::string stage;
    bool mandatory = false;
    std::string description;
};

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A data key emitted by more than one node.
struct Ambiguity {
    std::string key;
    std::vector<std::string> providers;
};

class CycleError : public ModelError {
public:
    CycleError(const std::string& message, std::vector<std::string> cycle)
        : ModelError(message), cycle(std::move(cycle)) {}
    std::vector<std::string> cycle;
};

class WorkflowDag {
public:
    const std::vector<FunctionNode>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Ambiguity>& ambiguities() const { return ambiguities_; }
    std::size_t size() const { return nodes_.size(); }

    bool contains(const std::string& id) const { return index_.count(id) != 0; }
    std::size_t index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw ModelError("unknown node '" + id + "'");
        return it->second;
    }
    const FunctionNode& node(const std::string& id) const { return nodes_[index_of(id)]; }

    /// Sorted ids of every node that emits `key`.
    std::vector<std::string> providers_of(const std::string& key) const {
        auto it = providers_.find(key);
        return it == providers_.end() ? std::vector<std::string>{} : it->second;
    }

    bool has_edge(std::size_t from, std::size_t to) const {
        return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
    }
    const std::vector<std::size_t>& successors(std::size_t i) const { return succ_[i]; }
    const std::vector<std::size_t>& predecessors(std::size_t i) const { return pred_[i]; }

    /// Number of nodes on the longest directed path.
    std::size_t depth() const {
        std::vector<std::size_t> level(nodes_.size(), 1);
        std::size_t best = nodes_.empty() ? 0 : 1;
        for (auto i : topo_) {
            for (auto j : succ_[i]) level[j] = std::max(level[j], level[i] + 1);
            best = std::max(best, level[i]);
        }
        return best;
    }

    /// Topological order of the whole graph with lexicographic tie-breaking.
    const std::vector<std::size_t>& topological_order() const { return topo_; }

private:
    friend WorkflowDag build_dag(std::vector<FunctionNode> nodes);

    std::vector<FunctionNode> nodes_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::vector<std::string>> providers_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> succ_, pred_;
    std::vector<Ambiguity> ambiguities_;
    std::vector<std::size_t> topo_;
};

namespace detail {

/// Kahn's algorithm over the nodes flagged in `member`, smallest id first.
inline std::vector<std::size_t> lexicographic_toposort(const WorkflowDag& dag, const std::vector<bool>& member) {
    const auto& nodes = dag.nodes();
    std::vector<int> indeg(nodes.size(), 0);
    for (const auto& e : dag.edges())
        if (member[e.from] && member[e.to]) ++indeg[e.to];
    auto later = [&](std::size_t a, std::size_t b) { return nodes[a].id > nodes[b].id; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (member[i] && indeg[i] == 0) ready.push(i);
    std::vector<std::size_t> out;
    while (!ready.empty()) {
        const auto i = ready.top();
        ready.pop();
        out.push_back(i);
        for (auto j : dag.successors(i))
            if (member[j] && --indeg[j] == 0) ready.push(j);
    }
    return out;
}

inline std::vector<std::string> find_cycle(const std::vector<FunctionNode>& nodes,
                                           const std::vector<std::vector<std::size_t>>& succ) {
    std::vector<int> color(nodes.size(), 0);
    std::vector<std::size_t> stack;
    std::vector<std::string> cycle;
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
        color[u] = 1;
        stack.push_back(u);
        for (auto v : succ[u]) {
            if (color[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                for (; it != stack.end(); ++it) cycle.push_back(nodes[*it].id);
                cycle.push_back(nodes[v].id);
                return true;
            }
            if (color[v] == 0 && dfs(v)) return true;
        }
        stack.pop_back();
        color[u] = 2;
        return false;
    };
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (color[i] == 0 && dfs(i)) break;
    return cycle;
}

}  // namespace detail

/// Connects f_i -> f_j whenever f_j consumes a key that f_i emits.
inline WorkflowDag build_dag(std::vector<FunctionNode> nodes) {
    WorkflowDag dag;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id.empty()) throw ModelError("node id must not be empty");
        if (!dag.index_.emplace(nodes[i].id, i).second) throw ModelError("duplicate node id '" + nodes[i].id + "'");
    }
    for (const auto& n : nodes) {
        std::set<std::string> seen;
        for (const auto& k : n.outputs) {
            if (!seen.insert(k).second) continue;
            dag.providers_[k].push_back(n.id);
        }
    }
    for (auto& [key, ids] : dag.providers_) {
        std::sort(ids.begin(), ids.end());
        if (ids.size() > 1) dag.ambiguities_.push_back({key, ids});
    }

    std::set<Edge> edges;
    for (std::size_t j = 0; j < nodes.size(); ++j)
        for (const auto& key : nodes[j].inputs) {
            auto it = dag.providers_.find(key);
            if (it == dag.providers_.end()) continue;
            for (const auto& pid : it->second) edges.insert({dag.index_.at(pid), j});
        }
    dag.edges_.assign(edges.begin(), edges.end());
    dag.succ_.assign(nodes.size(), {});
    dag.pred_.assign(nodes.size(), {});
    for (const auto& e : dag.edges_) {
        dag.succ_[e.from].push_back(e.to);
        dag.pred_[e.to].push_back(e.from);
    }
    dag.nodes_ = std::move(nodes);

    auto cycle = detail::find_cycle(dag.nodes_, dag.succ_);
    if (!cycle.empty()) {
        std::string msg = "dependency cycle:";
        for (std::size_t i = 0; i < cycle.size(); ++i) msg += (i ? " -> " : " ") + cycle[i];
        throw CycleError(msg, cycle);
    }
    dag.topo_ = detail::lexicographic_toposort(dag, std::vector<bool>(dag.nodes_.size(), true));
    return dag;
}

/// Ordered execution sequence of node ids.
using CandidateSet = std::vector<std::string>;

struct MissingDependency {
    std::string node;
    std::string key;
    std::vector<std::string> providers;  // every node emitting the key, sorted
    std::string preferred;               // provider already in S, else the smallest id; empty if none
    friend bool operator==(const MissingDependency&, const MissingDependency&) = default;
};

struct OrderingViolation {
    std::string before;  // provider
    std::string after;   // consumer placed at or before the provider
    friend bool operator==(const OrderingViolation&, const OrderingViolation&) = default;
};

struct ValidationReport {
    std::vector<MissingDependency> missing_dependencies;
    std::vector<std::string> missing_mandatory;
    std::vector<OrderingViolation> ordering_violations;
    std::vector<std::string> unknown_nodes;
    std::vector<std::string> duplicate_nodes;
    std::vector<Ambiguity> ambiguities;  // ambiguous keys consumed by S, informational

    bool empty() const {
        return missing_dependencies.empty() && missing_mandatory.empty() && ordering_violations.empty() &&
               unknown_nodes.empty() && duplicate_nodes.empty();
    }
    /// Distinct keys that no node of the codebase provides.
    std::vector<std::string> unmet_keys() const {
        std::set<std::string> out;
        for (const auto& m : missing_dependencies)
            if (m.providers.empty()) out.insert(m.key);
        return {out.begin(), out.end()};
    }
};

/// Checks S against the codebase. `roots` are keys available before the
/// first function runs.
inline ValidationReport validate(const WorkflowDag& dag, const CandidateSet& s,
                                 const std::vector<std::string>& roots = {}) {
    ValidationReport r;
    std::map<std::string, std::size_t> position;
    std::set<std::string> in_s;
    for (std::size_t p = 0; p < s.size(); ++p) {
        if (!dag.contains(s[p])) {
            r.unknown_nodes.push_back(s[p]);
            continue;
        }
        if (!position.emplace(s[p], p).second) {
            r.duplicate_nodes.push_back(s[p]);
            continue;
        }
        in_s.insert(s[p]);
    }

    std::set<std::string> available(roots.begin(), roots.end());
    std::set<std::string> ambiguous_seen;
    std::set<std::string> stages;
    for (std::size_t p = 0; p < s.size(); ++p) {
        auto pos = position.find(s[p]);
        if (pos == position.end() || pos->second != p) continue;
        const auto& node = dag.node(s[p]);
        stages.insert(node.stage);
        std::set<std::string> asked;
        for (const auto& key : node.inputs) {
            if (!asked.insert(key).second) continue;
            auto providers = dag.providers_of(key);
            if (providers.size() > 1 && ambiguous_seen.insert(key).second) r.ambiguities.push_back({key, providers});
            if (available.count(key)) continue;
            std::string preferred;
            for (const auto& pid : providers)
                if (in_s.count(pid)) {
                    preferred = pid;
                    break;
                }
            if (preferred.empty() && !providers.empty()) preferred = providers.front();
            r.missing_dependencies.push_back({node.id, key, std::move(providers), std::move(preferred)});
        }
        for (const auto& key : node.outputs) available.insert(key);
    }

    for (const auto& n : dag.nodes())
        if (n.mandatory && stages.count(n.stage) && !in_s.count(n.id)) r.missing_mandatory.push_back(n.id);

    for (const auto& e : dag.edges()) {
        const auto& a = dag.nodes()[e.from].id;
        const auto& b = dag.nodes()[e.to].id;
        auto pa = position.find(a), pb = position.find(b);
        if (pa != position.end() && pb != position.end() && pa->second >= pb->second)
            r.ordering_violations.push_back({a, b});
    }
    return r;
}

/// Orders the members of `s` topologically, smallest id first among ties.
/// Unknown ids and repeats are dropped.
inline CandidateSet topological_sort(const WorkflowDag& dag, const CandidateSet& s) {
    std::vector<bool> member(dag.size(), false);
    for (const auto& id : s)
        if (dag.contains(id)) member[dag.index_of(id)] = true;
    CandidateSet out;
    for (auto i : detail::lexicographic_toposort(dag, member)) out.push_back(dag.nodes()[i].id);
    return out;
}

struct Task {
    std::string description;  // passed through to external retrievers untouched
    std::vector<std::string> targets;
    std::vector<std::string> roots;
};

/// Adds every mandatory node of each stage that `s` touches.
inline CandidateSet with_mandatory(const WorkflowDag& dag, CandidateSet s) {
    std::set<std::string> stages;
    for (const auto& id : s)
        if (dag.contains(id)) stages.insert(dag.node(id).stage);
    for (const auto& n : dag.nodes())
        if (n.mandatory && stages.count(n.stage)) s.push_back(n.id);
    return s;
}

/// Deterministic stand-in for a language-model retriever. It proposes the
/// targets plus the mandatory nodes of their stages, then on each refinement
/// adds the preferred provider of every missing dependency.
class GreedyRetriever {
public:
    explicit GreedyRetriever(const WorkflowDag& dag) : dag_(&dag) {}

    CandidateSet propose(const Task& task) const { return topological_sort(*dag_, with_mandatory(*dag_, task.targets)); }

    CandidateSet refine(const Task&, const CandidateSet& s, const ValidationReport& delta) const {
        CandidateSet next = s;
        for (const auto& m : delta.missing_dependencies)
            if (!m.preferred.empty()) next.push_back(m.preferred);
        for (const auto& id : delta.missing_mandatory) next.push_back(id);
        return topological_sort(*dag_, with_mandatory(*dag_, std::move(next)));
    }

private:
    const WorkflowDag* dag_;
};

struct RepairResult {
    CandidateSet candidates;
    ValidationReport report;  // the last validation; empty when resolved
    int rounds = 0;           // validations performed
    bool resolved = false;
};

/// Alternates validation and retriever refinement until the report is empty
/// or `max_rounds` validations have run.
template <class Retriever>
RepairResult repair_loop(const WorkflowDag& dag, const Task& task, const Retriever& retriever, int max_rounds) {
    if (max_rounds < 1) throw ModelError("max_rounds must be >= 1");
    RepairResult out;
    try {
        out.candidates = retriever.propose(task);
    } catch (const std::exception& e) {
        throw Error("retriever failed at round 0: " + std::string(e.what()));
    }
    for (int t = 0; t < max_rounds; ++t) {
        out.report = validate(dag, out.candidates, task.roots);
        out.rounds = t + 1;
        if (out.report.empty()) {
            out.resolved = true;
            return out;
        }
        if (t + 1 == max_rounds) break;
        try {
            out.candidates = retriever.refine(task, out.candidates, out.report);
        } catch (const std::exception& e) {
            throw Error("retriever failed at round " + std::to_string(t + 1) + ": " + e.what());
        }
    }
    return out;
}

struct TemplateEntry {
    std::string node;
    std::string source;
};

using Template = std::vector<TemplateEntry>;
using SourceStore = std::map<std::string, std::string>;

/// Source fragments of a validated set in topological order of the induced
/// subgraph, smallest id first among ties.
inline Template extract_template(const WorkflowDag& dag, const CandidateSet& s, const SourceStore& sources,
                                 const std::vector<std::string>& roots = {}) {
    const auto report = validate(dag, s, roots);
    if (!report.empty()) throw ModelError("template extraction needs a validated candidate set");
    Template out;
    for (const auto& id : topological_sort(dag, s)) {
        auto it = sources.find(id);
        if (it == sources.end()) throw ModelError("no source fragment for node '" + id + "'");
        out.push_back({id, it->second});
    }
    return out;
}

}  // namespace b2g::workflow
