#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "b2g/core/error.hpp"
#include "b2g/power/network_io.hpp"
#include "b2g/workflow/dag.hpp"

namespace b2g::tgd {

using Config = std::map<std::string, std::string>;

struct ComponentEntry {
    std::string id;
    Config config;
    friend bool operator==(const ComponentEntry&, const ComponentEntry&) = default;
};

/// The program being refined: opaque text plus the components it claims.
struct ProgramArtifact {
    std::string body;
    std::vector<ComponentEntry> manifest;

    const ComponentEntry* find(const std::string& id) const {
        for (const auto& e : manifest)
            if (e.id == id) return &e;
        return nullptr;
    }
    bool has_unique_ids() const {
        std::set<std::string> seen;
        for (const auto& e : manifest)
            if (!seen.insert(e.id).second) return false;
        return true;
    }
    friend bool operator==(const ProgramArtifact&, const ProgramArtifact&) = default;
};

/// Required components with the configuration each one must carry.
struct RequirementSpec {
    std::vector<ComponentEntry> items;

    void validate() const {
        std::set<std::string> seen;
        for (const auto& e : items)
            if (!seen.insert(e.id).second) throw ModelError("duplicate requirement '" + e.id + "'");
    }
};

/// An entry satisfies a requirement when ids agree and every expected
/// configuration key is present with the expected value.
inline bool satisfies(const ComponentEntry& entry, const ComponentEntry& required) {
    if (entry.id != required.id) return false;
    for (const auto& [k, v] : required.config) {
        auto it = entry.config.find(k);
        if (it == entry.config.end() || it->second != v) return false;
    }
    return true;
}

/// N_correct / (N_total + N_extra).
inline double code_score(const std::vector<ComponentEntry>& manifest, const RequirementSpec& spec) {
    if (spec.items.empty()) throw ModelError("no requirements defined");
    spec.validate();
    std::set<std::string> correct;
    std::size_t extra = 0;
    for (const auto& e : manifest) {
        const ComponentEntry* req = nullptr;
        for (const auto& r : spec.items)
            if (r.id == e.id) req = &r;
        if (!req) {
            ++extra;
            continue;
        }
        if (satisfies(e, *req)) correct.insert(e.id);
    }
    return static_cast<double>(correct.size()) / static_cast<double>(spec.items.size() + extra);
}

/// Every template node becomes a required component with no fixed configuration.
inline std::vector<ComponentEntry> required_from_template(const workflow::Template& t) {
    std::vector<ComponentEntry> out;
    for (const auto& e : t) out.push_back({e.node, {}});
    return out;
}

enum class ProjectableCheck { unique_ids, required_components, required_keys, balanced_delimiters };

inline const char* to_string(ProjectableCheck c) {
    switch (c) {
        case ProjectableCheck::unique_ids: return "unique_ids";
        case ProjectableCheck::required_components: return "required_components";
        case ProjectableCheck::required_keys: return "required_keys";
        case ProjectableCheck::balanced_delimiters: return "balanced_delimiters";
    }
    return "?";
}

inline bool balanced_delimiters(const std::string& text) {
    std::vector<char> stack;
    for (char ch : text) {
        if (ch == '(' || ch == '[' || ch == '{') stack.push_back(ch);
        else if (ch == ')' || ch == ']' || ch == '}') {
            const char open = ch == ')' ? '(' : ch == ']' ? '[' : '{';
            if (stack.empty() || stack.back() != open) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

inline bool passes(ProjectableCheck check, const ProgramArtifact& a, const std::vector<ComponentEntry>& required) {
    switch (check) {
        case ProjectableCheck::unique_ids: return a.has_unique_ids();
        case ProjectableCheck::required_components:
            return std::all_of(required.begin(), required.end(), [&](const auto& r) { return a.find(r.id) != nullptr; });
        case ProjectableCheck::required_keys:
            for (const auto& r : required) {
                for (const auto& e : a.manifest) {
                    if (e.id != r.id) continue;
                    for (const auto& [k, v] : r.config)
                        if (!e.config.count(k)) return false;
                }
            }
            return true;
        case ProjectableCheck::balanced_delimiters: return balanced_delimiters(a.body);
    }
    return false;
}

struct ProjectionResult {
    ProgramArtifact artifact;
    std::vector<std::string> edits;
    std::vector<std::string> unresolved;  // failing checks no rule could repair
};

/// Smallest deterministic manifest edits that make the requested checks pass:
/// surplus duplicates are dropped, absent required components are appended in
/// requirement order, and absent required configuration keys are filled in
/// with the required value. The body is never touched.
inline ProjectionResult project(const ProgramArtifact& artifact, const std::vector<ProjectableCheck>& checks,
                                const std::vector<ComponentEntry>& required) {
    ProjectionResult out{artifact, {}, {}};
    auto wants = [&](ProjectableCheck c) { return std::find(checks.begin(), checks.end(), c) != checks.end(); };
    auto& m = out.artifact.manifest;

    if (wants(ProjectableCheck::unique_ids) && !passes(ProjectableCheck::unique_ids, out.artifact, required)) {
        // Keep the copy that needs the fewest key restorations, earliest on ties.
        auto missing_keys = [&](const ComponentEntry& e) {
            std::size_t n = 0;
            if (!wants(ProjectableCheck::required_keys)) return n;
            for (const auto& r : required)
                if (r.id == e.id)
                    for (const auto& [k, v] : r.config) n += e.config.count(k) == 0;
            return n;
        };
        std::map<std::string, std::size_t> keep;
        for (std::size_t i = 0; i < m.size(); ++i) {
            auto [it, fresh] = keep.emplace(m[i].id, i);
            if (!fresh && missing_keys(m[i]) < missing_keys(m[it->second])) it->second = i;
        }
        std::vector<ComponentEntry> kept;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (keep.at(m[i].id) == i) kept.push_back(std::move(m[i]));
            else out.edits.push_back("drop duplicate '" + m[i].id + "'");
        }
        m = std::move(kept);
    }
    if (wants(ProjectableCheck::required_components) &&
        !passes(ProjectableCheck::required_components, out.artifact, required)) {
        for (const auto& r : required) {
            if (out.artifact.find(r.id)) continue;
            m.push_back(r);
            out.edits.push_back("restore component '" + r.id + "'");
        }
    }
    if (wants(ProjectableCheck::required_keys) && !passes(ProjectableCheck::required_keys, out.artifact, required)) {
        for (const auto& r : required)
            for (auto& e : m) {
                if (e.id != r.id) continue;
                for (const auto& [k, v] : r.config)
                    if (e.config.emplace(k, v).second) out.edits.push_back("restore key '" + k + "' of '" + e.id + "'");
            }
    }
    for (auto c : checks)
        if (!passes(c, out.artifact, required)) out.unresolved.push_back(to_string(c));
    return out;
}

inline io::json to_json(const ProgramArtifact& a) {
    io::json manifest = io::json::array();
    for (const auto& e : a.manifest) manifest.push_back({{"id", e.id}, {"config", e.config}});
    return {{"body", a.body}, {"manifest", manifest}};
}

}  // namespace b2g::tgd
