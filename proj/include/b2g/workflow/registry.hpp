#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "b2g/power/network_io.hpp"
#include "b2g/workflow/dag.hpp"

namespace b2g::workflow {

struct Registry {
    std::vector<FunctionNode> nodes;
    SourceStore sources;
};

inline Registry registry_from_json(const io::json& doc, const std::filesystem::path& base_dir) {
    io::require_keys(doc, {"format", "name", "nodes"}, "registry");
    if (auto f = io::get_or<std::string>(doc, "format", "b2g-registry/1"); f != "b2g-registry/1")
        throw FormatError("registry: unsupported format '" + f + "'");
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw FormatError("registry: 'nodes' must be an array");
    Registry reg;
    for (const auto& jn : doc["nodes"]) {
        io::require_keys(jn, {"id", "inputs", "outputs", "stage", "mandatory", "description", "source"}, "registry node");
        FunctionNode n;
        n.id = io::get_required<std::string>(jn, "id", "registry node");
        n.inputs = io::get_or<std::vector<std::string>>(jn, "inputs", {});
        n.outputs = io::get_or<std::vector<std::string>>(jn, "outputs", {});
        n.stage = io::get_required<std::string>(jn, "stage", "registry node " + n.id);
        n.mandatory = io::get_or<bool>(jn, "mandatory", false);
        n.description = io::get_or<std::string>(jn, "description", "");
        if (jn.contains("source")) {
            const auto path = base_dir / io::get_required<std::string>(jn, "source", "registry node " + n.id);
            reg.sources[n.id] = io::read_text_file(path);
        }
        reg.nodes.push_back(std::move(n));
    }
    return reg;
}

inline Registry load_registry(const std::filesystem::path& path) {
    return registry_from_json(io::parse_json_text(io::read_text_file(path), path.string()), path.parent_path());
}

inline io::json to_json(const ValidationReport& r) {
    io::json missing = io::json::array();
    for (const auto& m : r.missing_dependencies)
        missing.push_back({{"node", m.node}, {"key", m.key}, {"providers", m.providers}, {"preferred", m.preferred}});
    io::json ordering = io::json::array();
    for (const auto& o : r.ordering_violations) ordering.push_back({{"before", o.before}, {"after", o.after}});
    io::json amb = io::json::array();
    for (const auto& a : r.ambiguities) amb.push_back({{"key", a.key}, {"providers", a.providers}});
    return {{"format", "b2g-validation/1"},
            {"empty", r.empty()},
            {"missing_dependencies", missing},
            {"missing_mandatory", r.missing_mandatory},
            {"ordering_violations", ordering},
            {"unknown_nodes", r.unknown_nodes},
            {"duplicate_nodes", r.duplicate_nodes},
            {"ambiguities", amb}};
}

inline io::json to_json(const Template& t) {
    io::json out = io::json::array();
    for (const auto& e : t) out.push_back({{"node", e.node}, {"source", e.source}});
    return out;
}

}  // namespace b2g::workflow
