#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "b2g/tgd/orchestrator.hpp"

namespace b2g::tgd {

struct FaultScript {
    std::uint64_t seed = 1;
    int faults = 3;
    bool unrepairable = false;  // plant one extra fault that patches never remove
    int components = 8;         // used when the template is empty
    bool crash_first_run = false;
};

/// Deterministic stand-in for the generator and executor roles. It plants
/// seeded faults in the manifest, and each patch removes the fault named by
/// the first directive it can act on. The stub keeps its own ledger of what it
/// planted and repaired.
class FaultScenario {
public:
    FaultScenario(const workflow::Template& tmpl, FaultScript script) : script_(script) {
        for (const auto& e : tmpl) ids_.push_back(e.node);
        for (int i = static_cast<int>(ids_.size()); i < script.components; ++i) ids_.push_back("c" + std::to_string(i));
        const int planted = script.faults + (script.unrepairable ? 1 : 0);
        if (script.faults < 0 || planted > static_cast<int>(ids_.size()))
            throw ModelError("fault count exceeds the number of components");

        std::mt19937_64 rng(script.seed);
        std::uniform_real_distribution<double> mag(0.1, 1.0);
        for (std::size_t i = 0; i < ids_.size(); ++i) magnitude_.push_back(mag(rng));
        std::vector<std::size_t> order(ids_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        for (int i = 0; i < script.faults; ++i) planted_.push_back(ids_[order[i]]);
        if (script.unrepairable) stuck_ = ids_[order[script.faults]];
    }

    const std::vector<std::string>& planted() const { return planted_; }
    const std::string& stuck() const { return stuck_; }
    const std::vector<std::string>& repaired() const { return repaired_; }
    int patch_calls() const { return patch_calls_; }
    int runs() const { return runs_; }

    std::vector<Constraint> constraints() const {
        std::vector<Constraint> out;
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            const std::string id = ids_[i];
            const double m = magnitude_[i];
            out.push_back({"component_ok:" + id, "component reports status ok", id, false,
                           [id, m](const ProgramArtifact& a, const ExecutionResult&) {
                               const auto* e = a.find(id);
                               if (!e) return 1.0;
                               auto it = e->config.find("status");
                               return it != e->config.end() && it->second == "ok" ? -m : m;
                           }});
        }
        out.push_back({"trial_run", "minimal trial run completes", "", true,
                       [](const ProgramArtifact&, const ExecutionResult& r) {
                           auto it = r.metrics.find("completed");
                           return it != r.metrics.end() && it->second == 1.0 ? -1.0 : 1.0;
                       }});
        return out;
    }

    template <class Task>
    ProgramArtifact generate(const Task&, const workflow::Template&) {
        ProgramArtifact a;
        for (const auto& id : ids_) {
            std::string status = "ok";
            if (std::find(planted_.begin(), planted_.end(), id) != planted_.end()) status = "fault";
            if (id == stuck_) status = "stuck";
            a.manifest.push_back({id, {{"status", status}, {"version", "1"}}});
            a.body += "run(" + id + ");\n";
        }
        return a;
    }

    ProgramArtifact patch(const ProgramArtifact& x, const TextualGradient& g) {
        ++patch_calls_;
        ProgramArtifact out = x;
        for (const auto& c : g.components) {
            for (auto& e : out.manifest) {
                if (e.id != c || e.config["status"] != "fault") continue;
                e.config["status"] = "ok";
                e.config["version"] = std::to_string(std::stoi(e.config["version"]) + 1);
                repaired_.push_back(c);
                return out;
            }
        }
        return out;
    }

    ExecutionResult run(const ProgramArtifact& a) {
        ++runs_;
        if (script_.crash_first_run && runs_ == 1) throw Error("segmentation fault in trial run");
        ExecutionResult r;
        r.metrics["completed"] = 1.0;
        r.metrics["components"] = static_cast<double>(a.manifest.size());
        r.log = "ran " + std::to_string(a.manifest.size()) + " components";
        return r;
    }

private:
    FaultScript script_;
    std::vector<std::string> ids_;
    std::vector<double> magnitude_;
    std::vector<std::string> planted_;
    std::string stuck_;
    std::vector<std::string> repaired_;
    int patch_calls_ = 0;
    int runs_ = 0;
};

}  // namespace b2g::tgd
