#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "b2g/tgd/artifact.hpp"

namespace b2g::tgd {

enum class Role { workflow_manager, code_generator, simulation_executor, result_evaluator, feedback_generator };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::workflow_manager: return "workflow_manager";
        case Role::code_generator: return "code_generator";
        case Role::simulation_executor: return "simulation_executor";
        case Role::result_evaluator: return "result_evaluator";
        case Role::feedback_generator: return "feedback_generator";
    }
    return "?";
}

class TgdError : public Error {
public:
    TgdError(int iteration, Role role, const std::string& what)
        : Error("iteration " + std::to_string(iteration) + ", " + to_string(role) + ": " + what),
          iteration(iteration),
          role(role) {}
    int iteration;
    Role role;
};

struct ExecutionResult {
    bool crashed = false;
    std::string log;
    std::map<std::string, double> metrics;
};

struct Constraint {
    std::string id;
    std::string description;
    std::string component;             // manifest id the constraint is about, may be empty
    bool execution_dependent = false;  // read from the execution results
    std::function<double(const ProgramArtifact&, const ExecutionResult&)> evaluator;
};

/// Violation assigned to execution-dependent constraints when the executor crashes.
inline constexpr double kCrashViolation = 1.0;

struct ConstraintValue {
    std::string id;
    double value = 0.0;
    friend bool operator==(const ConstraintValue&, const ConstraintValue&) = default;
};

struct ConstraintReport {
    std::vector<ConstraintValue> values;
    double loss = 0.0;
    bool executor_crashed = false;
    std::string crash_message;

    bool feasible() const { return loss == 0.0; }
    std::vector<std::string> violated() const {
        std::vector<std::string> out;
        for (const auto& v : values)
            if (v.value > 0.0) out.push_back(v.id);
        return out;
    }
};

inline double hinge_loss(const std::vector<ConstraintValue>& values) {
    double sum = 0.0;
    for (const auto& v : values) sum += std::max(0.0, v.value);
    return sum;
}

/// Scores `artifact` against every constraint given the execution results.
/// With `threads` > 1 the constraints are evaluated concurrently; the report
/// keeps constraint order.
inline ConstraintReport evaluate_results(const ProgramArtifact& artifact, const ExecutionResult& results,
                                         const std::vector<Constraint>& constraints, unsigned threads = 1,
                                         const std::string& crash_message = {}) {
    ConstraintReport report;
    report.executor_crashed = results.crashed;
    report.crash_message = crash_message;
    report.values.resize(constraints.size());
    auto one = [&](std::size_t i) {
        const auto& c = constraints[i];
        double v = (results.crashed && c.execution_dependent) ? kCrashViolation : c.evaluator(artifact, results);
        if (std::isnan(v)) throw Error("constraint '" + c.id + "' returned NaN");
        report.values[i] = {c.id, v};
    };
    if (threads <= 1 || constraints.size() < 2) {
        for (std::size_t i = 0; i < constraints.size(); ++i) one(i);
    } else {
        std::vector<std::future<void>> jobs;
        for (std::size_t i = 0; i < constraints.size(); ++i) jobs.push_back(std::async(std::launch::async, one, i));
        for (auto& j : jobs) j.get();
    }
    report.loss = hinge_loss(report.values);
    return report;
}

/// Runs the executor once and evaluates every constraint.
template <class Executor>
ConstraintReport evaluate(const ProgramArtifact& artifact, Executor& executor, const std::vector<Constraint>& constraints,
                          ExecutionResult* results_out = nullptr, unsigned threads = 1) {
    ExecutionResult results;
    std::string crash;
    try {
        results = executor.run(artifact);
    } catch (const std::exception& e) {
        results = {};
        results.crashed = true;
        crash = e.what();
    }
    auto report = evaluate_results(artifact, results, constraints, threads, crash);
    if (results_out) *results_out = std::move(results);
    return report;
}

struct TextualGradient {
    std::vector<std::string> violated;
    std::vector<std::string> components;
    std::vector<std::string> directives;
    int iteration = 0;
    bool empty() const { return violated.empty(); }
};

/// Turns violations into one directive per violated constraint, largest
/// violation first and constraint order among ties.
class RuleFeedback {
public:
    explicit RuleFeedback(std::vector<Constraint> constraints) : constraints_(std::move(constraints)) {}

    TextualGradient generate(const ProgramArtifact&, const ConstraintReport& report, const ExecutionResult& results,
                             int iteration) const {
        TextualGradient g;
        g.iteration = iteration;
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < report.values.size(); ++i)
            if (report.values[i].value > 0.0) order.push_back(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return report.values[a].value > report.values[b].value; });
        for (auto i : order) {
            const auto& c = constraints_.at(i);
            g.violated.push_back(c.id);
            if (!c.component.empty() &&
                std::find(g.components.begin(), g.components.end(), c.component) == g.components.end())
                g.components.push_back(c.component);
            std::string d = "repair " + c.id;
            if (!c.component.empty()) d += " in " + c.component;
            if (!c.description.empty()) d += ": " + c.description;
            if (results.crashed && c.execution_dependent) d += " (executor crashed)";
            g.directives.push_back(std::move(d));
        }
        return g;
    }

private:
    std::vector<Constraint> constraints_;
};

/// Projection step used between patch and the next evaluation.
struct ManifestProjector {
    std::vector<ProjectableCheck> checks;
    std::vector<ComponentEntry> required;

    ProgramArtifact project(const ProgramArtifact& a) const { return tgd::project(a, checks, required).artifact; }
};

struct ConvergenceScores {
    double code_quality = 0.0;
    double model_accuracy = 0.0;
    double overall = 0.0;
};

struct AgentAdjustment {
    std::string role;
    std::string adjustment;
};

struct DecisionLogEntry {
    int iteration = 0;
    double loss = 0.0;
    std::string iteration_reason;
    ConvergenceScores convergence;
    std::vector<std::string> next_iteration_focus;
    std::vector<AgentAdjustment> agent_adjustments;
};

using DecisionLog = std::vector<DecisionLogEntry>;

/// Linear rubric: code quality is the satisfied share of static constraints,
/// model accuracy the satisfied share of execution-dependent ones (zero after
/// a crash), overall the satisfied share of all constraints. A group with no
/// constraints scores 1.
inline ConvergenceScores score_report(const ConstraintReport& report, const std::vector<Constraint>& constraints) {
    std::size_t st = 0, st_ok = 0, ex = 0, ex_ok = 0;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const bool ok = report.values[i].value <= 0.0;
        if (constraints[i].execution_dependent) {
            ++ex;
            ex_ok += ok;
        } else {
            ++st;
            st_ok += ok;
        }
    }
    auto share = [](std::size_t ok, std::size_t n) { return n == 0 ? 1.0 : static_cast<double>(ok) / n; };
    ConvergenceScores s;
    s.code_quality = share(st_ok, st);
    s.model_accuracy = report.executor_crashed ? 0.0 : share(ex_ok, ex);
    s.overall = share(st_ok + ex_ok, st + ex);
    return s;
}

struct TgdResult {
    ProgramArtifact artifact;  // the feasible artifact, or the lowest-loss one seen
    DecisionLog log;
    bool converged = false;
    int refinement_rounds = 0;  // patch steps performed
    int best_iteration = 0;
    std::vector<double> loss_history;
};

/// Generate, then alternate evaluate / feedback / patch / project until the
/// hinge loss is exactly zero or `max_rounds` evaluations have run.
///
/// generator: generate(task, template) and patch(artifact, gradient)
/// executor:  run(artifact) -> ExecutionResult
/// feedback:  generate(artifact, report, results, iteration) -> TextualGradient
/// projector: project(artifact) -> ProgramArtifact
template <class Task, class Generator, class Executor, class Feedback, class Projector>
TgdResult run_tgd(const Task& task, const workflow::Template& tmpl, Generator& generator, Executor& executor,
                  const std::vector<Constraint>& constraints, Feedback& feedback, const Projector& projector,
                  int max_rounds) {
    if (max_rounds < 1) throw ModelError("max_rounds must be >= 1");
    TgdResult out;
    ProgramArtifact x;
    try {
        x = generator.generate(task, tmpl);
    } catch (const std::exception& e) {
        throw TgdError(0, Role::code_generator, e.what());
    }

    double best_loss = std::numeric_limits<double>::infinity();
    std::string reason = "initial program generated from the template";
    for (int t = 0; t < max_rounds; ++t) {
        ExecutionResult results;
        ConstraintReport report;
        try {
            report = evaluate(x, executor, constraints, &results);
        } catch (const std::exception& e) {
            throw TgdError(t, Role::result_evaluator, e.what());
        }
        out.loss_history.push_back(report.loss);
        if (report.loss < best_loss) {
            best_loss = report.loss;
            out.artifact = x;
            out.best_iteration = t;
        }

        DecisionLogEntry entry;
        entry.iteration = t;
        entry.loss = report.loss;
        entry.iteration_reason = reason;
        entry.convergence = score_report(report, constraints);
        if (report.executor_crashed)
            entry.agent_adjustments.push_back({to_string(Role::simulation_executor), "executor crashed: " + report.crash_message});

        if (report.feasible()) {
            entry.agent_adjustments.push_back({to_string(Role::workflow_manager), "terminate: all constraints satisfied"});
            out.log.push_back(std::move(entry));
            out.artifact = x;
            out.best_iteration = t;
            out.converged = true;
            return out;
        }

        TextualGradient g;
        try {
            g = feedback.generate(x, report, results, t);
        } catch (const std::exception& e) {
            throw TgdError(t, Role::feedback_generator, e.what());
        }
        entry.next_iteration_focus = g.directives;
        const bool last = t + 1 == max_rounds;
        if (last) {
            entry.agent_adjustments.push_back({to_string(Role::workflow_manager), "stop: round limit reached"});
            out.log.push_back(std::move(entry));
            break;
        }
        for (const auto& c : g.components)
            entry.agent_adjustments.push_back({to_string(Role::code_generator), "patch component " + c});
        entry.agent_adjustments.push_back({to_string(Role::code_generator), "project onto manifest checks"});
        out.log.push_back(std::move(entry));

        try {
            x = projector.project(generator.patch(x, g));
        } catch (const std::exception& e) {
            throw TgdError(t, Role::code_generator, e.what());
        }
        ++out.refinement_rounds;
        reason.clear();
        for (std::size_t i = 0; i < g.violated.size(); ++i) reason += (i ? ", " : "violated: ") + g.violated[i];
    }
    return out;
}

inline io::json to_json(const DecisionLog& log) {
    io::json out = io::json::array();
    for (const auto& e : log) {
        io::json adj = io::json::array();
        for (const auto& a : e.agent_adjustments) adj.push_back({{"role", a.role}, {"adjustment", a.adjustment}});
        out.push_back({{"iteration", e.iteration},
                       {"loss", e.loss},
                       {"iteration_reason", e.iteration_reason},
                       {"convergence_assessment",
                        {{"code_quality", e.convergence.code_quality},
                         {"model_accuracy", e.convergence.model_accuracy},
                         {"overall", e.convergence.overall}}},
                       {"next_iteration_focus", e.next_iteration_focus},
                       {"agent_adjustments", adj}});
    }
    return {{"format", "b2g-decision-log/1"}, {"entries", out}};
}

}  // namespace b2g::tgd
