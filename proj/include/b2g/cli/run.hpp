#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "b2g/cli/outputs.hpp"
#include "b2g/cli/task_spec.hpp"

namespace b2g::cli {

/// Scenario objects built once per run.
struct Scenario {
    power::PowerNetwork network;
    building::Fleet fleet;
    cosim::SimulationConfig config;

    cosim::CosimEnvironment environment() const { return {network, fleet, config}; }

    std::vector<std::string> building_ids() const {
        std::vector<std::string> out;
        for (const auto& b : fleet.buildings) out.push_back(b.id);
        return out;
    }
};

inline Scenario build_scenario(const TaskSpec& spec) {
    Scenario s;
    s.network = build_network(spec);
    s.fleet = build_fleet(spec, s.network);
    s.config = spec.simulation_config();
    s.config.validate(s.network.bus_count());
    building::validate_fleet(s.fleet, s.network, s.config.horizon_steps);
    return s;
}

struct TrainedPolicy {
    policy::ControlMode mode = policy::ControlMode::decentralized;
    policy::TrainingResult result;
};

inline std::vector<TrainedPolicy> train_policies(const TaskSpec& spec, const Scenario& scenario) {
    std::vector<TrainedPolicy> out;
    for (auto mode : spec.control.modes) {
        auto make = [&](std::uint64_t) { return scenario.environment(); };
        out.push_back({mode, policy::train(make, spec.trainer_config(mode))});
    }
    return out;
}

inline std::string training_csv(const policy::TrainingResult& r) {
    std::string out = "iteration,elite_mean_score\n";
    for (std::size_t i = 0; i < r.elite_mean_history.size(); ++i)
        out += fmt::format("{},{}\n", i, num(r.elite_mean_history[i]));
    return out;
}

/// A labelled evaluation episode.
struct EpisodeRun {
    std::string label;
    cosim::EpisodeTrace trace;
};

/// A converged operating point picked out of an episode for grid analysis.
struct Snapshot {
    std::string name;
    std::size_t step = 0;
    power::BusLoads loads;
};

/// The step with the largest |V - v_ref| on any bus and the step with the
/// largest aggregate active load. Diverged steps are skipped.
inline std::vector<Snapshot> select_snapshots(const cosim::EpisodeTrace& trace, const Scenario& scenario) {
    std::size_t worst = 0, peak = 0;
    double worst_dev = -1.0, peak_p = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t t = 0; t < trace.records.size(); ++t) {
        const auto& r = trace.records[t];
        if (r.diverged) continue;
        any = true;
        double dev = 0.0;
        for (double v : r.bus_voltages) dev = std::max(dev, std::abs(v - scenario.config.v_ref));
        if (dev > worst_dev) worst_dev = dev, worst = t;
        if (r.total_p_mw > peak_p) peak_p = r.total_p_mw, peak = t;
    }
    if (!any) throw Error("no converged step to analyse");
    auto loads_at = [&](std::size_t t) {
        return building::aggregate_bus_loads(scenario.fleet, trace.records[t].net_loads_kw, scenario.network);
    };
    return {{"worst_voltage", worst, loads_at(worst)}, {"peak_load", peak, loads_at(peak)}};
}

/// Screening, N-1 and short-circuit outputs for one operating point.
inline std::vector<fs::path> analyse_snapshot(const TaskSpec& spec, const Scenario& scenario, const power::BusLoads& loads,
                                              const fs::path& dir) {
    std::vector<fs::path> files;
    const auto& limits = scenario.config.limits;
    if (spec.analyses.screening) {
        const auto pf = power::solve_power_flow(scenario.network, loads, scenario.config.power_flow);
        if (!pf.converged) throw Error("snapshot power flow did not converge");
        write_text_file(dir / "screening.csv", screening_csv(pf, scenario.network, limits));
        files.push_back(dir / "screening.csv");
    }
    if (spec.analyses.n_minus_1) {
        const auto report = grid::n_minus_1(scenario.network, loads, limits, {scenario.config.power_flow, 0});
        write_text_file(dir / "contingency.csv", contingency_csv(report));
        files.push_back(dir / "contingency.csv");
    }
    if (!spec.analyses.short_circuit_buses.empty()) {
        write_text_file(dir / "short_circuit.csv", short_circuit_csv(scenario.network, spec.analyses.short_circuit_buses));
        files.push_back(dir / "short_circuit.csv");
    }
    return files;
}

/// Everything a run produced, for callers that want more than the manifest.
struct RunOutcome {
    RunManifest manifest;
    std::vector<TrainedPolicy> trained;
    std::vector<EpisodeRun> episodes;
    std::string kpi_table;
};

/// Stages in order: scenario, train (when requested), episodes (when any run
/// is requested), analyses, report. Each stage writes its own files, so a
/// failure keeps everything produced so far; the manifest is written in
/// every case and names the failing stage.
inline RunOutcome run(const TaskSpec& spec, std::ostream* summary = nullptr) {
    RunOutcome out;
    auto& m = out.manifest;
    m.name = spec.name;
    m.seed = spec.seed;
    m.config = task_spec_to_json(spec);
    const fs::path dir = spec.outputs.dir;
    std::vector<fs::path> files;
    std::string stage;

    try {
        stage = "scenario";
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw FormatError("cannot create output directory " + dir.string() + ": " + ec.message());
        const auto scenario = build_scenario(spec);
        m.stages_completed.push_back(stage);

        std::vector<std::pair<std::string, policy::PolicyParams>> policies;
        if (spec.control.kind == ControlKind::train) {
            stage = "train";
            out.trained = train_policies(spec, scenario);
            for (const auto& t : out.trained) {
                const std::string mode = policy::to_string(t.mode);
                policy::save_params(t.result.best, dir / ("policy_" + mode + ".json"));
                write_text_file(dir / ("training_" + mode + ".csv"), training_csv(t.result));
                files.push_back(dir / ("policy_" + mode + ".json"));
                files.push_back(dir / ("training_" + mode + ".csv"));
                policies.emplace_back("trained_" + mode, t.result.best);
            }
            m.stages_completed.push_back(stage);
        } else if (spec.control.kind == ControlKind::droop) {
            auto params = policy::load_params(spec.resolve(spec.control.params_file));
            for (auto mode : spec.control.modes) {
                params.mode = mode;
                policies.emplace_back(std::string("droop_") + policy::to_string(mode), params);
            }
        }

        if (spec.runs_episodes()) {
            stage = "episodes";
            const PlotOptions plot{spec.outputs.svg(), spec.analyses.histograms, spec.scenario.dt_hours,
                                   spec.scenario.start_hour};
            auto env = scenario.environment();
            auto record = [&](std::string label, cosim::EpisodeTrace trace) {
                const fs::path rd = dir / label;
                if (spec.outputs.csv())
                    for (auto& f : write_trace_csv(trace, scenario.network, scenario.building_ids(), rd)) files.push_back(f);
                for (auto& f : emit_plots(trace, rd, plot)) files.push_back(f);
                out.episodes.push_back({std::move(label), std::move(trace)});
            };
            if (spec.control.baseline) record("baseline", cosim::run_episode(env, policy::NoControlPolicy{}));
            for (const auto& [label, params] : policies) record(label, cosim::run_episode(env, policy::DroopPolicy{params}));
            m.stages_completed.push_back(stage);
        }

        if (spec.analyses.screening || spec.analyses.n_minus_1 || !spec.analyses.short_circuit_buses.empty()) {
            stage = "analyses";
            if (out.episodes.empty()) {
                for (auto& f : analyse_snapshot(spec, scenario, scenario.network.nominal_bus_loads(), dir / "nominal"))
                    files.push_back(f);
            }
            for (const auto& ep : out.episodes) {
                const auto snaps = select_snapshots(ep.trace, scenario);
                std::string index = "snapshot,step,total_p_mw\n";
                for (const auto& s : snaps) {
                    index += fmt::format("{},{},{}\n", s.name, s.step, num(ep.trace.records[s.step].total_p_mw));
                    for (auto& f : analyse_snapshot(spec, scenario, s.loads, dir / ep.label / s.name)) files.push_back(f);
                }
                write_text_file(dir / ep.label / "snapshots.csv", index);
                files.push_back(dir / ep.label / "snapshots.csv");
            }
            m.stages_completed.push_back(stage);
        }

        stage = "report";
        if (!out.episodes.empty()) {
            std::vector<std::pair<std::string, cosim::EpisodeKpis>> kpis;
            std::vector<std::pair<std::string, const cosim::EpisodeTrace*>> traces;
            for (const auto& ep : out.episodes) {
                kpis.emplace_back(ep.label, ep.trace.kpis);
                traces.emplace_back(ep.label, &ep.trace);
            }
            write_text_file(dir / "kpi_comparison.csv", kpi_comparison_csv(kpis));
            files.push_back(dir / "kpi_comparison.csv");
            if (out.episodes.size() > 1) {
                const PlotOptions plot{spec.outputs.svg(), false, spec.scenario.dt_hours, spec.scenario.start_hour};
                write_text_file(dir / "mean_voltage_comparison.csv", mean_voltage_csv(traces));
                files.push_back(dir / "mean_voltage_comparison.csv");
                if (plot.svg) {
                    write_text_file(dir / "mean_voltage_comparison.svg", mean_voltage_svg(traces, plot));
                    files.push_back(dir / "mean_voltage_comparison.svg");
                }
            }
            out.kpi_table = kpi_table(kpis);
            if (summary) *summary << out.kpi_table;
        }
        m.stages_completed.push_back(stage);
        write_manifest(m, files, dir);
    } catch (const std::exception& e) {
        m.failed_stage = stage;
        m.error = e.what();
        try {
            std::vector<fs::path> present;
            for (const auto& f : files)
                if (fs::exists(f)) present.push_back(f);
            write_manifest(m, present, dir);
        } catch (const std::exception&) {
        }
    }
    return out;
}

/// Trains one policy per requested mode and writes the parameter files.
inline RunOutcome train_only(const TaskSpec& spec) {
    RunOutcome out;
    auto& m = out.manifest;
    m.name = spec.name;
    m.seed = spec.seed;
    m.config = task_spec_to_json(spec);
    const fs::path dir = spec.outputs.dir;
    std::vector<fs::path> files;
    std::string stage = "scenario";
    try {
        if (spec.control.kind != ControlKind::train) throw ModelError("spec does not request training (control.policy)");
        fs::create_directories(dir);
        const auto scenario = build_scenario(spec);
        m.stages_completed.push_back(stage);
        stage = "train";
        out.trained = train_policies(spec, scenario);
        for (const auto& t : out.trained) {
            const std::string mode = policy::to_string(t.mode);
            policy::save_params(t.result.best, dir / ("policy_" + mode + ".json"));
            write_text_file(dir / ("training_" + mode + ".csv"), training_csv(t.result));
            files.push_back(dir / ("policy_" + mode + ".json"));
            files.push_back(dir / ("training_" + mode + ".csv"));
        }
        m.stages_completed.push_back(stage);
        write_manifest(m, files, dir);
    } catch (const std::exception& e) {
        m.failed_stage = stage;
        m.error = e.what();
        try {
            write_manifest(m, files, dir);
        } catch (const std::exception&) {
        }
    }
    return out;
}

}  // namespace b2g::cli
