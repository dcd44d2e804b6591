#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "b2g/cli/run.hpp"
#include "support/xml_check.hpp"

using namespace b2g;
using namespace b2g::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSpecs = fs::path(B2G_DATA_DIR) / "specs";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("b2g_cli_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(io::read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

std::string first_line(const fs::path& path) {
    const auto text = io::read_text_file(path);
    return text.substr(0, text.find('\n'));
}

TaskSpec parse(const std::string& text, const fs::path& base = kSpecs) {
    return task_spec_from_json(io::json::parse(text), base);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

// ---------------------------------------------------------------- task spec

TEST(TaskSpec, MinimalSpecMaterializesDefaults) {
    const auto spec = load_task_spec(kSpecs / "minimal.json");
    EXPECT_EQ(spec.scenario.network, "ieee33");
    EXPECT_EQ(spec.scenario.fleet_preset, "high_pv");
    EXPECT_EQ(spec.scenario.buildings_per_bus, 12);
    EXPECT_EQ(spec.control.kind, ControlKind::none);
    EXPECT_FALSE(spec.runs_episodes());
    EXPECT_TRUE(spec.analyses.screening);
    EXPECT_FALSE(spec.analyses.n_minus_1);
    const auto limits = spec.simulation_config().limits;
    EXPECT_DOUBLE_EQ(limits.v_min, 0.95);
    EXPECT_DOUBLE_EQ(limits.v_max, 1.05);
    EXPECT_DOUBLE_EQ(limits.loading_threshold, 1.0);

    const auto snap = task_spec_to_json(spec);
    EXPECT_EQ(snap["scenario"]["simulation"]["horizon_steps"], 72);
    EXPECT_EQ(snap["scenario"]["fleet"]["seed"], 7);
    EXPECT_EQ(snap["control"]["policy"], "none");
    EXPECT_FALSE(snap["outputs"].contains("dir"));
    // the snapshot parses back to the same snapshot
    auto again = snap;
    EXPECT_EQ(task_spec_to_json(task_spec_from_json(again, kSpecs)), snap);
}

TEST(TaskSpec, ToleranceAndLoadingThresholdGiveSecurityLimits) {
    const auto spec = parse(R"({"format": "b2g-task/1",
        "scenario": {"simulation": {"tolerance_pu": 0.05, "loading_threshold": 0.7}},
        "analyses": {"screening": true}})");
    const auto limits = spec.simulation_config().limits;
    EXPECT_DOUBLE_EQ(limits.v_min, 0.95);
    EXPECT_DOUBLE_EQ(limits.v_max, 1.05);
    EXPECT_DOUBLE_EQ(limits.loading_threshold, 0.70);
}

TEST(TaskSpec, ShuntIsMergedIntoTheNetwork) {
    const auto spec = load_task_spec(kSpecs / "complex_task.json");
    const auto net = build_network(spec);
    const auto it = std::find_if(net.shunts.begin(), net.shunts.end(), [](const auto& s) { return s.bus == 14; });
    ASSERT_NE(it, net.shunts.end());
    EXPECT_DOUBLE_EQ(it->q_mvar, -1.2);
    EXPECT_DOUBLE_EQ(spec.scenario.tolerance_pu, 0.05);
    EXPECT_DOUBLE_EQ(spec.scenario.loading_threshold, 0.7);
    EXPECT_EQ(spec.scenario.buildings_per_bus, 24);

    // a second shunt at the same bus replaces the first
    auto twice = parse(R"({"format": "b2g-task/1",
        "scenario": {"shunts": [{"bus": 14, "q_mvar": -1.2}, {"bus": 14, "q_mvar": -0.4}]},
        "analyses": {"screening": true}})");
    const auto net2 = build_network(twice);
    EXPECT_EQ(std::count_if(net2.shunts.begin(), net2.shunts.end(), [](const auto& s) { return s.bus == 14; }), 1);
    EXPECT_DOUBLE_EQ(net2.shunts.back().q_mvar, -0.4);
}

TEST(TaskSpec, UnknownKeysAreNamed) {
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "analyses": {"screening": true}, "colour": 1})").find("colour"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "analyses": {"screening": true, "n_minus_2": true}})").find("n_minus_2"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "analyses": {"screening": true},
                            "scenario": {"simulation": {"tolerence_pu": 0.05}}})")
                  .find("tolerence_pu"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "control": {"policy": "train", "trainer": {"sigma": 1}}})").find("sigma"),
              std::string::npos);
}

TEST(TaskSpec, MissingReferencedFilesAreNamed) {
    const auto net_err = error_of(R"({"format": "b2g-task/1", "scenario": {"network": "nowhere/feeder.json"},
                                       "analyses": {"screening": true}})");
    EXPECT_NE(net_err.find("nowhere/feeder.json"), std::string::npos) << net_err;
    const auto fleet_err = error_of(R"({"format": "b2g-task/1", "scenario": {"fleet": {"file": "no_fleet.json"}},
                                         "analyses": {"screening": true}})");
    EXPECT_NE(fleet_err.find("no_fleet.json"), std::string::npos) << fleet_err;
    const auto params_err = error_of(R"({"format": "b2g-task/1", "control": {"policy": "droop", "params_file": "p.json"}})");
    EXPECT_NE(params_err.find("p.json"), std::string::npos) << params_err;
    EXPECT_THROW(load_task_spec(kSpecs / "does_not_exist.json"), FormatError);
}

TEST(TaskSpec, RejectsInconsistentRequests) {
    EXPECT_NE(error_of(R"({"format": "b2g-task/1"})"), "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/2", "analyses": {"screening": true}})"), "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "control": {"policy": "none", "trainer": {}}})"), "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "control": {"policy": "train", "modes": []}})"), "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "control": {"policy": "train", "modes": ["central"]}})"), "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "control": {"policy": "train",
                            "modes": ["centralized", "centralized"]}})"),
              "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "seed": -3, "analyses": {"screening": true}})"), "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "analyses": {"screening": true},
                            "outputs": {"format": "png"}})"),
              "");
    EXPECT_NE(error_of(R"({"format": "b2g-task/1", "analyses": {"screening": true},
                            "scenario": {"simulation": {"loading_threshold": 0}}})"),
              "");
    // a baseline episode alone is a valid request
    EXPECT_EQ(error_of(R"({"format": "b2g-task/1", "control": {"baseline": true}})"), "");
}

TEST(TaskSpec, ShippedSpecsParse) {
    for (const auto* name : {"minimal.json", "high_pv.json", "low_pv.json", "complex_task.json", "droop.json"})
        EXPECT_NO_THROW(load_task_spec(kSpecs / name)) << name;
    const auto complex = load_task_spec(kSpecs / "complex_task.json");
    ASSERT_EQ(complex.control.modes.size(), 2u);
    EXPECT_EQ(complex.control.modes[0], policy::ControlMode::centralized);
    EXPECT_EQ(complex.control.modes[1], policy::ControlMode::decentralized);
    EXPECT_FALSE(complex.task_description.empty());
}

// ---------------------------------------------------------------- checksums

TEST(Manifest, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Manifest, ChecksumsRoundTripAndDetectTampering) {
    const auto dir = scratch("roundtrip");
    write_text_file(dir / "a.csv", "x\n1\n");
    write_text_file(dir / "sub" / "b.csv", "y\n2\n");
    RunManifest m;
    m.name = "t";
    m.seed = 3;
    write_manifest(m, {dir / "sub" / "b.csv", dir / "a.csv"}, dir);
    ASSERT_EQ(m.files.size(), 2u);
    EXPECT_EQ(m.files[0].path, "a.csv");
    EXPECT_EQ(m.files[1].path, "sub/b.csv");
    EXPECT_EQ(m.files[0].sha256, sha256_hex("x\n1\n"));
    EXPECT_TRUE(verify_manifest(dir).empty());

    const auto back = manifest_from_json(io::parse_json_text(io::read_text_file(dir / "manifest.json"), "m"));
    EXPECT_EQ(back.name, "t");
    EXPECT_EQ(back.seed, 3u);
    EXPECT_EQ(back.files.size(), 2u);

    write_text_file(dir / "sub" / "b.csv", "y\n3\n");
    EXPECT_EQ(verify_manifest(dir), std::vector<std::string>{"sub/b.csv"});
    fs::remove(dir / "a.csv");
    EXPECT_EQ(verify_manifest(dir).size(), 2u);
}

// ---------------------------------------------------------------- run

TEST(Run, ScreeningOnlySpecListsExactlyTheScreeningCsv) {
    auto spec = load_task_spec(kSpecs / "minimal.json");
    spec.outputs.dir = scratch("minimal").string();
    const auto out = run(spec);
    ASSERT_TRUE(out.manifest.ok()) << out.manifest.error;
    ASSERT_EQ(out.manifest.files.size(), 1u);
    EXPECT_EQ(out.manifest.files[0].path, "nominal/screening.csv");
    EXPECT_EQ((std::vector<std::string>{"scenario", "analyses", "report"}), out.manifest.stages_completed);
    EXPECT_TRUE(verify_manifest(spec.outputs.dir).empty());

    // rows agree with a direct screening of the nominal operating point
    const auto net = build_network(spec);
    const auto pf = power::solve_power_flow(net, net.nominal_bus_loads());
    const auto report = grid::screen(pf, net, spec.simulation_config().limits);
    const auto rows = read_csv(fs::path(spec.outputs.dir) / "nominal" / "screening.csv");
    ASSERT_EQ(rows.size(), 1 + net.bus_count() + net.lines.size());
    std::size_t flagged = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) flagged += rows[r].at(3) == "true";
    EXPECT_EQ(flagged, report.voltage_violations.size() + report.loading_violations.size());
    for (std::size_t i = 0; i < net.bus_count(); ++i) EXPECT_EQ(std::stod(rows[1 + i][1]), pf.vm(i));
}

TEST(Run, CsvHeadersAreExact) {
    auto spec = load_task_spec(kSpecs / "droop.json");
    spec.analyses.n_minus_1 = true;
    spec.analyses.histograms = true;
    spec.outputs.dir = scratch("headers").string();
    const auto out = run(spec);
    ASSERT_TRUE(out.manifest.ok()) << out.manifest.error;
    const fs::path d = fs::path(spec.outputs.dir) / "baseline";
    const auto net = build_network(spec);

    std::string buses = "step", lines = "step";
    for (const auto& b : net.buses) buses += ",bus_" + std::to_string(b.id);
    for (const auto& l : net.lines) lines += ",line_" + std::to_string(l.id);
    EXPECT_EQ(first_line(d / "voltages.csv"), buses);
    EXPECT_EQ(first_line(d / "line_loading.csv"), lines);
    EXPECT_EQ(read_csv(d / "net_load.csv").at(0).at(0), "step");
    EXPECT_EQ(read_csv(d / "net_load.csv").at(0).size(), 1 + build_fleet(spec, net).buildings.size());
    EXPECT_EQ(first_line(d / "kpi_summary.csv"), "key,value");
    EXPECT_EQ(first_line(d / "worst_voltage" / "screening.csv"), "entity_id,metric_value,limit,violated");
    EXPECT_EQ(first_line(d / "peak_load" / "contingency.csv"), "line_id,classification,cause");
    EXPECT_EQ(first_line(d / "peak_load" / "short_circuit.csv"), "bus_id,u_nom_kv,r_th_ohm,x_th_ohm,z_th_ohm,i_sc_ka");
    EXPECT_EQ(first_line(d / "snapshots.csv"), "snapshot,step,total_p_mw");
    EXPECT_EQ(first_line(d / "voltage_histogram.csv"), "bin_lower,bin_upper,count");
    EXPECT_EQ(first_line(d / "net_load_histograms.csv"), "bin_lower,bin_upper,over_voltage,under_voltage,nominal");
    EXPECT_EQ(first_line(fs::path(spec.outputs.dir) / "kpi_comparison.csv"), "key,baseline,droop_decentralized");
    EXPECT_EQ(read_csv(d / "voltages.csv").size(), 1 + spec.scenario.horizon_steps);
    // format csv: no vector graphics at all
    for (const auto& f : out.manifest.files) EXPECT_FALSE(f.path.ends_with(".svg")) << f.path;
}

TEST(Run, SnapshotsAreTheWorstVoltageAndPeakLoadSteps) {
    auto spec = load_task_spec(kSpecs / "droop.json");
    spec.outputs.dir = scratch("snapshots").string();
    const auto out = run(spec);
    ASSERT_TRUE(out.manifest.ok()) << out.manifest.error;
    for (const auto& ep : out.episodes) {
        std::size_t worst = 0, peak = 0;
        double wd = -1, pp = -1e300;
        for (std::size_t t = 0; t < ep.trace.records.size(); ++t) {
            const auto& r = ep.trace.records[t];
            for (double v : r.bus_voltages)
                if (std::abs(v - 1.0) > wd) wd = std::abs(v - 1.0), worst = t;
            if (r.total_p_mw > pp) pp = r.total_p_mw, peak = t;
        }
        const auto rows = read_csv(fs::path(spec.outputs.dir) / ep.label / "snapshots.csv");
        EXPECT_EQ(rows.at(1).at(1), std::to_string(worst)) << ep.label;
        EXPECT_EQ(rows.at(2).at(1), std::to_string(peak)) << ep.label;
    }
}

TEST(Run, SameSpecAndSeedGiveIdenticalChecksums) {
    auto spec = load_task_spec(kSpecs / "complex_task.json");
    spec.scenario.horizon_steps = 24;
    spec.control.trainer.iterations = 2;
    spec.control.trainer.population_size = 6;
    spec.outputs.dir = scratch("det_a").string();
    const auto a = run(spec);
    spec.outputs.dir = scratch("det_b").string();
    const auto b = run(spec);
    ASSERT_TRUE(a.manifest.ok()) << a.manifest.error;
    ASSERT_EQ(a.manifest.files.size(), b.manifest.files.size());
    for (std::size_t i = 0; i < a.manifest.files.size(); ++i) {
        EXPECT_EQ(a.manifest.files[i].path, b.manifest.files[i].path);
        EXPECT_EQ(a.manifest.files[i].sha256, b.manifest.files[i].sha256) << a.manifest.files[i].path;
    }
    EXPECT_EQ(io::read_text_file(fs::path(spec.outputs.dir) / "manifest.json"), manifest_to_json(b.manifest).dump(2) + "\n");

    spec.seed += 1;
    spec.outputs.dir = scratch("det_c").string();
    const auto c = run(spec);
    EXPECT_NE(c.manifest.files.front().sha256 + c.manifest.files.back().sha256,
              a.manifest.files.front().sha256 + a.manifest.files.back().sha256);
}

TEST(Run, StageFailureIsRecordedAndPartialOutputsKept) {
    auto spec = load_task_spec(kSpecs / "droop.json");
    spec.analyses.short_circuit_buses = {999};
    spec.outputs.dir = scratch("failure").string();
    const auto out = run(spec);
    EXPECT_FALSE(out.manifest.ok());
    EXPECT_EQ(out.manifest.failed_stage, "analyses");
    EXPECT_NE(out.manifest.error.find("999"), std::string::npos) << out.manifest.error;
    EXPECT_EQ((std::vector<std::string>{"scenario", "episodes"}), out.manifest.stages_completed);
    EXPECT_FALSE(out.manifest.files.empty());
    EXPECT_TRUE(verify_manifest(spec.outputs.dir).empty());
    const auto back = manifest_from_json(
        io::parse_json_text(io::read_text_file(fs::path(spec.outputs.dir) / "manifest.json"), "manifest"));
    EXPECT_EQ(back.failed_stage, "analyses");
}

TEST(Run, TrainedDroopLowersDeviationRmsOnHighPv) {
    auto spec = load_task_spec(kSpecs / "high_pv.json");
    spec.outputs.dir = scratch("high_pv").string();
    std::ostringstream table;
    const auto out = run(spec, &table);
    ASSERT_TRUE(out.manifest.ok()) << out.manifest.error;
    ASSERT_EQ(out.episodes.size(), 2u);
    EXPECT_EQ(out.episodes[0].label, "baseline");
    EXPECT_LT(out.episodes[1].trace.kpis.voltage_deviation_rms, out.episodes[0].trace.kpis.voltage_deviation_rms);
    EXPECT_NE(table.str().find("trained_decentralized"), std::string::npos);
    EXPECT_NE(table.str().find("voltage_deviation_rms_pu"), std::string::npos);
    EXPECT_TRUE(fs::exists(fs::path(spec.outputs.dir) / "policy_decentralized.json"));
    const auto params = policy::load_params(fs::path(spec.outputs.dir) / "policy_decentralized.json");
    EXPECT_EQ(params.deadband_pu, out.trained.at(0).result.best.deadband_pu);
}

TEST(Run, TrainOnlyWritesPolicies) {
    auto spec = load_task_spec(kSpecs / "complex_task.json");
    spec.scenario.horizon_steps = 12;
    spec.control.trainer.iterations = 1;
    spec.control.trainer.population_size = 4;
    spec.outputs.dir = scratch("train_only").string();
    const auto out = train_only(spec);
    ASSERT_TRUE(out.manifest.ok()) << out.manifest.error;
    EXPECT_EQ(out.manifest.files.size(), 4u);
    EXPECT_TRUE(fs::exists(fs::path(spec.outputs.dir) / "policy_centralized.json"));

    auto none = load_task_spec(kSpecs / "minimal.json");
    none.outputs.dir = scratch("train_none").string();
    EXPECT_EQ(train_only(none).manifest.failed_stage, "scenario");
}

// ---------------------------------------------------------------- plots

namespace {

cosim::EpisodeTrace run_short(const building::SyntheticFleetOptions& preset, std::size_t steps) {
    const auto net = power::build_ieee33();
    auto o = preset;
    o.horizon_steps = steps;
    cosim::SimulationConfig c;
    c.horizon_steps = steps;
    cosim::CosimEnvironment env(net, building::synthesize_fleet(net, o), c);
    return cosim::run_episode(env, policy::NoControlPolicy{});
}

}  // namespace

TEST(Plots, OneStepTraceGivesWellFormedSvg) {
    const auto trace = run_short(building::SyntheticFleetOptions::high_pv(), 1);
    const auto dir = scratch("plots_one");
    const auto files = emit_plots(trace, dir);
    std::size_t svgs = 0, csvs = 0;
    for (const auto& f : files) {
        ASSERT_TRUE(fs::exists(f)) << f;
        if (f.extension() == ".svg") {
            ++svgs;
            EXPECT_EQ(b2g::test::xml_problem(io::read_text_file(f)), "") << f;
            EXPECT_NE(io::read_text_file(f).find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
        } else {
            ++csvs;
        }
    }
    EXPECT_EQ(svgs, 3u);
    EXPECT_EQ(csvs, 3u);
}

TEST(Plots, XmlCheckerRejectsBrokenDocuments) {
    EXPECT_EQ(b2g::test::xml_problem("<a><b/></a>"), "");
    EXPECT_NE(b2g::test::xml_problem("<a><b></a>"), "");
    EXPECT_NE(b2g::test::xml_problem("<a x=1/>"), "");
    EXPECT_NE(b2g::test::xml_problem("<a>&nbsp;</a>"), "");
    EXPECT_NE(b2g::test::xml_problem("<a/><b/>"), "");
    EXPECT_NE(b2g::test::xml_problem("<a>"), "");
}

TEST(Plots, SvgEscapesLabels) {
    const auto doc = line_plot_svg("a < b & c", "x \"q\"", "y", {{"s>1", {0, 1}, {1, 2}}});
    EXPECT_EQ(b2g::test::xml_problem(doc), "");
    const auto bars = bar_plot_svg("t", "x", "y", {0, 1}, 1, {"p&q"}, {{0.5, 0.0}});
    EXPECT_EQ(b2g::test::xml_problem(bars), "");
}

TEST(Plots, ConstantVoltageTraceOccupiesOneHistogramBin) {
    const auto net = power::build_ieee33();
    cosim::SimulationConfig c;
    cosim::EpisodeTrace trace;
    for (std::size_t t = 0; t < 5; ++t) {
        cosim::StepRecord r;
        r.step = t;
        r.bus_voltages.assign(net.bus_count(), 1.003);
        r.line_flows_mva.assign(net.lines.size(), 0.1);
        r.net_loads_kw = {0.5, 0.5};
        trace.records.push_back(r);
    }
    trace.kpis = cosim::compute_kpis(trace.records, net, c);
    const auto dir = scratch("plots_const");
    emit_plots(trace, dir);
    const auto rows = read_csv(dir / "voltage_histogram.csv");
    std::size_t occupied = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) occupied += rows[r].at(2) != "0";
    EXPECT_EQ(occupied, 1u);
    const auto mv = read_csv(dir / "mean_voltage.csv");
    ASSERT_EQ(mv.size(), 6u);
    for (std::size_t r = 1; r < mv.size(); ++r) EXPECT_DOUBLE_EQ(std::stod(mv[r][1]), 1.003);
}

TEST(Plots, HighPvBaselineHistogramModeLiesAboveReference) {
    const auto trace = run_short(building::SyntheticFleetOptions::high_pv(), 72);
    const auto dir = scratch("plots_mode");
    emit_plots(trace, dir);
    const auto rows = read_csv(dir / "voltage_histogram.csv");
    std::size_t best = 1;
    for (std::size_t r = 1; r < rows.size() - 3; ++r)
        if (std::stoul(rows[r][2]) > std::stoul(rows[best][2])) best = r;
    EXPECT_GE(std::stod(rows[best][0]), 1.0) << "mode bin starts at " << rows[best][0];
}

TEST(Plots, HistogramCsvCountsMatchTheTrace) {
    const auto trace = run_short(building::SyntheticFleetOptions::low_pv(), 24);
    const auto dir = scratch("plots_counts");
    emit_plots(trace, dir);
    const auto rows = read_csv(dir / "net_load_histograms.csv");
    std::size_t total = 0;
    for (std::size_t r = 1; r < rows.size(); ++r)
        for (std::size_t c = 2; c < 5; ++c) total += std::stoul(rows[r][c]);
    EXPECT_EQ(total, trace.records.size() * trace.records.front().net_loads_kw.size());
    std::size_t vtotal = 0;
    for (const auto& row : read_csv(dir / "voltage_histogram.csv")) vtotal += row[2] == "count" ? 0 : std::stoul(row[2]);
    EXPECT_EQ(vtotal, trace.records.size() * 33);
}

TEST(Plots, EmptyTraceAndUnwritableDirectoryFail) {
    EXPECT_THROW(emit_plots(cosim::EpisodeTrace{}, scratch("plots_empty")), ModelError);
    const auto dir = scratch("plots_blocked");
    write_text_file(dir / "file", "x");
    const auto trace = run_short(building::SyntheticFleetOptions::high_pv(), 1);
    EXPECT_THROW(emit_plots(trace, dir / "file" / "sub"), FormatError);
}

TEST(KpiTable, SideBySideColumns) {
    cosim::EpisodeKpis a, b;
    a.voltage_std = 0.02;
    b.voltage_std = 0.01;
    a.over_voltage_steps = 15;
    const auto t = kpi_table({{"baseline", a}, {"trained", b}});
    std::istringstream in(t);
    std::string header;
    std::getline(in, header);
    EXPECT_NE(header.find("baseline"), std::string::npos);
    EXPECT_LT(header.find("baseline"), header.find("trained"));
    EXPECT_NE(t.find("voltage_std_pu"), std::string::npos);
    EXPECT_NE(t.find("15"), std::string::npos);
    const auto csv = kpi_comparison_csv({{"baseline", a}, {"trained", b}});
    EXPECT_NE(csv.find("voltage_std_pu,0.02,0.01\n"), std::string::npos);
}
