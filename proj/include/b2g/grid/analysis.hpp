#pragma once

#include <cmath>
#include <complex>
#include <future>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "b2g/power/power_flow.hpp"
#include "b2g/power/ybus.hpp"

namespace b2g::grid {

using power::PowerFlowResult;
using power::PowerNetwork;

struct SecurityLimits {
    double v_min = 0.95;
    double v_max = 1.05;
    double loading_threshold = 1.0;  // fraction of rating_mva

    /// Symmetric band around 1.0 p.u.: tolerance 0.05 gives [0.95, 1.05].
    static SecurityLimits from_tolerance(double tolerance_pu, double loading_threshold = 1.0) {
        SecurityLimits out{1.0 - tolerance_pu, 1.0 + tolerance_pu, loading_threshold};
        out.validate();
        return out;
    }

    void validate() const {
        if (!(v_min > 0.0 && v_min < v_max)) throw ModelError("security limits need 0 < v_min < v_max");
        if (!(loading_threshold > 0.0 && loading_threshold <= 1.5))
            throw ModelError("loading_threshold must lie in (0, 1.5]");
    }
};

enum class VoltageBound { under, over };

struct VoltageViolation {
    int bus = 0;
    double vm_pu = 0.0;
    VoltageBound bound = VoltageBound::under;
};

struct LoadingViolation {
    int line = 0;
    double s_mva = 0.0;
    double limit_mva = 0.0;
};

struct ScreeningReport {
    std::vector<VoltageViolation> voltage_violations;
    std::vector<LoadingViolation> loading_violations;
    bool admissible = true;
};

/// Voltage band and thermal screening of a converged operating point.
inline ScreeningReport screen(const PowerFlowResult& result, const PowerNetwork& net, const SecurityLimits& limits) {
    if (!result.converged) throw Error("cannot screen diverged state");
    limits.validate();
    ScreeningReport report;
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
        const double vm = result.vm(i);
        if (vm < limits.v_min) report.voltage_violations.push_back({net.buses[i].id, vm, VoltageBound::under});
        else if (vm > limits.v_max) report.voltage_violations.push_back({net.buses[i].id, vm, VoltageBound::over});
    }
    for (std::size_t k = 0; k < net.lines.size(); ++k) {
        const auto& line = net.lines[k];
        if (!line.in_service) continue;
        const double limit = limits.loading_threshold * line.rating_mva;
        if (result.line_flows[k] > limit) report.loading_violations.push_back({line.id, result.line_flows[k], limit});
    }
    report.admissible = report.voltage_violations.empty() && report.loading_violations.empty();
    return report;
}

enum class Classification { safe, unsafe };
enum class OutageCause { islanding, divergence, voltage_violation, loading_violation, none };

inline const char* to_string(Classification c) { return c == Classification::safe ? "safe" : "unsafe"; }

inline const char* to_string(OutageCause c) {
    switch (c) {
        case OutageCause::islanding: return "islanding";
        case OutageCause::divergence: return "divergence";
        case OutageCause::voltage_violation: return "voltage_violation";
        case OutageCause::loading_violation: return "loading_violation";
        case OutageCause::none: return "none";
    }
    return "none";
}

struct ContingencyOutcome {
    int outage_line = 0;
    Classification classification = Classification::safe;
    OutageCause cause = OutageCause::none;
};

struct NMinus1Report {
    int unsafe_count = 0;  // R_{N-1}
    std::vector<ContingencyOutcome> outcomes;
};

struct NMinus1Options {
    power::PowerFlowOptions power_flow;
    /// Worker threads for contingency solves; 0 uses hardware concurrency.
    unsigned threads = 1;
};

/// Outcome of taking line `line_pos` out of service, given loads and limits.
inline ContingencyOutcome evaluate_contingency(const PowerNetwork& net, std::size_t line_pos,
                                               const power::BusLoads& loads, const SecurityLimits& limits,
                                               const power::PowerFlowOptions& pf_options) {
    PowerNetwork outaged = net;
    outaged.lines[line_pos].in_service = false;
    ContingencyOutcome outcome{net.lines[line_pos].id, Classification::unsafe, OutageCause::none};
    if (!power::islanded_buses(outaged).empty()) {
        outcome.cause = OutageCause::islanding;
        return outcome;
    }
    const auto result = power::solve_power_flow(outaged, loads, pf_options);
    if (!result.converged) {
        outcome.cause = OutageCause::divergence;
        return outcome;
    }
    const auto report = screen(result, outaged, limits);
    if (!report.voltage_violations.empty()) outcome.cause = OutageCause::voltage_violation;
    else if (!report.loading_violations.empty()) outcome.cause = OutageCause::loading_violation;
    else outcome.classification = Classification::safe;
    return outcome;
}

/// Single-line outage sweep. Every in-service line is removed in turn; the
/// outcome list follows the order of net.lines and R_{N-1} counts unsafe cases.
inline NMinus1Report n_minus_1(const PowerNetwork& net, const power::BusLoads& loads, const SecurityLimits& limits,
                               const NMinus1Options& options = {}) {
    limits.validate();
    const auto base = power::solve_power_flow(net, loads, options.power_flow);
    if (!base.converged) throw Error("base case infeasible");

    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < net.lines.size(); ++k) {
        if (net.lines[k].in_service) candidates.push_back(k);
    }

    NMinus1Report report;
    report.outcomes.resize(candidates.size());
    unsigned workers = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, candidates.size())));

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c)
            report.outcomes[c] = evaluate_contingency(net, candidates[c], loads, limits, options.power_flow);
    };
    if (workers <= 1) {
        run_range(0, candidates.size());
    } else {
        std::vector<std::future<void>> jobs;
        const std::size_t chunk = (candidates.size() + workers - 1) / workers;
        for (std::size_t begin = 0; begin < candidates.size(); begin += chunk)
            jobs.push_back(std::async(std::launch::async, run_range, begin, std::min(candidates.size(), begin + chunk)));
        for (auto& job : jobs) job.get();
    }
    for (const auto& o : report.outcomes) report.unsafe_count += o.classification == Classification::unsafe;
    return report;
}

struct TheveninEquivalent {
    int bus = 0;
    double r_th_ohm = 0.0;
    double x_th_ohm = 0.0;

    double magnitude_ohm() const { return std::hypot(r_th_ohm, x_th_ohm); }
};

/// Driving-point impedance of the passive network (lines, shunts and the
/// source impedance at the slack bus) seen from `bus`. Loads are ignored.
inline TheveninEquivalent thevenin_at(const PowerNetwork& net, int bus) {
    power::validate_network(net);
    const auto& eg = net.external_grid;
    const std::complex<double> z_source(eg.source_r_ohm, eg.source_x_ohm);
    if (std::abs(z_source) == 0.0) throw ModelError("short-circuit analysis needs a source impedance");

    const auto k = static_cast<Eigen::Index>(net.bus_index(bus));
    const auto slack = net.slack_index();
    power::ComplexMatrix y = power::assemble_ybus(net);
    y(static_cast<Eigen::Index>(slack), static_cast<Eigen::Index>(slack)) +=
        1.0 / (z_source / net.base_impedance_ohm(slack));

    const Eigen::FullPivLU<power::ComplexMatrix> lu(y);
    if (!lu.isInvertible()) throw Error("floating network");
    power::ComplexVector rhs = power::ComplexVector::Zero(y.rows());
    rhs(k) = 1.0;
    const power::ComplexVector col = lu.solve(rhs);
    const auto z = col(k) * net.base_impedance_ohm(static_cast<std::size_t>(k));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error("floating network");
    return {bus, z.real(), z.imag()};
}

/// Initial symmetrical short-circuit current magnitude in kA for a nominal
/// line-to-line voltage in kV: |I| = U / (sqrt(3) |Z_th|).
inline double short_circuit_current(const TheveninEquivalent& thev, double u_nom_kv) {
    const double z = thev.magnitude_ohm();
    if (!(z > 0.0)) throw Error("bolted fault at source");
    return u_nom_kv / (std::sqrt(3.0) * z);
}

}  // namespace b2g::grid
