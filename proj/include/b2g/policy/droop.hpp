#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "b2g/cosim/engine.hpp"
#include "b2g/power/network_io.hpp"

namespace b2g::policy {

enum class ControlMode { centralized, decentralized };

inline const char* to_string(ControlMode m) { return m == ControlMode::centralized ? "centralized" : "decentralized"; }

inline ControlMode control_mode_from_string(const std::string& s) {
    if (s == "centralized") return ControlMode::centralized;
    if (s == "decentralized") return ControlMode::decentralized;
    throw FormatError("unknown control mode '" + s + "'");
}

/// Voltage-droop rule: zero action inside the deadband, linear outside it.
struct PolicyParams {
    double deadband_pu = 0.01;
    double slope = 20.0;  // action per p.u. of deviation beyond the deadband
    ControlMode mode = ControlMode::decentralized;

    void validate() const {
        if (!(deadband_pu >= 0.0) || !std::isfinite(deadband_pu)) throw ModelError("deadband_pu must be >= 0");
        if (!(slope >= 0.0) || !std::isfinite(slope)) throw ModelError("slope must be >= 0");
    }
};

inline double deadbanded(double deviation, double band) {
    if (deviation > band) return deviation - band;
    if (deviation < -band) return deviation + band;
    return 0.0;
}

/// Mean voltage over the distinct buses that host at least one building.
inline double hosted_mean_voltage(const cosim::Observation& obs) {
    std::vector<bool> seen(obs.bus_voltages.size(), false);
    double sum = 0.0;
    std::size_t n = 0;
    for (auto bus : obs.building_bus) {
        if (seen.at(bus)) continue;
        seen[bus] = true;
        sum += obs.bus_voltages[bus];
        ++n;
    }
    return n == 0 ? obs.v_ref : sum / static_cast<double>(n);
}

/// Per-building battery actions. Decentralized buildings read their own bus
/// voltage; centralized ones all read the mean voltage of the buses that host
/// buildings. Over-voltage charges (raises demand), under-voltage discharges.
inline std::vector<double> act(const PolicyParams& params, const cosim::Observation& obs) {
    std::vector<double> out(obs.building_bus.size(), 0.0);
    if (obs.bus_voltages.empty()) return out;
    const double mean = params.mode == ControlMode::centralized ? hosted_mean_voltage(obs) : 0.0;
    for (std::size_t b = 0; b < out.size(); ++b) {
        const double v = params.mode == ControlMode::centralized ? mean : obs.bus_voltages.at(obs.building_bus[b]);
        out[b] = std::clamp(params.slope * deadbanded(v - obs.v_ref, params.deadband_pu), -1.0, 1.0);
    }
    return out;
}

struct DroopPolicy {
    PolicyParams params;
    std::vector<double> act(const cosim::Observation& obs) const { return policy::act(params, obs); }
};

struct NoControlPolicy {
    std::vector<double> act(const cosim::Observation& obs) const {
        return std::vector<double>(obs.building_bus.size(), 0.0);
    }
};

inline io::json params_to_json(const PolicyParams& p) {
    return {{"format", "b2g-policy/1"},
            {"deadband_pu", p.deadband_pu},
            {"slope", p.slope},
            {"mode", to_string(p.mode)}};
}

inline PolicyParams params_from_json(const io::json& doc) {
    io::require_keys(doc, {"format", "deadband_pu", "slope", "mode"}, "policy");
    if (auto f = io::get_or<std::string>(doc, "format", "b2g-policy/1"); f != "b2g-policy/1")
        throw FormatError("policy: unsupported format '" + f + "'");
    PolicyParams p;
    p.deadband_pu = io::get_required<double>(doc, "deadband_pu", "policy");
    p.slope = io::get_required<double>(doc, "slope", "policy");
    p.mode = control_mode_from_string(io::get_or<std::string>(doc, "mode", "decentralized"));
    p.validate();
    return p;
}

inline PolicyParams load_params(const std::filesystem::path& path) {
    return params_from_json(io::parse_json_text(io::read_text_file(path), path.string()));
}

inline void save_params(const PolicyParams& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << params_to_json(p).dump(2) << '\n';
}

}  // namespace b2g::policy
