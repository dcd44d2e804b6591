#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "b2g/core/error.hpp"

namespace b2g::power {

enum class BusKind { slack, load };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::load;
    double nominal_kv = 12.66;  // line-to-line
    double v_min = 0.9;         // p.u.
    double v_max = 1.1;         // p.u.
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double r_ohm = 0.0;
    double x_ohm = 0.0;
    double rating_mva = 1.0;
    bool in_service = true;
};

/// Fixed reactive element at a bus. Consumer sign convention: q_mvar < 0 is a
/// capacitive injection into the bus, q_mvar > 0 an inductive absorption. The
/// setpoint is referenced to 1.0 p.u. voltage (constant admittance).
struct Shunt {
    int bus = 0;
    double q_mvar = 0.0;
};

struct ExternalGrid {
    int bus = 0;
    double v_setpoint_pu = 1.0;
    double source_r_ohm = 0.0;
    double source_x_ohm = 0.0;
};

/// Nominal (design) consumption attached to a bus, consumer convention.
struct NominalLoad {
    int bus = 0;
    double p_mw = 0.0;
    double q_mvar = 0.0;
};

/// Active/reactive demand at one bus for a power-flow solve (MW / MVAr).
struct BusPower {
    double p_mw = 0.0;
    double q_mvar = 0.0;
};

/// Per-bus demand vector, positionally aligned with PowerNetwork::buses.
using BusLoads = std::vector<BusPower>;

struct PowerNetwork {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Shunt> shunts;
    ExternalGrid external_grid;
    std::vector<NominalLoad> loads;
    double base_mva = 10.0;

    std::size_t bus_count() const { return buses.size(); }

    std::optional<std::size_t> find_bus(int id) const {
        for (std::size_t i = 0; i < buses.size(); ++i) {
            if (buses[i].id == id) return i;
        }
        return std::nullopt;
    }

    std::size_t bus_index(int id) const {
        auto idx = find_bus(id);
        if (!idx) throw ModelError("unknown bus id " + std::to_string(id));
        return *idx;
    }

    std::optional<std::size_t> find_line(int id) const {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (lines[i].id == id) return i;
        }
        return std::nullopt;
    }

    std::size_t slack_index() const { return bus_index(external_grid.bus); }

    /// Nominal loads gathered into a bus-aligned vector (several entries on
    /// one bus are summed).
    BusLoads nominal_bus_loads(double scale = 1.0) const {
        BusLoads out(buses.size());
        for (const auto& load : loads) {
            auto& slot = out[bus_index(load.bus)];
            slot.p_mw += scale * load.p_mw;
            slot.q_mvar += scale * load.q_mvar;
        }
        return out;
    }

    double base_impedance_ohm(std::size_t bus_idx) const {
        const double kv = buses[bus_idx].nominal_kv;
        return kv * kv / base_mva;
    }
};

/// Checks the structural invariants of a network and throws ModelError on the
/// first violation found.
inline void validate_network(const PowerNetwork& net) {
    if (!(net.base_mva > 0.0)) throw ModelError("base_mva must be positive");
    if (net.buses.empty()) throw ModelError("network has no buses");

    std::unordered_map<int, int> seen;
    int slack_count = 0;
    for (const auto& bus : net.buses) {
        if (seen.count(bus.id)) throw ModelError("duplicate bus id " + std::to_string(bus.id));
        seen[bus.id] = 1;
        if (bus.kind == BusKind::slack) ++slack_count;
        if (!(bus.nominal_kv > 0.0))
            throw ModelError("bus " + std::to_string(bus.id) + ": nominal_kv must be positive");
        if (!(bus.v_min > 0.0 && bus.v_min < bus.v_max))
            throw ModelError("bus " + std::to_string(bus.id) + ": need 0 < v_min < v_max");
    }
    if (slack_count != 1)
        throw ModelError("network needs exactly one slack bus, found " + std::to_string(slack_count));

    const auto slack_idx = net.find_bus(net.external_grid.bus);
    if (!slack_idx || net.buses[*slack_idx].kind != BusKind::slack)
        throw ModelError("external grid must sit on the slack bus");
    const double vs = net.external_grid.v_setpoint_pu;
    if (!(vs >= 0.9 && vs <= 1.1)) throw ModelError("v_setpoint_pu outside [0.9, 1.1]");

    std::unordered_map<int, int> line_ids;
    for (const auto& line : net.lines) {
        const std::string tag = "line " + std::to_string(line.id);
        if (line_ids.count(line.id)) throw ModelError("duplicate " + tag);
        line_ids[line.id] = 1;
        if (line.from_bus == line.to_bus) throw ModelError(tag + ": from_bus equals to_bus");
        if (!net.find_bus(line.from_bus) || !net.find_bus(line.to_bus))
            throw ModelError(tag + ": endpoint bus does not exist");
        if (line.x_ohm < 0.0) throw ModelError(tag + ": x_ohm must be >= 0");
        if (!(line.rating_mva > 0.0)) throw ModelError(tag + ": rating_mva must be positive");
        const auto& a = net.buses[net.bus_index(line.from_bus)];
        const auto& b = net.buses[net.bus_index(line.to_bus)];
        if (a.nominal_kv != b.nominal_kv) throw ModelError(tag + ": connects different voltage levels");
    }
    for (const auto& shunt : net.shunts) {
        if (!net.find_bus(shunt.bus))
            throw ModelError("shunt references unknown bus " + std::to_string(shunt.bus));
    }
    for (const auto& load : net.loads) {
        if (!net.find_bus(load.bus))
            throw ModelError("load references unknown bus " + std::to_string(load.bus));
    }
}

/// Bus indices reachable from the slack bus over in-service lines.
inline std::vector<bool> reachable_from_slack(const PowerNetwork& net) {
    const std::size_t n = net.bus_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& line : net.lines) {
        if (!line.in_service) continue;
        const auto a = net.bus_index(line.from_bus);
        const auto b = net.bus_index(line.to_bus);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    const auto slack = net.slack_index();
    seen[slack] = true;
    frontier.push(slack);
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (auto v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                frontier.push(v);
            }
        }
    }
    return seen;
}

/// Ids of buses cut off from the slack bus; empty when the network is connected.
inline std::vector<int> islanded_buses(const PowerNetwork& net) {
    const auto seen = reachable_from_slack(net);
    std::vector<int> out;
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) out.push_back(net.buses[i].id);
    }
    return out;
}

inline bool is_radial(const PowerNetwork& net) {
    const auto in_service = std::count_if(net.lines.begin(), net.lines.end(),
                                          [](const Line& l) { return l.in_service; });
    return islanded_buses(net).empty() &&
           static_cast<std::size_t>(in_service) + 1 == net.bus_count();
}

}  // namespace b2g::power
