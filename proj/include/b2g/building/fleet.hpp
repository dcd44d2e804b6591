#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "b2g/core/error.hpp"
#include "b2g/power/network.hpp"

namespace b2g::building {

/// A building with an uncontrollable demand profile, rooftop PV and a battery.
struct BuildingModel {
    std::string id;
    std::vector<double> base_load_kw;  // one value per step
    std::vector<double> pv_kw;         // one value per step, >= 0
    double battery_capacity_kwh = 0.0;
    double battery_max_kw = 0.0;
    double round_trip_efficiency = 0.9;
    double power_factor = 0.95;
    double initial_soc_kwh = 0.0;

    std::size_t horizon() const { return base_load_kw.size(); }
};

struct BuildingState {
    double soc_kwh = 0.0;
    double last_net_load_kw = 0.0;
};

struct BusAssignment {
    int bus = 0;
    std::string building;
    int replication = 1;
};

/// Which building models sit at which bus, and how many copies of each.
using BusMapping = std::vector<BusAssignment>;

struct Fleet {
    std::vector<BuildingModel> buildings;
    BusMapping mapping;

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < buildings.size(); ++i)
            if (buildings[i].id == id) return i;
        throw ModelError("unknown building '" + id + "'");
    }

    std::vector<BuildingState> initial_states() const {
        std::vector<BuildingState> out;
        out.reserve(buildings.size());
        for (const auto& b : buildings) out.push_back({b.initial_soc_kwh, 0.0});
        return out;
    }
};

inline void validate_building(const BuildingModel& b, std::size_t horizon) {
    const std::string tag = "building '" + b.id + "'";
    if (b.base_load_kw.size() != horizon || b.pv_kw.size() != horizon)
        throw ModelError(tag + ": profile length differs from the horizon " + std::to_string(horizon));
    for (double pv : b.pv_kw)
        if (!(pv >= 0.0)) throw ModelError(tag + ": pv_kw must be non-negative");
    for (double p : b.base_load_kw)
        if (!std::isfinite(p)) throw ModelError(tag + ": base_load_kw must be finite");
    if (!(b.battery_capacity_kwh >= 0.0) || !(b.battery_max_kw >= 0.0))
        throw ModelError(tag + ": battery ratings must be non-negative");
    // One-hour rate bound: a full-power hour never exceeds the capacity.
    if (b.battery_max_kw > b.battery_capacity_kwh) throw ModelError(tag + ": battery_max_kw exceeds capacity per hour");
    if (!(b.round_trip_efficiency > 0.0 && b.round_trip_efficiency <= 1.0))
        throw ModelError(tag + ": round_trip_efficiency must lie in (0, 1]");
    if (!(b.power_factor > 0.8 && b.power_factor <= 1.0)) throw ModelError(tag + ": power_factor must lie in (0.8, 1]");
    if (!(b.initial_soc_kwh >= 0.0 && b.initial_soc_kwh <= b.battery_capacity_kwh))
        throw ModelError(tag + ": initial_soc_kwh outside [0, capacity]");
}

inline void validate_fleet(const Fleet& fleet, const power::PowerNetwork& net, std::size_t horizon) {
    std::unordered_map<std::string, int> ids;
    for (const auto& b : fleet.buildings) {
        if (ids.count(b.id)) throw ModelError("duplicate building id '" + b.id + "'");
        ids[b.id] = 1;
        validate_building(b, horizon);
    }
    for (const auto& a : fleet.mapping) {
        if (!net.find_bus(a.bus)) throw ModelError("mapping references unknown bus " + std::to_string(a.bus));
        if (!ids.count(a.building)) throw ModelError("mapping references unknown building '" + a.building + "'");
        if (a.replication < 1) throw ModelError("replication count must be >= 1");
    }
}

struct BuildingStepResult {
    BuildingState state;
    double net_load_kw = 0.0;
    double battery_kw = 0.0;  // terminal power, positive while charging
};

/// Advances one building by one step. The action scales battery_max_kw
/// (positive charges). Terminal power is clamped so the state of charge stays
/// in [0, capacity], with sqrt(efficiency) applied on each conversion.
inline BuildingStepResult step_building(const BuildingModel& model, const BuildingState& state, double action,
                                        std::size_t t, double dt_hours) {
    if (t >= model.horizon()) throw ModelError("horizon exceeded");
    if (!(action >= -1.0 && action <= 1.0)) throw ModelError("action must lie in [-1, 1]");
    if (!(dt_hours > 0.0)) throw ModelError("dt_hours must be positive");

    const double eta = std::sqrt(model.round_trip_efficiency);
    double p = action * model.battery_max_kw;
    if (p > 0.0) {
        const double room = model.battery_capacity_kwh - state.soc_kwh;
        p = std::min(p, std::max(0.0, room) / (dt_hours * eta));
    } else if (p < 0.0) {
        p = std::max(p, -std::max(0.0, state.soc_kwh) * eta / dt_hours);
    }

    BuildingStepResult out;
    out.battery_kw = p;
    double soc = state.soc_kwh + (p > 0.0 ? p * dt_hours * eta : p * dt_hours / eta);
    out.state.soc_kwh = std::clamp(soc, 0.0, model.battery_capacity_kwh);
    out.net_load_kw = model.base_load_kw[t] - model.pv_kw[t] + p;
    out.state.last_net_load_kw = out.net_load_kw;
    return out;
}

/// Sums replicated building net loads onto network buses (MW / MVAr),
/// positionally aligned with net.buses. Q follows each building's power factor
/// and carries the sign of P.
inline power::BusLoads aggregate_bus_loads(const Fleet& fleet, const std::vector<double>& net_loads_kw,
                                           const power::PowerNetwork& net) {
    if (net_loads_kw.size() != fleet.buildings.size())
        throw ModelError("expected one net load per building");
    power::BusLoads out(net.bus_count());
    for (const auto& a : fleet.mapping) {
        const auto b = fleet.index_of(a.building);
        const double p_mw = a.replication * net_loads_kw[b] / 1000.0;
        const double pf = fleet.buildings[b].power_factor;
        const double q_mvar = pf >= 1.0 ? 0.0 : p_mw * std::tan(std::acos(pf));
        auto& slot = out[net.bus_index(a.bus)];
        slot.p_mw += p_mw;
        slot.q_mvar += q_mvar;
    }
    return out;
}

}  // namespace b2g::building
