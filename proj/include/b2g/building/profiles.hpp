#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "b2g/building/fleet.hpp"
#include "b2g/power/network.hpp"

namespace b2g::building {

/// Parameters of the synthetic residential fleet. Base demand follows a
/// diurnal curve (overnight floor, morning bump, evening peak) scaled per
/// building with multiplicative noise; PV follows a clear-sky bell between
/// 06:00 and 18:00 with a per-building peak and a per-day cloud factor.
struct SyntheticFleetOptions {
    std::size_t horizon_steps = 72;
    double dt_hours = 1.0;
    int buildings_per_bus = 12;
    int archetypes_per_bus = 4;  // distinct models per bus; each replicated buildings_per_bus / archetypes_per_bus times
    std::uint64_t seed = 7;

    double load_scale_min = 0.5;  // multiplier on the diurnal curve
    double load_scale_max = 2.5;
    double load_noise = 0.08;  // relative standard deviation
    double evening_peak_kw = 1.8;
    double pv_peak_min_kw = 0.0;
    double pv_peak_max_kw = 20.0;
    double cloud_min = 0.85;

    double battery_capacity_kwh = 30.0;
    double battery_max_kw = 5.0;
    double round_trip_efficiency = 0.9;
    double power_factor = 0.95;
    double initial_soc_fraction = 0.2;

    /// Strong, uneven midday PV: reverse power flow and over-voltage at the
    /// feeder ends. Batteries start nearly empty.
    static SyntheticFleetOptions high_pv() { return {}; }

    /// Weak PV and a heavy evening peak: under-voltage in the evening.
    /// Batteries start mostly full.
    static SyntheticFleetOptions low_pv() {
        SyntheticFleetOptions o;
        o.pv_peak_max_kw = 2.0;
        o.evening_peak_kw = 5.0;
        o.initial_soc_fraction = 0.8;
        return o;
    }
};

/// Demand shape in kW at hour-of-day `h` before per-building scaling.
inline double diurnal_load_kw(double h, double evening_peak_kw) {
    auto bump = [h](double centre, double width) {
        // wrap around midnight so the curve is periodic
        double d = std::fmod(std::abs(h - centre), 24.0);
        d = std::min(d, 24.0 - d);
        return std::exp(-(d / width) * (d / width));
    };
    return 0.6 + 0.8 * bump(7.5, 1.5) + evening_peak_kw * bump(19.0, 2.2);
}

/// Clear-sky PV shape in [0, 1] at hour-of-day `h`.
inline double clear_sky_pv(double h) {
    if (h <= 6.0 || h >= 18.0) return 0.0;
    return std::pow(std::sin(std::numbers::pi * (h - 6.0) / 12.0), 1.5);
}

/// Generates one archetype set per non-slack bus of `net`, mapped with the
/// requested replication. Deterministic in `options.seed`.
inline Fleet synthesize_fleet(const power::PowerNetwork& net, const SyntheticFleetOptions& options) {
    if (options.archetypes_per_bus < 1 || options.buildings_per_bus < options.archetypes_per_bus ||
        options.buildings_per_bus % options.archetypes_per_bus != 0)
        throw ModelError("buildings_per_bus must be a positive multiple of archetypes_per_bus");
    if (options.horizon_steps == 0) throw ModelError("horizon_steps must be positive");

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> load_scale(options.load_scale_min, options.load_scale_max);
    std::uniform_real_distribution<double> pv_peak(options.pv_peak_min_kw, options.pv_peak_max_kw);
    std::uniform_real_distribution<double> cloud(options.cloud_min, 1.0);
    std::normal_distribution<double> noise(0.0, options.load_noise);

    const std::size_t days =
        static_cast<std::size_t>(std::ceil(static_cast<double>(options.horizon_steps) * options.dt_hours / 24.0)) + 1;
    std::vector<double> day_cloud(days);
    for (auto& c : day_cloud) c = cloud(rng);

    const int replication = options.buildings_per_bus / options.archetypes_per_bus;
    Fleet fleet;
    const auto slack = net.slack_index();
    for (std::size_t bi = 0; bi < net.bus_count(); ++bi) {
        if (bi == slack) continue;
        const int bus_id = net.buses[bi].id;
        for (int a = 0; a < options.archetypes_per_bus; ++a) {
            BuildingModel b;
            b.id = "b" + std::to_string(bus_id) + "_" + std::to_string(a + 1);
            const double scale = load_scale(rng);
            const double peak = pv_peak(rng);
            b.base_load_kw.resize(options.horizon_steps);
            b.pv_kw.resize(options.horizon_steps);
            for (std::size_t t = 0; t < options.horizon_steps; ++t) {
                const double hours = static_cast<double>(t) * options.dt_hours;
                const double h = std::fmod(hours, 24.0);
                const auto day = static_cast<std::size_t>(hours / 24.0);
                b.base_load_kw[t] =
                    std::max(0.0, scale * diurnal_load_kw(h, options.evening_peak_kw) * (1.0 + noise(rng)));
                b.pv_kw[t] = peak * day_cloud[day] * clear_sky_pv(h);
            }
            b.battery_capacity_kwh = options.battery_capacity_kwh;
            b.battery_max_kw = options.battery_max_kw;
            b.round_trip_efficiency = options.round_trip_efficiency;
            b.power_factor = options.power_factor;
            b.initial_soc_kwh = options.initial_soc_fraction * options.battery_capacity_kwh;
            fleet.mapping.push_back({bus_id, b.id, replication});
            fleet.buildings.push_back(std::move(b));
        }
    }
    return fleet;
}

}  // namespace b2g::building
